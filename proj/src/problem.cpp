#include "prosrs/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prosrs/random.hpp"

namespace prosrs {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw InvalidArgument(std::string(what) + ": expected dimension " + std::to_string(want) +
                          ", got " + std::to_string(got));
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(master);
  h = mix(h ^ static_cast<std::uint64_t>(stream));
  return mix(h ^ index);
}

BoxDomain::BoxDomain(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw InvalidArgument("BoxDomain: bounds must be non-empty and of equal length");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i])) {
      throw InvalidArgument("BoxDomain: need finite lower < upper in dimension " + std::to_string(i));
    }
  }
}

BoxDomain BoxDomain::cube(std::size_t d, double lo, double hi) {
  return BoxDomain(std::vector<double>(d, lo), std::vector<double>(d, hi));
}

Point BoxDomain::center() const {
  Point c(dimension());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lower_[i] + upper_[i]);
  return c;
}

bool BoxDomain::contains(std::span<const double> x) const {
  if (x.size() != dimension()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
  }
  return true;
}

bool BoxDomain::contains(const BoxDomain& other) const {
  if (other.dimension() != dimension()) return false;
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (other.lower_[i] < lower_[i] || other.upper_[i] > upper_[i]) return false;
  }
  return true;
}

Point BoxDomain::to_unit(std::span<const double> x) const {
  require_dim(x.size(), dimension(), "BoxDomain::to_unit");
  Point u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = (x[i] - lower_[i]) / side_length(i);
  return u;
}

Point BoxDomain::from_unit(std::span<const double> u) const {
  require_dim(u.size(), dimension(), "BoxDomain::from_unit");
  Point x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) x[i] = lower_[i] + u[i] * side_length(i);
  return x;
}

void EvalDataset::add(Point x, double y) {
  if (records_.empty() && dimension_ == 0) dimension_ = x.size();
  require_dim(x.size(), dimension_, "EvalDataset::add");
  if (!std::isfinite(y)) throw EvaluatorError("EvalDataset::add: non-finite response value");
  records_.push_back({std::move(x), y});
}

void EvalDataset::append(const EvalDataset& other) {
  for (const auto& r : other) add(r.x, r.y);
}

std::vector<Point> EvalDataset::points() const {
  std::vector<Point> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.x);
  return out;
}

std::vector<double> EvalDataset::values() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.y);
  return out;
}

std::size_t EvalDataset::argmin_y() const {
  if (records_.empty()) throw InsufficientData("EvalDataset::argmin_y on empty data");
  std::size_t best = 0;
  for (std::size_t i = 1; i < records_.size(); ++i) {
    if (records_[i].y < records_[best].y) best = i;
  }
  return best;
}

double EvalDataset::min_y() const { return records_[argmin_y()].y; }

EvalDataset EvalDataset::restricted_to(const BoxDomain& domain) const {
  EvalDataset out(domain.dimension());
  for (const auto& r : records_) {
    if (domain.contains(r.x)) out.records_.push_back(r);
  }
  return out;
}

RunConfig default_config(std::size_t d, std::size_t n_par) {
  if (d == 0 || n_par == 0) throw InvalidArgument("default_config: d and n_par must be positive");
  RunConfig c;
  c.n_par = n_par;
  c.m_doe = ceil_div(3, n_par) * n_par;
  c.s_init = ExploitState{0.0, 1.0, 0.1};
  c.sigma_crit = 0.025;
  c.beta_init = 0.02;
  c.beta_min = 0.01;
  c.rho = 0.4;
  c.r_resolution = 0.01;
  c.c_fail = std::max<std::size_t>(ceil_div(d, n_par), 2);
  c.delta_gamma = 2.0;
  c.n_candidates_per_dim = 1000;
  return c;
}

void validate(const RunConfig& c) {
  auto in_open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  auto fail = [](const std::string& msg) { throw ConfigError("invalid configuration: " + msg); };
  if (c.n_par == 0) fail("n_par must be positive");
  if (c.m_doe == 0) fail("m_doe must be positive");
  if (!c.s_init.valid()) fail("s_init needs gamma <= 0, p in [0,1], sigma > 0");
  if (!in_open_unit(c.sigma_crit)) fail("sigma_crit must lie in (0,1)");
  if (!in_open_unit(c.beta_init)) fail("beta_init must lie in (0,1)");
  if (!in_open_unit(c.beta_min)) fail("beta_min must lie in (0,1)");
  if (c.beta_min > c.beta_init) fail("beta_min must not exceed beta_init");
  if (!in_open_unit(c.rho)) fail("rho must lie in (0,1)");
  if (!in_open_unit(c.r_resolution)) fail("r_resolution must lie in (0,1)");
  if (c.c_fail == 0) fail("c_fail must be positive");
  if (!(c.delta_gamma > 0.0)) fail("delta_gamma must be positive");
  if (c.n_candidates_per_dim == 0) fail("n_candidates_per_dim must be positive");
  if (c.doe_restarts == 0) fail("doe_restarts must be positive");
}

Point clip_to_domain(std::span<const double> x, const BoxDomain& domain) {
  require_dim(x.size(), domain.dimension(), "clip_to_domain");
  Point out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(out[i], domain.lower(i), domain.upper(i));
  }
  return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace prosrs
