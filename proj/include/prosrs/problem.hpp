#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "prosrs/errors.hpp"

namespace prosrs {

using Point = std::vector<double>;

/// Axis-aligned box [lower_0, upper_0] x ... x [lower_{d-1}, upper_{d-1}].
class BoxDomain {
 public:
  BoxDomain(std::vector<double> lower, std::vector<double> upper);

  static BoxDomain cube(std::size_t d, double lo, double hi);

  std::size_t dimension() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double lower(std::size_t i) const { return lower_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }
  double side_length(std::size_t i) const { return upper_[i] - lower_[i]; }
  Point center() const;

  /// Closed-box membership.
  bool contains(std::span<const double> x) const;
  /// Set containment, per dimension.
  bool contains(const BoxDomain& other) const;

  /// Affine map onto [0,1]^d and back.
  Point to_unit(std::span<const double> x) const;
  Point from_unit(std::span<const double> u) const;

  bool operator==(const BoxDomain&) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

struct EvalRecord {
  Point x;
  double y;
};

/// Ordered (x, y) records of a single dimension. Insertion order is kept.
class EvalDataset {
 public:
  EvalDataset() = default;
  explicit EvalDataset(std::size_t dimension) : dimension_(dimension) {}

  /// Throws InvalidArgument on dimension mismatch and EvaluatorError on non-finite y.
  void add(Point x, double y);
  void append(const EvalDataset& other);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t dimension() const { return dimension_; }
  const EvalRecord& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<EvalRecord>& records() const { return records_; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  std::vector<Point> points() const;
  std::vector<double> values() const;

  /// Index of the lowest y, first one on ties. Requires non-empty data.
  std::size_t argmin_y() const;
  double min_y() const;

  /// Records that fall inside `domain`, in original order.
  EvalDataset restricted_to(const BoxDomain& domain) const;

 private:
  std::size_t dimension_ = 0;
  std::vector<EvalRecord> records_;
};

/// Exploitation strength (gamma, p, sigma). Smaller means greedier.
struct ExploitState {
  double gamma = 0.0;
  double p = 1.0;
  double sigma = 0.1;

  bool valid() const { return gamma <= 0.0 && p >= 0.0 && p <= 1.0 && sigma > 0.0; }
  bool operator==(const ExploitState&) const = default;
};

struct RunConfig {
  std::size_t n_par = 1;
  /// 0 runs the initial design only.
  std::size_t n_iterations = 1;
  std::size_t m_doe = 3;
  ExploitState s_init{};
  double sigma_crit = 0.025;
  double beta_init = 0.02;
  double beta_min = 0.01;
  double rho = 0.4;
  double r_resolution = 0.01;
  std::size_t c_fail = 2;
  double delta_gamma = 2.0;
  std::size_t n_candidates_per_dim = 1000;
  std::size_t doe_restarts = 100;
  std::uint64_t seed = 0;

  bool operator==(const RunConfig&) const = default;
};

/// Default parameters for a d-dimensional problem evaluated n_par points at a time.
RunConfig default_config(std::size_t d, std::size_t n_par);

/// Throws ConfigError when a field is out of range.
void validate(const RunConfig& config);

/// Componentwise clamp, i.e. the nearest point of the box.
Point clip_to_domain(std::span<const double> x, const BoxDomain& domain);

/// Noisy black-box objective on a box.
///
/// `eval` receives the point and a per-evaluation stream seed; stochastic
/// objectives draw their noise from it so that results do not depend on
/// evaluation order or thread scheduling. It may be called concurrently.
struct Objective {
  BoxDomain domain;
  std::function<double(std::span<const double>, std::uint64_t)> eval;
  /// Noise-free mean, when known (benchmarks). Empty for plug-ins.
  std::function<double(std::span<const double>)> true_mean;

  std::size_t dimension() const { return domain.dimension(); }
};

double distance(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace prosrs
