#include "prosrs/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

namespace prosrs {

namespace {

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd k(a.cols(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      k(i, j) = std::sqrt(1.0 + (a.col(i) - b.col(j)).squaredNorm());
    }
  }
  return k;
}

// Solves (H + lambda I) c = rhs for symmetric positive semi-definite H.
std::optional<Eigen::VectorXd> ridge_solve(const Eigen::MatrixXd& h, const Eigen::VectorXd& rhs,
                                           double lambda) {
  Eigen::MatrixXd m = h;
  m.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXd c = llt.solve(rhs);
    if (c.allFinite()) return c;
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() == Eigen::Success) {
    Eigen::VectorXd c = ldlt.solve(rhs);
    if (c.allFinite()) return c;
  }
  return std::nullopt;
}

// Normal equations of the weighted ridge problem for centers = rows.
struct NormalEquations {
  Eigen::MatrixXd h;
  Eigen::VectorXd rhs;
};

NormalEquations normal_equations(const Eigen::MatrixXd& phi, const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& y) {
  const Eigen::VectorXd sw = w.array().sqrt();
  const Eigen::MatrixXd a = sw.asDiagonal() * phi;
  NormalEquations ne;
  ne.h = Eigen::MatrixXd::Zero(phi.cols(), phi.cols());
  ne.h.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  ne.h.triangularView<Eigen::StrictlyUpper>() = ne.h.transpose();
  ne.rhs = phi.transpose() * (w.array() * y.array()).matrix();
  return ne;
}

Eigen::MatrixXd select_block(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows,
                             const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
    }
  }
  return out;
}

Eigen::VectorXd select_rows(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Eigen::Index>(k)) = v(idx[k]);
  return out;
}

}  // namespace

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int e = -8; e <= 2; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

RbfSurrogate::RbfSurrogate(BoxDomain normalization, Eigen::MatrixXd centers,
                           Eigen::VectorXd coefficients, double gamma, double lambda)
    : normalization_(std::move(normalization)),
      centers_(std::move(centers)),
      coefficients_(std::move(coefficients)),
      gamma_(gamma),
      lambda_(lambda) {
  if (centers_.cols() != coefficients_.size()) {
    throw InvalidArgument("RbfSurrogate: one coefficient per center required");
  }
  if (centers_.cols() > 0 && centers_.rows() != static_cast<Eigen::Index>(normalization_.dimension())) {
    throw InvalidArgument("RbfSurrogate: center dimension does not match normalization box");
  }
  if (gamma_ > 0.0) throw InvalidArgument("RbfSurrogate: gamma must be non-positive");
  if (lambda_ < 0.0) throw InvalidArgument("RbfSurrogate: lambda must be non-negative");
}

RbfSurrogate RbfSurrogate::from_points(BoxDomain normalization, const std::vector<Point>& centers,
                                       std::vector<double> coefficients, double gamma,
                                       double lambda) {
  const auto d = static_cast<Eigen::Index>(normalization.dimension());
  Eigen::MatrixXd c(d, static_cast<Eigen::Index>(centers.size()));
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const Point u = normalization.to_unit(centers[j]);
    for (Eigen::Index i = 0; i < d; ++i) c(i, static_cast<Eigen::Index>(j)) = u[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd coef = Eigen::Map<const Eigen::VectorXd>(coefficients.data(),
                                                           static_cast<Eigen::Index>(coefficients.size()));
  return RbfSurrogate(std::move(normalization), std::move(c), std::move(coef), gamma, lambda);
}

double RbfSurrogate::predict_unit(const Eigen::VectorXd& u) const {
  double g = 0.0;
  for (Eigen::Index j = 0; j < centers_.cols(); ++j) {
    g += coefficients_(j) * std::sqrt(1.0 + (centers_.col(j) - u).squaredNorm());
  }
  return g;
}

double RbfSurrogate::predict(std::span<const double> x) const {
  if (x.size() != normalization_.dimension()) {
    throw InvalidArgument("RbfSurrogate::predict: dimension mismatch");
  }
  const Point u = normalization_.to_unit(x);
  return predict_unit(Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size())));
}

std::vector<double> RbfSurrogate::predict(const std::vector<Point>& xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(predict(x));
  return out;
}

RbfSurrogate RbfSurrogate::with_coefficients(Eigen::VectorXd coefficients) const {
  return RbfSurrogate(normalization_, centers_, std::move(coefficients), gamma_, lambda_);
}

std::vector<double> normalized_responses(std::span<const double> y) {
  std::vector<double> out(y.size(), 0.0);
  if (y.empty()) return out;
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double range = *hi - *lo;
  if (range > 0.0) {
    for (std::size_t j = 0; j < y.size(); ++j) out[j] = (y[j] - *lo) / range;
  }
  return out;
}

std::vector<double> loss_weights(std::span<const double> y, double gamma) {
  std::vector<double> w = normalized_responses(y);
  for (double& v : w) v = std::exp(gamma * v);
  return w;
}

double weighted_ridge_loss(const RbfSurrogate& model, const EvalDataset& data) {
  const std::vector<double> y = data.values();
  const std::vector<double> w = loss_weights(y, model.gamma());
  double loss = 0.0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    const double r = y[j] - model.predict(data[j].x);
    loss += w[j] * r * r;
  }
  return loss + model.lambda() * model.coefficients().squaredNorm();
}

RbfSurrogate fit_rbf(const EvalDataset& data, const BoxDomain& domain, double gamma,
                     const CrossValidationConfig& cv) {
  const std::size_t n = data.size();
  if (n < 2) {
    throw InsufficientData("fit_rbf: need at least 2 evaluations, got " + std::to_string(n));
  }
  if (gamma > 0.0) throw InvalidArgument("fit_rbf: gamma must be non-positive");
  if (data.dimension() != domain.dimension()) throw InvalidArgument("fit_rbf: dimension mismatch");

  const auto nn = static_cast<Eigen::Index>(n);
  const auto d = static_cast<Eigen::Index>(domain.dimension());
  Eigen::MatrixXd u(d, nn);
  Eigen::VectorXd y(nn);
  for (std::size_t j = 0; j < n; ++j) {
    if (!domain.contains(data[j].x)) throw InvalidArgument("fit_rbf: data point outside domain");
    const Point uj = domain.to_unit(data[j].x);
    for (Eigen::Index i = 0; i < d; ++i) u(i, static_cast<Eigen::Index>(j)) = uj[static_cast<std::size_t>(i)];
    y(static_cast<Eigen::Index>(j)) = data[j].y;
  }
  const std::vector<double> wv = loss_weights(std::span<const double>(y.data(), n), gamma);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(wv.data(), nn);
  const Eigen::MatrixXd phi = kernel_matrix(u, u);

  const std::vector<double>& grid = cv.lambda_grid;
  double chosen = 0.0;
  if (grid.size() == 1) {
    chosen = grid.front();
  } else if (grid.size() > 1) {
    const std::size_t k = std::clamp<std::size_t>(cv.n_folds, 2, n);
    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Rng rng(cv.seed);
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<double> cv_error(grid.size(), 0.0);
    std::vector<bool> usable(grid.size(), true);
    for (std::size_t fold = 0; fold < k; ++fold) {
      std::vector<Eigen::Index> train, test;
      for (std::size_t pos = 0; pos < n; ++pos) (pos % k == fold ? test : train).push_back(perm[pos]);
      const Eigen::MatrixXd phi_train = select_block(phi, train, train);
      const Eigen::MatrixXd phi_test = select_block(phi, test, train);
      const Eigen::VectorXd w_train = select_rows(w, train);
      const Eigen::VectorXd w_test = select_rows(w, test);
      const Eigen::VectorXd y_test = select_rows(y, test);
      const NormalEquations ne = normal_equations(phi_train, w_train, select_rows(y, train));
      for (std::size_t l = 0; l < grid.size(); ++l) {
        if (!usable[l]) continue;
        const auto c = ridge_solve(ne.h, ne.rhs, grid[l]);
        if (!c) {
          usable[l] = false;
          continue;
        }
        const Eigen::VectorXd resid = y_test - phi_test * (*c);
        cv_error[l] += (w_test.array() * resid.array().square()).sum();
      }
    }
    std::optional<std::size_t> best;
    for (std::size_t l = 0; l < grid.size(); ++l) {
      if (!usable[l] || !std::isfinite(cv_error[l])) continue;
      if (!best || cv_error[l] < cv_error[*best]) best = l;
    }
    if (!best) throw DegenerateError("fit_rbf: ridge system singular for every lambda on the grid");
    chosen = grid[*best];
  }

  const NormalEquations ne = normal_equations(phi, w, y);
  auto c = ridge_solve(ne.h, ne.rhs, chosen);
  if (!c) throw DegenerateError("fit_rbf: final ridge system is singular");
  return RbfSurrogate(domain, std::move(u), std::move(*c), gamma, chosen);
}

double relative_l2_error(const ScalarField& model, const ScalarField& true_mean,
                         const BoxDomain& domain, std::size_t n_mc, Rng& rng) {
  if (n_mc == 0) throw InvalidArgument("relative_l2_error: n_mc must be positive");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Point u(domain.dimension());
  double num = 0.0, den = 0.0;
  for (std::size_t s = 0; s < n_mc; ++s) {
    for (double& v : u) v = unif(rng);
    const Point x = domain.from_unit(u);
    const double f = true_mean(x);
    const double diff = model(x) - f;
    num += diff * diff;
    den += f * f;
  }
  if (!(den > 0.0)) throw DegenerateError("relative_l2_error: reference norm is zero");
  return std::sqrt(num / den);
}

double relative_l2_error(const RbfSurrogate& model, const ScalarField& true_mean,
                         const BoxDomain& domain, std::size_t n_mc, Rng& rng) {
  return relative_l2_error([&model](std::span<const double> x) { return model.predict(x); },
                           true_mean, domain, n_mc, rng);
}

}  // namespace prosrs
