#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "prosrs/problem.hpp"
#include "prosrs/random.hpp"

namespace prosrs {

/// Multiquadric kernel sqrt(1 + r^2).
inline double multiquadric(double r) { return std::sqrt(1.0 + r * r); }

/// 1e-8, 1e-7, ..., 1e2.
std::vector<double> default_lambda_grid();

struct CrossValidationConfig {
  std::vector<double> lambda_grid = default_lambda_grid();
  std::size_t n_folds = 5;
  /// Seeds the random fold assignment.
  std::uint64_t seed = 0;
};

/// Radial basis model g(x) = sum_i c_i phi(|x~ - x~_i|) where x~ is x mapped
/// into the unit cube of the normalization box.
class RbfSurrogate {
 public:
  /// `centers` holds one center per column in unit-cube coordinates.
  RbfSurrogate(BoxDomain normalization, Eigen::MatrixXd centers, Eigen::VectorXd coefficients,
               double gamma, double lambda);

  /// Convenience constructor from centers in original coordinates.
  static RbfSurrogate from_points(BoxDomain normalization, const std::vector<Point>& centers,
                                  std::vector<double> coefficients, double gamma = 0.0,
                                  double lambda = 0.0);

  double predict(std::span<const double> x) const;
  std::vector<double> predict(const std::vector<Point>& xs) const;

  std::size_t size() const { return static_cast<std::size_t>(coefficients_.size()); }
  const Eigen::MatrixXd& centers() const { return centers_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  const BoxDomain& normalization() const { return normalization_; }

  RbfSurrogate with_coefficients(Eigen::VectorXd coefficients) const;

 private:
  double predict_unit(const Eigen::VectorXd& u) const;

  BoxDomain normalization_;
  Eigen::MatrixXd centers_;
  Eigen::VectorXd coefficients_;
  double gamma_;
  double lambda_;
};

/// Normalized responses (y - min y) / (max y - min y); all zero when y is constant.
std::vector<double> normalized_responses(std::span<const double> y);

/// exp(gamma * y_hat_j) for each response.
std::vector<double> loss_weights(std::span<const double> y, double gamma);

/// Weighted ridge loss of `model` on `data`:
/// sum_j w_j (y_j - g(x_j))^2 + lambda * sum_j c_j^2, with w from the data and model.gamma().
double weighted_ridge_loss(const RbfSurrogate& model, const EvalDataset& data);

/// Weighted, L2-regularized multiquadric regression with lambda chosen by
/// k-fold cross validation on held-out weighted squared error.
///
/// Throws InsufficientData for fewer than two records and InvalidArgument
/// when a point lies outside `domain` or gamma > 0.
RbfSurrogate fit_rbf(const EvalDataset& data, const BoxDomain& domain, double gamma,
                     const CrossValidationConfig& cv = {});

using ScalarField = std::function<double(std::span<const double>)>;

/// Monte-Carlo estimate of |model - truth|_2 / |truth|_2 over the domain.
double relative_l2_error(const ScalarField& model, const ScalarField& true_mean,
                         const BoxDomain& domain, std::size_t n_mc, Rng& rng);
double relative_l2_error(const RbfSurrogate& model, const ScalarField& true_mean,
                         const BoxDomain& domain, std::size_t n_mc, Rng& rng);

}  // namespace prosrs
