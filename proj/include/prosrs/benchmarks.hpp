#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prosrs/problem.hpp"
#include "prosrs/random.hpp"

namespace prosrs {

/// Noise-free test functions in their usual literature form.
namespace functions {
double ackley(std::span<const double> x);
double alpine1(std::span<const double> x);
double griewank(std::span<const double> x);
double levy(std::span<const double> x);
double sum_of_powers(std::span<const double> x);
double six_hump_camel(std::span<const double> x);
double schaffer2(std::span<const double> x);
double dropwave(std::span<const double> x);
double goldstein_price(std::span<const double> x);
double rastrigin(std::span<const double> x);
double hartmann6(std::span<const double> x);
double power_sum4(std::span<const double> x);
}  // namespace functions

/// Test function plus additive Gaussian noise on a fixed box.
struct BenchmarkProblem {
  std::string name;
  BoxDomain domain;
  double noise_std = 0.0;
  std::function<double(std::span<const double>)> true_mean;
  std::optional<double> known_min_value;
  std::optional<Point> known_minimizer;
  /// Seed of the problem's own noise stream (see noise_stream()).
  std::uint64_t seed = 0;

  std::size_t dimension() const { return domain.dimension(); }
  Rng noise_stream() const { return make_rng(seed, Stream::Noise); }
};

/// The twelve benchmark names, in canonical order.
const std::vector<std::string>& benchmark_names();

/// Throws InvalidArgument listing the valid names for an unknown one.
BenchmarkProblem make_benchmark(std::string_view name, std::uint64_t rng_seed = 0);

/// true_mean(x) + noise_std * z with z drawn from `rng`. Throws InvalidArgument
/// for x outside the domain.
double noisy_eval(const BenchmarkProblem& problem, std::span<const double> x, Rng& rng);

/// Objective whose per-evaluation seed drives the noise.
Objective to_objective(const BenchmarkProblem& problem);

}  // namespace prosrs
