#include "prosrs/benchmarks.hpp"

#include <cmath>
#include <numbers>

namespace prosrs {

namespace functions {

using std::numbers::pi;

double ackley(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double sq = 0.0, cs = 0.0;
  for (double v : x) {
    sq += v * v;
    cs += std::cos(2.0 * pi * v);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::numbers::e;
}

double alpine1(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v * std::sin(v) + 0.1 * v);
  return s;
}

double griewank(std::span<const double> x) {
  double s = 0.0, p = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += x[i] * x[i] / 4000.0;
    p *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return s - p + 1.0;
}

double levy(std::span<const double> x) {
  const std::size_t d = x.size();
  auto w = [&](std::size_t i) { return 1.0 + (x[i] - 1.0) / 4.0; };
  const double s1 = std::sin(pi * w(0));
  double f = s1 * s1;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    const double wi = w(i);
    const double s = std::sin(pi * wi + 1.0);
    f += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * s * s);
  }
  const double wd = w(d - 1);
  const double sd = std::sin(2.0 * pi * wd);
  return f + (wd - 1.0) * (wd - 1.0) * (1.0 + sd * sd);
}

double sum_of_powers(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), static_cast<double>(i + 2));
  return s;
}

double six_hump_camel(std::span<const double> x) {
  const double a = x[0], b = x[1];
  const double a2 = a * a, b2 = b * b;
  return (4.0 - 2.1 * a2 + a2 * a2 / 3.0) * a2 + a * b + (-4.0 + 4.0 * b2) * b2;
}

double schaffer2(std::span<const double> x) {
  const double a2 = x[0] * x[0], b2 = x[1] * x[1];
  const double s = std::sin(a2 - b2);
  const double den = 1.0 + 0.001 * (a2 + b2);
  return 0.5 + (s * s - 0.5) / (den * den);
}

double dropwave(std::span<const double> x) {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  return -(1.0 + std::cos(12.0 * std::sqrt(r2))) / (0.5 * r2 + 2.0);
}

double goldstein_price(std::span<const double> x) {
  const double a = x[0], b = x[1];
  const double t1 = a + b + 1.0;
  const double f1 = 1.0 + t1 * t1 * (19.0 - 14.0 * a + 3.0 * a * a - 14.0 * b + 6.0 * a * b + 3.0 * b * b);
  const double t2 = 2.0 * a - 3.0 * b;
  const double f2 = 30.0 + t2 * t2 * (18.0 - 32.0 * a + 12.0 * a * a + 48.0 * b - 36.0 * a * b + 27.0 * b * b);
  return f1 * f2;
}

double rastrigin(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * pi * v);
  return s;
}

double hartmann6(std::span<const double> x) {
  static constexpr double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static constexpr double a[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                     {0.05, 10, 17, 0.1, 8, 14},
                                     {3, 3.5, 1.7, 10, 17, 8},
                                     {17, 8, 0.05, 10, 0.1, 14}};
  static constexpr double p[4][6] = {{1312, 1696, 5569, 124, 8283, 5886},
                                     {2329, 4135, 8307, 3736, 1004, 9991},
                                     {2348, 1451, 3522, 2883, 3047, 6650},
                                     {4047, 8828, 8732, 5743, 1091, 381}};
  double f = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double t = x[static_cast<std::size_t>(j)] - 1e-4 * p[i][j];
      inner += a[i][j] * t * t;
    }
    f -= alpha[i] * std::exp(-inner);
  }
  return f;
}

double power_sum4(std::span<const double> x) {
  static constexpr double b[4] = {8, 18, 44, 114};
  double f = 0.0;
  for (int k = 1; k <= 4; ++k) {
    double s = 0.0;
    for (double v : x) s += std::pow(v, k);
    const double r = s - b[k - 1];
    f += r * r;
  }
  return f;
}

}  // namespace functions

namespace {

struct Entry {
  const char* name;
  BoxDomain domain;
  double noise;
  double (*fn)(std::span<const double>);
  std::optional<double> min_value;
  std::optional<Point> minimizer;
};

std::vector<Entry> table() {
  return {
      {"Ackley10", BoxDomain::cube(10, -32.768, 32.768), 1.0, functions::ackley, 0.0, Point(10, 0.0)},
      {"Alpine10", BoxDomain::cube(10, -10.0, 10.0), 1.0, functions::alpine1, 0.0, Point(10, 0.0)},
      {"Griewank10", BoxDomain::cube(10, -600.0, 600.0), 2.0, functions::griewank, 0.0, Point(10, 0.0)},
      {"Levy10", BoxDomain::cube(10, -10.0, 10.0), 1.0, functions::levy, 0.0, Point(10, 1.0)},
      {"SumPower10", BoxDomain::cube(10, -1.0, 1.0), 0.05, functions::sum_of_powers, 0.0, Point(10, 0.0)},
      {"SixHumpCamel2", BoxDomain({-3.0, -2.0}, {3.0, 2.0}), 0.1, functions::six_hump_camel, -1.0316284534898774, std::nullopt},
      {"Schaffer2", BoxDomain::cube(2, -100.0, 100.0), 0.02, functions::schaffer2, 0.0, Point{0.0, 0.0}},
      {"Dropwave2", BoxDomain::cube(2, -5.12, 5.12), 0.02, functions::dropwave, -1.0, Point{0.0, 0.0}},
      {"GoldsteinPrice2", BoxDomain::cube(2, -2.0, 2.0), 2.0, functions::goldstein_price, 3.0, Point{0.0, -1.0}},
      {"Rastrigin2", BoxDomain::cube(2, -5.12, 5.12), 0.5, functions::rastrigin, 0.0, Point{0.0, 0.0}},
      {"Hartmann6", BoxDomain::cube(6, 0.0, 1.0), 0.05, functions::hartmann6, -3.3223680114155147,
       Point{0.20168951265373836, 0.15001069271431358, 0.4768739727643224, 0.27533243714657185,
             0.31165161653706114, 0.6573005290552383}},
      {"PowerSum4", BoxDomain::cube(4, 0.0, 4.0), 1.0, functions::power_sum4, 0.0, Point{1.0, 2.0, 2.0, 3.0}},
  };
}

}  // namespace

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : table()) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

BenchmarkProblem make_benchmark(std::string_view name, std::uint64_t rng_seed) {
  for (const auto& e : table()) {
    if (name != e.name) continue;
    return BenchmarkProblem{.name = e.name,
                            .domain = e.domain,
                            .noise_std = e.noise,
                            .true_mean = e.fn,
                            .known_min_value = e.min_value,
                            .known_minimizer = e.minimizer,
                            .seed = rng_seed};
  }
  std::string valid;
  for (const auto& n : benchmark_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown benchmark '" + std::string(name) + "'; valid names: " + valid);
}

double noisy_eval(const BenchmarkProblem& problem, std::span<const double> x, Rng& rng) {
  if (!problem.domain.contains(x)) throw InvalidArgument(problem.name + ": point outside the domain");
  const double mean = problem.true_mean(x);
  if (problem.noise_std == 0.0) return mean;
  std::normal_distribution<double> gauss(0.0, 1.0);
  return mean + problem.noise_std * gauss(rng);
}

Objective to_objective(const BenchmarkProblem& problem) {
  return Objective{.domain = problem.domain,
                   .eval = [problem](std::span<const double> x, std::uint64_t seed) {
                     Rng rng(seed);
                     return noisy_eval(problem, x, rng);
                   },
                   .true_mean = problem.true_mean};
}

}  // namespace prosrs
