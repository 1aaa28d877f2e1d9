#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "prosrs/benchmarks.hpp"
#include "prosrs/engine.hpp"

using namespace prosrs;

namespace {

Objective sphere(std::size_t d, double noise = 0.0) {
  return Objective{.domain = BoxDomain::cube(d, -1.0, 1.0),
                   .eval =
                       [noise](std::span<const double> x, std::uint64_t seed) {
                         double s = 0.0;
                         for (double v : x) s += v * v;
                         if (noise > 0.0) {
                           Rng rng(seed);
                           s += noise * std::normal_distribution<double>(0.0, 1.0)(rng);
                         }
                         return s;
                       },
                   .true_mean = {}};
}

RunConfig small_config(std::size_t d, std::size_t n_par, std::size_t n_iter, std::uint64_t seed) {
  RunConfig c = default_config(d, n_par);
  c.n_iterations = n_iter;
  c.seed = seed;
  c.n_candidates_per_dim = 200;
  c.doe_restarts = 20;
  return c;
}

bool same_logs(const RunResult& a, const RunResult& b) {
  if (a.logs.size() != b.logs.size()) return false;
  for (std::size_t k = 0; k < a.logs.size(); ++k) {
    const auto& x = a.logs[k];
    const auto& y = b.logs[k];
    if (x.iteration != y.iteration || x.event != y.event || x.node_id != y.node_id ||
        x.zoom_level != y.zoom_level || !(x.state == y.state) || x.node_size != y.node_size ||
        x.proposed != y.proposed || x.values != y.values || x.best_y != y.best_y || x.x_best != y.x_best) {
      return false;
    }
  }
  return a.x_best == b.x_best && a.y_best == b.y_best && a.n_evaluations == b.n_evaluations;
}

// Records every batch it sees.
class RecordingEvaluator final : public Evaluator {
 public:
  std::vector<double> evaluate(const Objective& objective, std::span<const EvalRequest> batch) override {
    ++calls;
    sizes.push_back(batch.size());
    return SerialEvaluator().evaluate(objective, batch);
  }
  std::size_t calls = 0;
  std::vector<std::size_t> sizes;
};

class ShortEvaluator final : public Evaluator {
 public:
  std::vector<double> evaluate(const Objective&, std::span<const EvalRequest> batch) override {
    return std::vector<double>(batch.size() - 1, 0.0);
  }
};

}  // namespace

TEST_CASE("is_failure") {
  CHECK_FALSE(is_failure(std::vector<double>{3.0, 5.0}, 4.0));
  CHECK(is_failure(std::vector<double>{4.0, 5.0}, 4.0));
  CHECK(is_failure(std::vector<double>{10.0}, -1.0));
  CHECK_FALSE(is_failure(std::vector<double>{0.0}, std::numeric_limits<double>::infinity()));
  CHECK_THROWS_AS(is_failure(std::vector<double>{}, 0.0), InvalidArgument);
}

TEST_CASE("zero iterations evaluate the design only") {
  SerialEvaluator ev;
  RunConfig c = small_config(2, 4, 0, 3);
  const RunResult r = run_prosrs(sphere(2), c, ev);
  CHECK(r.n_evaluations == c.m_doe);
  REQUIRE(r.logs.size() == 1);
  CHECK(r.logs[0].event == IterationEvent::Doe);
  CHECK(r.logs[0].iteration == 0);
  const auto& vals = r.logs[0].values;
  const auto k = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  CHECK(r.y_best == vals[k]);
  CHECK(r.x_best == r.logs[0].proposed[k]);
}

TEST_CASE("noiseless sphere is solved") {
  // The grid minimum of |x|^2 on [-1,1]^2 is 0 at the origin, a grid node.
  double grid_min = std::numeric_limits<double>::infinity();
  for (int a = -20; a <= 20; ++a) {
    for (int b = -20; b <= 20; ++b) grid_min = std::min(grid_min, (a * a + b * b) / 400.0);
  }
  REQUIRE(grid_min == 0.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SerialEvaluator ev;
    RunConfig c = default_config(2, 4);
    c.n_iterations = 30;
    c.seed = seed;
    const RunResult r = run_prosrs(sphere(2), c, ev);
    CAPTURE(seed);
    CHECK(r.y_best <= grid_min + 0.01);
  }
}

TEST_CASE("runs are reproducible and independent of the evaluator threading") {
  const Objective f = sphere(3, 0.05);
  const RunConfig c = small_config(3, 4, 25, 11);
  SerialEvaluator s1, s2;
  ThreadedEvaluator t(4);
  const RunResult a = run_prosrs(f, c, s1);
  const RunResult b = run_prosrs(f, c, s2);
  const RunResult p = run_prosrs(f, c, t);
  CHECK(same_logs(a, b));
  CHECK(same_logs(a, p));
  RunConfig other = c;
  other.seed = 12;
  CHECK_FALSE(same_logs(a, run_prosrs(f, other, s1)));
}

TEST_CASE("log invariants over a run with restarts") {
  const Objective f = sphere(2, 0.01);
  RunConfig c = small_config(2, 2, 120, 5);
  c.r_resolution = 0.2;  // restarts come early
  RecordingEvaluator ev;
  const RunResult r = run_prosrs(f, c, ev);
  REQUIRE(r.n_restarts > 0);

  // One evaluator call per logged batch, each a full batch.
  CHECK(ev.calls == r.logs.size());
  for (std::size_t s : ev.sizes) CHECK(s == c.n_par);
  CHECK(r.n_evaluations == c.m_doe + c.n_par * c.n_iterations);

  std::size_t doe_iterations = 0;
  double prev_best = std::numeric_limits<double>::infinity();
  double true_best = std::numeric_limits<double>::infinity();
  Point true_x;
  std::size_t prev_level = 0;
  bool after_restart = false;
  for (const auto& log : r.logs) {
    CHECK(log.proposed.size() == log.values.size());
    for (std::size_t k = 0; k < log.values.size(); ++k) {
      if (log.values[k] < true_best) {
        true_best = log.values[k];
        true_x = log.proposed[k];
      }
    }
    CHECK(log.best_y == true_best);
    CHECK(log.x_best == true_x);
    CHECK(log.best_y <= prev_best);
    prev_best = log.best_y;
    CHECK(log.zoom_level <= 6);
    if (log.iteration > 0 && log.event == IterationEvent::Doe) ++doe_iterations;

    switch (log.event) {
      case IterationEvent::Normal:
        CHECK(log.zoom_level == prev_level);
        CHECK(log.state.sigma >= c.sigma_crit);
        break;
      case IterationEvent::ZoomIn:
        CHECK(log.zoom_level == prev_level + 1);
        CHECK(log.state.sigma < c.sigma_crit);
        break;
      case IterationEvent::ZoomOut:
        CHECK((log.zoom_level + 1 == prev_level || log.zoom_level == prev_level));
        break;
      case IterationEvent::Restart:
        CHECK(log.state.sigma < c.sigma_crit);
        after_restart = true;
        break;
      case IterationEvent::Doe:
        CHECK(log.zoom_level == 0);
        break;
    }
    // First proposal after a restart design sees only the new design.
    if (after_restart && log.event != IterationEvent::Restart && log.event != IterationEvent::Doe) {
      CHECK(log.node_size == c.m_doe);
      CHECK(log.zoom_level == 0);
      after_restart = false;
    }
    prev_level = log.zoom_level;
  }
  CHECK(r.x_best == true_x);
  CHECK(r.y_best == true_best);
  // With complete restart designs the count also splits by restarts.
  const std::size_t design_batches = c.m_doe / c.n_par;
  if (doe_iterations == r.n_restarts * design_batches) {
    CHECK(r.n_evaluations == c.m_doe * (1 + r.n_restarts) + c.n_par * (c.n_iterations - doe_iterations));
  }
}

TEST_CASE("sigma triggers zoom-in only after the third halving") {
  const Objective f = sphere(2, 0.0);
  RunConfig c = small_config(2, 4, 80, 2);
  SerialEvaluator ev;
  const RunResult r = run_prosrs(f, c, ev);
  bool zoomed = false;
  for (const auto& log : r.logs) {
    if (log.event == IterationEvent::ZoomIn || log.event == IterationEvent::Restart) {
      CHECK(log.state.sigma == 0.0125);
      zoomed = true;
    }
  }
  CHECK(zoomed);
}

TEST_CASE("evaluator failures are fatal and leave earlier logs with the observer") {
  int calls = 0;
  Objective bad{.domain = BoxDomain::cube(1, 0.0, 1.0),
                .eval = [&calls](std::span<const double>, std::uint64_t) {
                  return ++calls > 8 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
                },
                .true_mean = {}};
  RunConfig c = small_config(1, 2, 10, 0);
  std::size_t seen = 0;
  SerialEvaluator ev;
  CHECK_THROWS_AS(run_prosrs(bad, c, ev, [&](const IterationLog&) { ++seen; }), EvaluatorError);
  CHECK(seen == 4);  // two design batches and two iterations

  ShortEvaluator short_ev;
  CHECK_THROWS_AS(run_prosrs(sphere(1), c, short_ev), EvaluatorError);
  CHECK_THROWS_AS(run_random_search(sphere(1), c, short_ev), EvaluatorError);

  Objective throws{.domain = BoxDomain::cube(1, 0.0, 1.0),
                   .eval = [](std::span<const double>, std::uint64_t) -> double { throw std::runtime_error("boom"); },
                   .true_mean = {}};
  ThreadedEvaluator t(2);
  CHECK_THROWS_AS(run_prosrs(throws, c, t), EvaluatorError);
}

TEST_CASE("random search") {
  const Objective f = sphere(2);
  RunConfig c = small_config(2, 3, 7, 4);
  SerialEvaluator ev;
  const RunResult a = run_random_search(f, c, ev);
  CHECK(a.n_evaluations == 21);
  CHECK(a.logs.size() == 7);
  CHECK(same_logs(a, run_random_search(f, c, ev)));
  for (const auto& log : a.logs) {
    CHECK(log.proposed.size() == 3);
    for (const auto& x : log.proposed) CHECK(f.domain.contains(x));
  }

  // On f(x) = x over [0,1], 1000 uniform draws leave y_best < 0.01 except
  // with probability 0.99^1000 ~ 4e-5.
  const Objective line{.domain = BoxDomain::cube(1, 0.0, 1.0),
                       .eval = [](std::span<const double> x, std::uint64_t) { return x[0]; },
                       .true_mean = {}};
  int hits = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    RunConfig lc = default_config(1, 1);
    lc.n_iterations = 1000;
    lc.seed = static_cast<std::uint64_t>(s);
    if (run_random_search(line, lc, ev).y_best < 0.01) ++hits;
  }
  CHECK(static_cast<double>(hits) / seeds >= 0.99);
}

TEST_CASE("invalid inputs") {
  SerialEvaluator ev;
  RunConfig c = small_config(2, 2, 3, 0);
  c.rho = 1.5;
  CHECK_THROWS_AS(run_prosrs(sphere(2), c, ev), ConfigError);
  Objective empty{.domain = BoxDomain::cube(1, 0.0, 1.0), .eval = {}, .true_mean = {}};
  CHECK_THROWS_AS(run_prosrs(empty, small_config(1, 1, 1, 0), ev), InvalidArgument);
}
