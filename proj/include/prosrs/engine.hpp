#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "prosrs/problem.hpp"
#include "prosrs/zoomtree.hpp"

namespace prosrs {

enum class IterationEvent { Doe, Normal, ZoomIn, ZoomOut, Restart };

std::string_view to_string(IterationEvent event);

struct IterationLog {
  /// 0 for batches of the initial design, 1..N afterwards.
  std::size_t iteration = 0;
  IterationEvent event = IterationEvent::Normal;
  /// Current node and its depth once the iteration's transitions are done.
  NodeId node_id = 0;
  std::size_t zoom_level = 0;
  /// State of the proposing node after the schedule update.
  ExploitState state{};
  /// Records the proposing node held when the batch was proposed.
  std::size_t node_size = 0;
  std::vector<Point> proposed;
  std::vector<double> values;
  /// Running minimum over every evaluation of the run, restarts included.
  double best_y = 0.0;
  Point x_best;
  double algo_time_s = 0.0;
  double eval_time_s = 0.0;
};

struct RunResult {
  Point x_best;
  double y_best = 0.0;
  std::vector<IterationLog> logs;
  std::size_t n_evaluations = 0;
  std::size_t n_restarts = 0;
  std::size_t deepest_zoom_level = 0;
  RunConfig config;
};

struct EvalRequest {
  Point x;
  /// Seed for the evaluation's private noise stream.
  std::uint64_t seed = 0;
};

/// Evaluates one batch and returns values in request order. Owns parallelism.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual std::vector<double> evaluate(const Objective& objective, std::span<const EvalRequest> batch) = 0;
};

class SerialEvaluator final : public Evaluator {
 public:
  std::vector<double> evaluate(const Objective& objective, std::span<const EvalRequest> batch) override;
};

/// Runs a batch on up to `n_threads` threads and joins before returning.
class ThreadedEvaluator final : public Evaluator {
 public:
  explicit ThreadedEvaluator(std::size_t n_threads);
  std::vector<double> evaluate(const Objective& objective, std::span<const EvalRequest> batch) override;

 private:
  std::size_t n_threads_;
};

/// Called after each logged iteration (also for design batches).
using IterationObserver = std::function<void(const IterationLog&)>;

/// True iff the batch does not strictly improve on the prior best.
bool is_failure(std::span<const double> proposed_y, double best_prior_y);

/// Full optimization run: Latin hypercube design, then n_iterations rounds of
/// fit, propose, evaluate, schedule update, zoom in or restart, and zoom out.
///
/// Throws EvaluatorError when the evaluator fails, returns the wrong number
/// of values, or produces a non-finite one. Iterations logged before the
/// failure have already been passed to `observer`.
RunResult run_prosrs(const Objective& objective, const RunConfig& config, Evaluator& evaluator,
                     const IterationObserver& observer = {});

/// Baseline: n_par uniform points per iteration, no initial design.
RunResult run_random_search(const Objective& objective, const RunConfig& config, Evaluator& evaluator,
                            const IterationObserver& observer = {});

}  // namespace prosrs
