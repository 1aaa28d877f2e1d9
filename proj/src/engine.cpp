#include "prosrs/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "prosrs/doe.hpp"
#include "prosrs/srs.hpp"
#include "prosrs/surrogate.hpp"

namespace prosrs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string describe(const Point& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

double evaluate_one(const Objective& objective, const EvalRequest& req) {
  try {
    return objective.eval(req.x, req.seed);
  } catch (const EvaluatorError&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluatorError("evaluation failed at " + describe(req.x) + ": " + e.what());
  }
}

// Bookkeeping shared by both drivers: evaluation seeds, running best, logs.
class RunRecorder {
 public:
  RunRecorder(const Objective& objective, const RunConfig& config, Evaluator& evaluator,
              const IterationObserver& observer)
      : objective_(objective), evaluator_(evaluator), observer_(observer) {
    result_.config = config;
    result_.y_best = std::numeric_limits<double>::infinity();
  }

  // Barrier: returns only once every point of the batch has a value.
  std::vector<double> evaluate(const std::vector<Point>& xs, double& eval_seconds) {
    std::vector<EvalRequest> batch;
    batch.reserve(xs.size());
    for (const auto& x : xs) {
      batch.push_back({x, derive_seed(result_.config.seed, Stream::Noise, result_.n_evaluations + batch.size())});
    }
    const auto t0 = Clock::now();
    std::vector<double> ys = evaluator_.evaluate(objective_, batch);
    eval_seconds = seconds_since(t0);
    if (ys.size() != xs.size()) {
      throw EvaluatorError("evaluator returned " + std::to_string(ys.size()) + " values for a batch of " +
                           std::to_string(xs.size()));
    }
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (!std::isfinite(ys[k])) throw EvaluatorError("non-finite value at " + describe(xs[k]));
    }
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (ys[k] < result_.y_best) {
        result_.y_best = ys[k];
        result_.x_best = xs[k];
      }
    }
    result_.n_evaluations += xs.size();
    return ys;
  }

  void log(IterationLog entry) {
    entry.best_y = result_.y_best;
    entry.x_best = result_.x_best;
    result_.logs.push_back(std::move(entry));
    if (observer_) observer_(result_.logs.back());
  }

  RunResult& result() { return result_; }

 private:
  const Objective& objective_;
  Evaluator& evaluator_;
  const IterationObserver& observer_;
  RunResult result_;
};

void check_inputs(const Objective& objective, const RunConfig& config) {
  validate(config);
  if (!objective.eval) throw InvalidArgument("objective has no evaluation function");
}

std::deque<std::vector<Point>> design_batches(const BoxDomain& domain, const RunConfig& config,
                                              std::uint64_t restart_index) {
  Rng rng = make_rng(config.seed, Stream::Doe, restart_index);
  DoeDesign design = latin_hypercube_maximin(config.m_doe, domain, config.doe_restarts, rng);
  std::deque<std::vector<Point>> batches;
  for (std::size_t k = 0; k < design.points.size(); k += config.n_par) {
    const auto first = design.points.begin() + static_cast<std::ptrdiff_t>(k);
    const auto last = design.points.begin() +
                      static_cast<std::ptrdiff_t>(std::min(k + config.n_par, design.points.size()));
    batches.emplace_back(first, last);
  }
  return batches;
}

std::vector<Point> uniform_points(const BoxDomain& domain, std::size_t count, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Point> out(count, Point(domain.dimension()));
  for (auto& x : out) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = domain.lower(i) + unif(rng) * domain.side_length(i);
    x = clip_to_domain(x, domain);
  }
  return out;
}

}  // namespace

std::string_view to_string(IterationEvent event) {
  switch (event) {
    case IterationEvent::Doe: return "doe";
    case IterationEvent::Normal: return "normal";
    case IterationEvent::ZoomIn: return "zoom_in";
    case IterationEvent::ZoomOut: return "zoom_out";
    case IterationEvent::Restart: return "restart";
  }
  return "unknown";
}

std::vector<double> SerialEvaluator::evaluate(const Objective& objective, std::span<const EvalRequest> batch) {
  std::vector<double> out;
  out.reserve(batch.size());
  for (const auto& req : batch) out.push_back(evaluate_one(objective, req));
  return out;
}

ThreadedEvaluator::ThreadedEvaluator(std::size_t n_threads) : n_threads_(std::max<std::size_t>(n_threads, 1)) {}

std::vector<double> ThreadedEvaluator::evaluate(const Objective& objective, std::span<const EvalRequest> batch) {
  std::vector<double> out(batch.size(), 0.0);
  std::vector<std::exception_ptr> errors(batch.size());
  const std::size_t workers = std::min(n_threads_, batch.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < batch.size(); k += workers) {
          try {
            out[k] = evaluate_one(objective, batch[k]);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

bool is_failure(std::span<const double> proposed_y, double best_prior_y) {
  if (proposed_y.empty()) throw InvalidArgument("is_failure: empty batch");
  return *std::min_element(proposed_y.begin(), proposed_y.end()) >= best_prior_y;
}

RunResult run_prosrs(const Objective& objective, const RunConfig& config, Evaluator& evaluator,
                     const IterationObserver& observer) {
  check_inputs(objective, config);
  const BoxDomain& domain = objective.domain;
  const std::size_t d = domain.dimension();
  RunRecorder rec(objective, config, evaluator, observer);

  Rng candidate_rng = make_rng(config.seed, Stream::Candidates);
  Rng zoom_rng = make_rng(config.seed, Stream::ZoomOut);
  std::size_t proposal_round = 0;

  // Initial design, not counted against the iteration budget.
  EvalDataset design_data(d);
  for (auto& batch : design_batches(domain, config, 0)) {
    const auto t0 = Clock::now();
    IterationLog entry;
    entry.event = IterationEvent::Doe;
    entry.state = config.s_init;
    entry.values = rec.evaluate(batch, entry.eval_time_s);
    for (std::size_t k = 0; k < batch.size(); ++k) design_data.add(batch[k], entry.values[k]);
    entry.proposed = std::move(batch);
    entry.algo_time_s = std::max(0.0, seconds_since(t0) - entry.eval_time_s);
    rec.log(std::move(entry));
  }
  std::optional<ZoomTree> tree(std::in_place, domain, std::move(design_data), config);
  std::deque<std::vector<Point>> pending_design;
  EvalDataset restart_data(d);
  std::size_t deepest = 0;

  for (std::size_t it = 1; it <= config.n_iterations; ++it) {
    const auto t0 = Clock::now();
    IterationLog entry;
    entry.iteration = it;

    if (!pending_design.empty()) {
      // Post-restart design batches consume iterations.
      entry.event = IterationEvent::Doe;
      entry.state = config.s_init;
      std::vector<Point> batch = std::move(pending_design.front());
      pending_design.pop_front();
      entry.values = rec.evaluate(batch, entry.eval_time_s);
      for (std::size_t k = 0; k < batch.size(); ++k) restart_data.add(batch[k], entry.values[k]);
      entry.proposed = std::move(batch);
      if (pending_design.empty()) {
        tree.emplace(domain, std::move(restart_data), config);
        restart_data = EvalDataset(d);
      }
      entry.algo_time_s = std::max(0.0, seconds_since(t0) - entry.eval_time_s);
      rec.log(std::move(entry));
      continue;
    }

    ZoomNode& node = tree->current();
    const BoxDomain omega = node.omega;
    std::optional<RbfSurrogate> model;
    std::vector<Point> batch;
    if (node.data.size() >= 2) {
      CrossValidationConfig cv;
      cv.seed = derive_seed(config.seed, Stream::CrossValidation, it);
      model.emplace(fit_rbf(node.data, omega, node.state.gamma, cv));
      const CandidateSet candidates = generate_candidates(node.data, omega, node.state, *model,
                                                          config.n_candidates_per_dim * d, candidate_rng);
      batch = select_batch(candidates, *model, node.data.points(), weight_pattern(config.n_par, proposal_round));
    } else {
      // Too little local data for a surrogate: explore the node uniformly.
      batch = uniform_points(omega, config.n_par, candidate_rng);
    }
    ++proposal_round;
    entry.node_size = node.data.size();
    const double best_prior =
        node.data.empty() ? std::numeric_limits<double>::infinity() : node.data.min_y();

    entry.values = rec.evaluate(batch, entry.eval_time_s);
    for (std::size_t k = 0; k < batch.size(); ++k) tree->record(batch[k], entry.values[k]);
    entry.proposed = std::move(batch);

    ZoomNode& proposer = tree->current();
    update_state(proposer, effective_n(proposer.data, proposer.omega), is_failure(entry.values, best_prior),
                 config);
    entry.state = proposer.state;
    entry.event = IterationEvent::Normal;

    bool restarted = false;
    if (proposer.state.sigma < config.sigma_crit) {
      const std::size_t best_idx =
          model ? surrogate_best_index(proposer.data, *model) : proposer.data.argmin_y();
      const Point x_star = proposer.data[best_idx].x;
      ZoomNode child = tree->plan_child(x_star);
      if (restart_condition(child, domain, config)) {
        restarted = true;
        entry.event = IterationEvent::Restart;
        ++rec.result().n_restarts;
        deepest = std::max(deepest, tree->deepest_level());
        tree.reset();
        pending_design = design_batches(domain, config, rec.result().n_restarts);
      } else {
        tree->commit_child(std::move(child));
        entry.event = IterationEvent::ZoomIn;
      }
    }
    if (!restarted && tree->current().parent && tree->maybe_zoom_out(zoom_rng)) {
      entry.event = IterationEvent::ZoomOut;
    }
    if (tree) {
      entry.node_id = tree->current_id();
      entry.zoom_level = tree->current().zoom_level;
    }
    entry.algo_time_s = std::max(0.0, seconds_since(t0) - entry.eval_time_s);
    rec.log(std::move(entry));
  }
  if (tree) deepest = std::max(deepest, tree->deepest_level());
  rec.result().deepest_zoom_level = deepest;
  return std::move(rec.result());
}

RunResult run_random_search(const Objective& objective, const RunConfig& config, Evaluator& evaluator,
                            const IterationObserver& observer) {
  check_inputs(objective, config);
  RunRecorder rec(objective, config, evaluator, observer);
  Rng rng = make_rng(config.seed, Stream::RandomSearch);
  for (std::size_t it = 1; it <= config.n_iterations; ++it) {
    const auto t0 = Clock::now();
    IterationLog entry;
    entry.iteration = it;
    entry.state = config.s_init;
    std::vector<Point> batch = uniform_points(objective.domain, config.n_par, rng);
    entry.values = rec.evaluate(batch, entry.eval_time_s);
    entry.proposed = std::move(batch);
    entry.algo_time_s = std::max(0.0, seconds_since(t0) - entry.eval_time_s);
    rec.log(std::move(entry));
  }
  return std::move(rec.result());
}

}  // namespace prosrs
