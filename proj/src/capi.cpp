#include "prosrs/prosrs.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "prosrs/benchmarks.hpp"
#include "prosrs/engine.hpp"
#include "prosrs/errors.hpp"
#include "prosrs/experiments.hpp"

struct prosrs_config {
  prosrs::RunConfig config;
};

struct prosrs_objective {
  std::string name;
  prosrs::Objective objective;
};

struct prosrs_result {
  prosrs::RunResult result;
  std::size_t dim = 0;
};

struct prosrs_experiment {
  prosrs::ExperimentSpec spec;
  nlohmann::json summary;
};

namespace {

thread_local std::string last_error;

prosrs_status fail(prosrs_status code, const std::string& message) {
  last_error = message;
  return code;
}

template <typename F>
prosrs_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return PROSRS_OK;
  } catch (const prosrs::ConfigError& e) {
    return fail(PROSRS_ERR_CONFIG, e.what());
  } catch (const prosrs::EvaluatorError& e) {
    return fail(PROSRS_ERR_EVALUATOR, e.what());
  } catch (const prosrs::InsufficientData& e) {
    return fail(PROSRS_ERR_INSUFFICIENT_DATA, e.what());
  } catch (const prosrs::InvalidArgument& e) {
    return fail(PROSRS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(PROSRS_ERR_CONFIG, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(PROSRS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PROSRS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PROSRS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PROSRS_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw prosrs::InvalidArgument(what);
}

double* real_field(prosrs::RunConfig& c, const std::string& key) {
  if (key == "sigma_crit") return &c.sigma_crit;
  if (key == "beta_init") return &c.beta_init;
  if (key == "beta_min") return &c.beta_min;
  if (key == "rho") return &c.rho;
  if (key == "r_resolution") return &c.r_resolution;
  if (key == "delta_gamma") return &c.delta_gamma;
  if (key == "s_init.gamma") return &c.s_init.gamma;
  if (key == "s_init.p") return &c.s_init.p;
  if (key == "s_init.sigma") return &c.s_init.sigma;
  throw prosrs::ConfigError("unknown real configuration field '" + key + "'");
}

std::size_t* count_field(prosrs::RunConfig& c, const std::string& key) {
  if (key == "n_par") return &c.n_par;
  if (key == "n_iterations") return &c.n_iterations;
  if (key == "m_doe") return &c.m_doe;
  if (key == "c_fail") return &c.c_fail;
  if (key == "n_candidates_per_dim") return &c.n_candidates_per_dim;
  if (key == "doe_restarts") return &c.doe_restarts;
  throw prosrs::ConfigError("unknown integer configuration field '" + key + "'");
}

void copy_out(const std::string& text, char* buffer, std::size_t capacity, std::size_t* needed) {
  if (needed) *needed = text.size() + 1;
  require(buffer != nullptr && capacity >= text.size() + 1, "buffer too small");
  std::memcpy(buffer, text.data(), text.size() + 1);
}

const prosrs::IterationLog& log_at(const prosrs_result* r, std::size_t index) {
  require(r != nullptr, "null result");
  require(index < r->result.logs.size(), "log index out of range");
  return r->result.logs[index];
}

}  // namespace

extern "C" {

const char* prosrs_last_error(void) { return last_error.c_str(); }

const char* prosrs_version(void) { return "1.0.0"; }

prosrs_status prosrs_config_create_default(size_t dim, size_t n_par, prosrs_config** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = nullptr;
    auto c = std::make_unique<prosrs_config>();
    c->config = prosrs::default_config(dim, n_par);
    *out = c.release();
  });
}

void prosrs_config_destroy(prosrs_config* config) { delete config; }

prosrs_status prosrs_config_set_real(prosrs_config* config, const char* key, double value) {
  return guarded([&] {
    require(config != nullptr && key != nullptr, "null argument");
    prosrs::RunConfig next = config->config;
    *real_field(next, key) = value;
    prosrs::validate(next);
    config->config = next;
  });
}

prosrs_status prosrs_config_get_real(const prosrs_config* config, const char* key, double* value) {
  return guarded([&] {
    require(config != nullptr && key != nullptr && value != nullptr, "null argument");
    prosrs::RunConfig copy = config->config;
    *value = *real_field(copy, key);
  });
}

prosrs_status prosrs_config_set_uint(prosrs_config* config, const char* key, uint64_t value) {
  return guarded([&] {
    require(config != nullptr && key != nullptr, "null argument");
    prosrs::RunConfig next = config->config;
    if (std::strcmp(key, "seed") == 0) {
      next.seed = value;
    } else {
      *count_field(next, key) = static_cast<std::size_t>(value);
    }
    prosrs::validate(next);
    config->config = next;
  });
}

prosrs_status prosrs_config_get_uint(const prosrs_config* config, const char* key, uint64_t* value) {
  return guarded([&] {
    require(config != nullptr && key != nullptr && value != nullptr, "null argument");
    prosrs::RunConfig copy = config->config;
    *value = std::strcmp(key, "seed") == 0 ? copy.seed : *count_field(copy, key);
  });
}

prosrs_status prosrs_config_apply_json(prosrs_config* config, const char* json) {
  return guarded([&] {
    require(config != nullptr && json != nullptr, "null argument");
    const auto doc = nlohmann::json::parse(json);
    prosrs::RunConfig next = config->config;
    prosrs::apply_overrides(next, doc);
    config->config = next;
  });
}

prosrs_status prosrs_config_to_json(const prosrs_config* config, char* buffer, size_t capacity, size_t* needed) {
  return guarded([&] {
    require(config != nullptr, "null config");
    copy_out(prosrs::to_json(config->config).dump(), buffer, capacity, needed);
  });
}

prosrs_status prosrs_objective_benchmark(const char* name, prosrs_objective** out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    auto o = std::make_unique<prosrs_objective>(
        prosrs_objective{name, prosrs::to_objective(prosrs::make_benchmark(name))});
    *out = o.release();
  });
}

prosrs_status prosrs_objective_callback(size_t dim, const double* lower, const double* upper, prosrs_eval_fn eval,
                                        void* user, prosrs_objective** out) {
  return guarded([&] {
    require(out != nullptr && lower != nullptr && upper != nullptr && eval != nullptr, "null argument");
    *out = nullptr;
    require(dim > 0, "dimension must be positive");
    prosrs::BoxDomain domain(std::vector<double>(lower, lower + dim), std::vector<double>(upper, upper + dim));
    prosrs::Objective obj{.domain = domain,
                          .eval = [eval, user](std::span<const double> x, std::uint64_t seed) {
                            double y = 0.0;
                            const int rc = eval(x.data(), x.size(), seed, &y, user);
                            if (rc != 0) {
                              throw prosrs::EvaluatorError("objective callback returned " + std::to_string(rc));
                            }
                            return y;
                          },
                          .true_mean = {}};
    *out = new prosrs_objective{"callback", std::move(obj)};
  });
}

prosrs_status prosrs_objective_set_true_mean(prosrs_objective* objective, prosrs_mean_fn mean, void* user) {
  return guarded([&] {
    require(objective != nullptr, "null objective");
    if (mean == nullptr) {
      objective->objective.true_mean = {};
      return;
    }
    objective->objective.true_mean = [mean, user](std::span<const double> x) {
      double y = 0.0;
      if (mean(x.data(), x.size(), &y, user) != 0) throw prosrs::EvaluatorError("true-mean callback failed");
      return y;
    };
  });
}

prosrs_status prosrs_objective_dimension(const prosrs_objective* objective, size_t* dim) {
  return guarded([&] {
    require(objective != nullptr && dim != nullptr, "null argument");
    *dim = objective->objective.dimension();
  });
}

prosrs_status prosrs_objective_bounds(const prosrs_objective* objective, double* lower, double* upper) {
  return guarded([&] {
    require(objective != nullptr && lower != nullptr && upper != nullptr, "null argument");
    const auto& dom = objective->objective.domain;
    for (std::size_t i = 0; i < dom.dimension(); ++i) {
      lower[i] = dom.lower(i);
      upper[i] = dom.upper(i);
    }
  });
}

prosrs_status prosrs_objective_evaluate(const prosrs_objective* objective, const double* x, uint64_t seed,
                                        double* y) {
  return guarded([&] {
    require(objective != nullptr && x != nullptr && y != nullptr, "null argument");
    *y = objective->objective.eval(std::span<const double>(x, objective->objective.dimension()), seed);
  });
}

prosrs_status prosrs_objective_true_mean(const prosrs_objective* objective, const double* x, double* y) {
  return guarded([&] {
    require(objective != nullptr && x != nullptr && y != nullptr, "null argument");
    require(static_cast<bool>(objective->objective.true_mean), "objective has no known mean");
    *y = objective->objective.true_mean(std::span<const double>(x, objective->objective.dimension()));
  });
}

void prosrs_objective_destroy(prosrs_objective* objective) { delete objective; }

prosrs_status prosrs_run(const prosrs_objective* objective, const prosrs_config* config, const char* algo,
                         size_t n_threads, prosrs_result** out) {
  return guarded([&] {
    require(objective != nullptr && config != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const prosrs::Algorithm a = prosrs::parse_algorithm(algo ? algo : "prosrs");
    std::unique_ptr<prosrs::Evaluator> evaluator;
    if (n_threads > 1) {
      evaluator = std::make_unique<prosrs::ThreadedEvaluator>(n_threads);
    } else {
      evaluator = std::make_unique<prosrs::SerialEvaluator>();
    }
    auto r = std::make_unique<prosrs_result>();
    r->dim = objective->objective.dimension();
    r->result = a == prosrs::Algorithm::ProSRS
                    ? prosrs::run_prosrs(objective->objective, config->config, *evaluator)
                    : prosrs::run_random_search(objective->objective, config->config, *evaluator);
    *out = r.release();
  });
}

void prosrs_result_destroy(prosrs_result* result) { delete result; }

prosrs_status prosrs_result_best(const prosrs_result* result, double* x_best, double* y_best) {
  return guarded([&] {
    require(result != nullptr, "null result");
    if (x_best) std::copy(result->result.x_best.begin(), result->result.x_best.end(), x_best);
    if (y_best) *y_best = result->result.y_best;
  });
}

size_t prosrs_result_n_logs(const prosrs_result* result) { return result ? result->result.logs.size() : 0; }

size_t prosrs_result_n_evaluations(const prosrs_result* result) {
  return result ? result->result.n_evaluations : 0;
}

size_t prosrs_result_n_restarts(const prosrs_result* result) { return result ? result->result.n_restarts : 0; }

size_t prosrs_result_deepest_zoom_level(const prosrs_result* result) {
  return result ? result->result.deepest_zoom_level : 0;
}

prosrs_status prosrs_result_log(const prosrs_result* result, size_t index, prosrs_log_record* record) {
  return guarded([&] {
    require(record != nullptr, "null record");
    const auto& log = log_at(result, index);
    record->iteration = log.iteration;
    record->event = prosrs::to_string(log.event).data();
    record->node_id = log.node_id;
    record->zoom_level = log.zoom_level;
    record->node_size = log.node_size;
    record->gamma = log.state.gamma;
    record->p = log.state.p;
    record->sigma = log.state.sigma;
    record->batch_size = log.proposed.size();
    record->best_y = log.best_y;
    record->algo_time_s = log.algo_time_s;
    record->eval_time_s = log.eval_time_s;
  });
}

prosrs_status prosrs_result_log_batch(const prosrs_result* result, size_t index, double* points, double* values) {
  return guarded([&] {
    const auto& log = log_at(result, index);
    if (points) {
      for (std::size_t k = 0; k < log.proposed.size(); ++k) {
        std::copy(log.proposed[k].begin(), log.proposed[k].end(), points + k * result->dim);
      }
    }
    if (values) std::copy(log.values.begin(), log.values.end(), values);
  });
}

prosrs_status prosrs_result_log_x_best(const prosrs_result* result, size_t index, double* x_best) {
  return guarded([&] {
    require(x_best != nullptr, "null output");
    const auto& log = log_at(result, index);
    std::copy(log.x_best.begin(), log.x_best.end(), x_best);
  });
}

prosrs_status prosrs_experiment_create(const char* spec_json, prosrs_experiment** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = nullptr;
    const auto doc = spec_json ? nlohmann::json::parse(spec_json) : nlohmann::json::object();
    auto e = std::make_unique<prosrs_experiment>();
    e->spec = prosrs::parse_spec(doc);
    *out = e.release();
  });
}

prosrs_status prosrs_experiment_add_objective(prosrs_experiment* experiment, const char* name,
                                              const prosrs_objective* objective) {
  return guarded([&] {
    require(experiment != nullptr && objective != nullptr, "null argument");
    experiment->spec.problems.push_back({name ? name : objective->name, objective->objective});
  });
}

prosrs_status prosrs_experiment_run(prosrs_experiment* experiment) {
  return guarded([&] {
    require(experiment != nullptr, "null experiment");
    experiment->summary = prosrs::run_experiment(experiment->spec);
  });
}

prosrs_status prosrs_experiment_summary_json(const prosrs_experiment* experiment, char* buffer, size_t capacity,
                                             size_t* needed) {
  return guarded([&] {
    require(experiment != nullptr, "null experiment");
    copy_out(experiment->summary.dump(2), buffer, capacity, needed);
  });
}

void prosrs_experiment_destroy(prosrs_experiment* experiment) { delete experiment; }

}  // extern "C"
