#include "prosrs/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>
#include <set>

#include "prosrs/benchmarks.hpp"
#include "prosrs/doe.hpp"
#include "prosrs/surrogate.hpp"

namespace prosrs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string>& experiment_keys() {
  static const std::set<std::string> keys = {"command", "problem", "algo", "iterations", "repeats", "out",
                                             "deterministic", "threads", "model_error", "plugin", "n_par",
                                             "n_iterations", "seed"};
  return keys;
}

const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys = {"n_par", "n_iterations", "m_doe", "s_init", "sigma_crit",
                                             "beta_init", "beta_min", "rho", "r_resolution", "c_fail",
                                             "delta_gamma", "n_candidates_per_dim", "doe_restarts", "seed"};
  return keys;
}

template <typename T>
T get_as(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::size_t get_count(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::unique_ptr<Evaluator> make_evaluator(std::size_t threads) {
  if (threads > 1) return std::make_unique<ThreadedEvaluator>(threads);
  return std::make_unique<SerialEvaluator>();
}

std::string run_stem(const std::string& problem, Algorithm algo) {
  return problem + "_" + std::string(to_string(algo));
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

struct ProblemRuns {
  // objective column per log row, one vector per repeat
  std::vector<std::vector<double>> curves;
  std::vector<std::size_t> iterations;
  std::vector<double> final_values;
  std::vector<double> ratios;
};

RunResult run_one(const ExperimentSpec& spec, const ProblemEntry& entry, Algorithm algo, const RunConfig& config,
                  const IterationObserver& observer) {
  auto evaluator = make_evaluator(spec.threads);
  return algo == Algorithm::ProSRS ? run_prosrs(entry.objective, config, *evaluator, observer)
                                   : run_random_search(entry.objective, config, *evaluator, observer);
}

ProblemRuns optimize_problem(const ExperimentSpec& spec, const ProblemEntry& entry) {
  const std::string stem = run_stem(entry.name, spec.algo);
  ProblemRuns runs;
  for (std::size_t r = 0; r < spec.repeats; ++r) {
    const RunConfig config = make_run_config(spec, entry.objective, r);
    const std::string run_name = stem + "_run" + std::to_string(r);
    RunCsvWriter writer(spec.out_dir / (run_name + ".csv"), entry.objective, spec.deterministic);
    const RunResult result =
        run_one(spec, entry, spec.algo, config, [&writer](const IterationLog& log) { writer.write(log); });
    json summary = run_summary(result, entry.objective, entry.name, spec.algo);
    write_json(spec.out_dir / (run_name + "_summary.json"), summary);

    std::vector<double> curve;
    for (const auto& log : result.logs) curve.push_back(objective_value(entry.objective, log));
    if (r == 0) {
      for (const auto& log : result.logs) runs.iterations.push_back(log.iteration);
    }
    runs.final_values.push_back(curve.empty() ? std::numeric_limits<double>::quiet_NaN() : curve.back());
    runs.curves.push_back(std::move(curve));
  }

  std::ofstream agg(spec.out_dir / (stem + "_aggregate.csv"));
  if (!agg) throw Error("cannot write aggregate file in " + spec.out_dir.string());
  const std::string col = objective_column(entry.objective);
  agg << "row,iteration,runs,mean_" << col << ",std_" << col << '\n';
  for (std::size_t k = 0; k < runs.iterations.size(); ++k) {
    std::vector<double> column;
    for (const auto& c : runs.curves) {
      if (k < c.size()) column.push_back(c[k]);
    }
    const auto [m, s] = mean_and_std(column);
    agg << k << ',' << runs.iterations[k] << ',' << column.size() << ',' << format_number(m) << ','
        << format_number(s) << '\n';
  }
  return runs;
}

}  // namespace

std::string_view to_string(Algorithm algo) { return algo == Algorithm::ProSRS ? "prosrs" : "random"; }

Algorithm parse_algorithm(std::string_view text) {
  if (text == "prosrs") return Algorithm::ProSRS;
  if (text == "random") return Algorithm::Random;
  throw ConfigError("unknown algorithm '" + std::string(text) + "' (expected prosrs or random)");
}

void apply_overrides(RunConfig& c, const json& o) {
  if (!o.is_object()) throw ConfigError("configuration overrides must be an object");
  if (o.contains("n_par")) c.n_par = get_count(o, "n_par");
  if (o.contains("n_iterations")) c.n_iterations = get_count(o, "n_iterations");
  if (o.contains("m_doe")) c.m_doe = get_count(o, "m_doe");
  if (o.contains("s_init")) {
    const json& s = o.at("s_init");
    if (!s.is_object()) throw ConfigError("s_init must be an object with gamma, p, sigma");
    for (const auto& [k, v] : s.items()) {
      if (k != "gamma" && k != "p" && k != "sigma") throw ConfigError("unknown s_init key '" + k + "'");
    }
    if (s.contains("gamma")) c.s_init.gamma = get_as<double>(s, "gamma");
    if (s.contains("p")) c.s_init.p = get_as<double>(s, "p");
    if (s.contains("sigma")) c.s_init.sigma = get_as<double>(s, "sigma");
  }
  if (o.contains("sigma_crit")) c.sigma_crit = get_as<double>(o, "sigma_crit");
  if (o.contains("beta_init")) c.beta_init = get_as<double>(o, "beta_init");
  if (o.contains("beta_min")) c.beta_min = get_as<double>(o, "beta_min");
  if (o.contains("rho")) c.rho = get_as<double>(o, "rho");
  if (o.contains("r_resolution")) c.r_resolution = get_as<double>(o, "r_resolution");
  if (o.contains("c_fail")) c.c_fail = get_count(o, "c_fail");
  if (o.contains("delta_gamma")) c.delta_gamma = get_as<double>(o, "delta_gamma");
  if (o.contains("n_candidates_per_dim")) c.n_candidates_per_dim = get_count(o, "n_candidates_per_dim");
  if (o.contains("doe_restarts")) c.doe_restarts = get_count(o, "doe_restarts");
  if (o.contains("seed")) c.seed = get_as<std::uint64_t>(o, "seed");
  validate(c);
}

json to_json(const RunConfig& c) {
  return json{{"n_par", c.n_par},
              {"n_iterations", c.n_iterations},
              {"m_doe", c.m_doe},
              {"s_init", {{"gamma", c.s_init.gamma}, {"p", c.s_init.p}, {"sigma", c.s_init.sigma}}},
              {"sigma_crit", c.sigma_crit},
              {"beta_init", c.beta_init},
              {"beta_min", c.beta_min},
              {"rho", c.rho},
              {"r_resolution", c.r_resolution},
              {"c_fail", c.c_fail},
              {"delta_gamma", c.delta_gamma},
              {"n_candidates_per_dim", c.n_candidates_per_dim},
              {"doe_restarts", c.doe_restarts},
              {"seed", c.seed}};
}

ExperimentSpec parse_spec(const json& doc) {
  if (!doc.is_object()) throw ConfigError("experiment specification must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (!experiment_keys().contains(key) && !config_keys().contains(key)) {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }
  ExperimentSpec spec;
  if (doc.contains("command")) spec.command = get_as<std::string>(doc, "command");
  static const std::set<std::string> commands = {"optimize", "bench-suite", "model-error", "cost-profile"};
  if (!commands.contains(spec.command)) throw ConfigError("unknown command '" + spec.command + "'");

  std::vector<std::string> names;
  if (doc.contains("problem")) {
    const json& p = doc.at("problem");
    if (p.is_string()) {
      names.push_back(p.get<std::string>());
    } else if (p.is_array()) {
      for (const auto& v : p) {
        if (!v.is_string()) throw ConfigError("problem list must hold names");
        names.push_back(v.get<std::string>());
      }
    } else {
      throw ConfigError("problem must be a name or a list of names");
    }
  }
  if (names.size() == 1 && names.front() == "all") names = benchmark_names();
  for (const auto& n : names) {
    try {
      spec.problems.push_back({n, to_objective(make_benchmark(n))});
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }

  if (doc.contains("algo")) spec.algo = parse_algorithm(get_as<std::string>(doc, "algo"));
  if (doc.contains("n_par")) spec.n_par = get_count(doc, "n_par");
  if (doc.contains("n_iterations")) spec.iterations = get_count(doc, "n_iterations");
  if (doc.contains("iterations")) spec.iterations = get_count(doc, "iterations");
  if (doc.contains("repeats")) spec.repeats = get_count(doc, "repeats");
  if (doc.contains("seed")) spec.seed = get_as<std::uint64_t>(doc, "seed");
  if (doc.contains("out")) spec.out_dir = get_as<std::string>(doc, "out");
  if (doc.contains("deterministic")) spec.deterministic = get_as<bool>(doc, "deterministic");
  if (doc.contains("threads")) spec.threads = get_count(doc, "threads");
  if (doc.contains("model_error")) {
    const json& me = doc.at("model_error");
    if (!me.is_object()) throw ConfigError("model_error must be an object");
    if (me.contains("n_values")) spec.n_values = get_as<std::vector<std::size_t>>(me, "n_values");
    if (me.contains("n_mc")) spec.n_mc = get_count(me, "n_mc");
    if (me.contains("repeats")) spec.model_repeats = get_count(me, "repeats");
  }
  if (spec.n_par == 0) throw ConfigError("n_par must be positive");
  if (spec.repeats == 0) throw ConfigError("repeats must be positive");
  if (spec.model_repeats == 0 || spec.n_mc == 0) throw ConfigError("model_error repeats and n_mc must be positive");
  for (std::size_t n : spec.n_values) {
    if (n < 2) throw ConfigError("model_error n_values must be at least 2");
  }

  for (const auto& key : config_keys()) {
    if (key == "n_par" || key == "n_iterations" || key == "seed") continue;
    if (doc.contains(key)) spec.config_overrides[key] = doc.at(key);
  }
  // Fail early on bad overrides rather than inside the first run.
  RunConfig probe = default_config(1, spec.n_par);
  probe.n_iterations = spec.iterations;
  apply_overrides(probe, spec.config_overrides);
  return spec;
}

RunConfig make_run_config(const ExperimentSpec& spec, const Objective& objective, std::size_t repeat) {
  RunConfig c = default_config(objective.dimension(), spec.n_par);
  c.n_iterations = spec.iterations;
  c.seed = spec.seed + repeat;
  apply_overrides(c, spec.config_overrides);
  return c;
}

std::string objective_column(const Objective& objective) {
  return objective.true_mean ? "true_f_best" : "noisy_y_best";
}

double objective_value(const Objective& objective, const IterationLog& log) {
  if (objective.true_mean && !log.x_best.empty()) return objective.true_mean(log.x_best);
  return log.best_y;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

RunCsvWriter::RunCsvWriter(const fs::path& path, const Objective& objective, bool deterministic)
    : out_(path), objective_(objective), deterministic_(deterministic) {
  if (!out_) throw Error("cannot write " + path.string());
  out_ << "iteration,event,zoom_level,best_y," << objective_column(objective_) << ",algo_time_s,eval_time_s\n";
  out_.flush();
}

void RunCsvWriter::write(const IterationLog& log) {
  out_ << log.iteration << ',' << to_string(log.event) << ',' << log.zoom_level << ','
       << format_number(log.best_y) << ',' << format_number(objective_value(objective_, log)) << ','
       << (deterministic_ ? "0" : format_number(log.algo_time_s)) << ','
       << (deterministic_ ? "0" : format_number(log.eval_time_s)) << '\n';
  out_.flush();
}

json run_summary(const RunResult& result, const Objective& objective, std::string_view problem, Algorithm algo) {
  json s{{"problem", problem},
         {"algo", to_string(algo)},
         {"x_best", result.x_best},
         {"y_best", result.y_best},
         {"n_evaluations", result.n_evaluations},
         {"n_restarts", result.n_restarts},
         {"deepest_zoom_level", result.deepest_zoom_level},
         {"seed", result.config.seed},
         {"config", to_json(result.config)}};
  if (objective.true_mean && !result.x_best.empty()) s["true_f_at_x_best"] = objective.true_mean(result.x_best);
  return s;
}

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double cost_trend_ratio(const std::vector<double>& times) {
  const std::size_t n = times.size();
  const auto first = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n)));
  const auto last = static_cast<std::size_t>(std::llround(0.35 * static_cast<double>(n)));
  std::vector<double> early, late;
  for (std::size_t it = std::max<std::size_t>(first, 1); it <= last && it <= n; ++it) early.push_back(times[it - 1]);
  const std::size_t late_count = n / 4;
  for (std::size_t k = n - late_count; k < n; ++k) late.push_back(times[k]);
  if (early.empty() || late.empty()) return std::numeric_limits<double>::quiet_NaN();
  return median(late) / median(early);
}

std::vector<ModelErrorCell> model_error_study(const std::vector<ProblemEntry>& problems,
                                              const std::vector<std::size_t>& n_values, std::size_t repeats,
                                              std::size_t n_mc, std::uint64_t seed) {
  std::vector<ModelErrorCell> cells;
  for (std::size_t pi = 0; pi < problems.size(); ++pi) {
    const Objective& obj = problems[pi].objective;
    if (!obj.true_mean) throw ConfigError("model-error needs an objective with a known mean: " + problems[pi].name);
    for (const std::size_t n : n_values) {
      ModelErrorCell cell{.problem = problems[pi].name, .n = n, .errors = {}};
      for (std::size_t r = 0; r < repeats; ++r) {
        Rng rng = make_rng(seed + r, Stream::ModelError, pi * 1000003ULL + n);
        const DoeDesign design = latin_hypercube(n, obj.domain, rng);
        EvalDataset data(obj.dimension());
        for (const auto& x : design.points) {
          const double y = obj.eval(x, rng());
          data.add(x, y);
        }
        CrossValidationConfig cv;
        cv.seed = rng();
        const RbfSurrogate model = fit_rbf(data, obj.domain, 0.0, cv);
        Rng mc = make_rng(seed + r, Stream::MonteCarlo, pi);
        cell.errors.push_back(relative_l2_error(model, obj.true_mean, obj.domain, n_mc, mc));
      }
      std::tie(cell.mean, cell.std) = mean_and_std(cell.errors);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

json cmd_optimize(const ExperimentSpec& spec) {
  if (spec.problems.empty()) throw ConfigError("optimize needs a problem");
  fs::create_directories(spec.out_dir);
  json out{{"command", spec.command}, {"algo", to_string(spec.algo)}, {"problems", json::array()}};
  for (const auto& entry : spec.problems) {
    const ProblemRuns runs = optimize_problem(spec, entry);
    const auto [m, s] = mean_and_std(runs.final_values);
    out["problems"].push_back({{"problem", entry.name},
                               {"repeats", spec.repeats},
                               {"final_mean", m},
                               {"final_std", s},
                               {"final_median", median(runs.final_values)},
                               {"column", objective_column(entry.objective)}});
  }
  write_json(spec.out_dir / "optimize_summary.json", out);
  return out;
}

json cmd_bench_suite(const ExperimentSpec& spec) {
  ExperimentSpec suite = spec;
  if (suite.problems.empty()) {
    for (const auto& n : benchmark_names()) suite.problems.push_back({n, to_objective(make_benchmark(n))});
  }
  fs::create_directories(suite.out_dir);
  std::ofstream table(suite.out_dir / "bench_summary.csv");
  if (!table) throw Error("cannot write bench_summary.csv in " + suite.out_dir.string());
  table << "problem,algo,n_par,iterations,repeats,final_mean,final_std,final_median\n";
  json out{{"command", "bench-suite"}, {"algo", to_string(suite.algo)}, {"problems", json::array()}};
  for (const auto& entry : suite.problems) {
    const ProblemRuns runs = optimize_problem(suite, entry);
    const auto [m, s] = mean_and_std(runs.final_values);
    const double med = median(runs.final_values);
    table << entry.name << ',' << to_string(suite.algo) << ',' << suite.n_par << ',' << suite.iterations << ','
          << suite.repeats << ',' << format_number(m) << ',' << format_number(s) << ',' << format_number(med)
          << '\n';
    out["problems"].push_back({{"problem", entry.name}, {"final_mean", m}, {"final_std", s}, {"final_median", med}});
  }
  return out;
}

json cmd_model_error(const ExperimentSpec& spec) {
  std::vector<ProblemEntry> problems = spec.problems;
  if (problems.empty()) {
    for (const auto& n : benchmark_names()) problems.push_back({n, to_objective(make_benchmark(n))});
  }
  fs::create_directories(spec.out_dir);
  const auto cells = model_error_study(problems, spec.n_values, spec.model_repeats, spec.n_mc, spec.seed);
  std::ofstream table(spec.out_dir / "model_error.csv");
  std::ofstream raw(spec.out_dir / "model_error_runs.csv");
  if (!table || !raw) throw Error("cannot write model-error files in " + spec.out_dir.string());
  table << "problem,n,repeats,mean_rel_l2_error,std_rel_l2_error\n";
  raw << "problem,n,repeat,rel_l2_error\n";
  json out{{"command", "model-error"}, {"cells", json::array()}};
  for (const auto& c : cells) {
    table << c.problem << ',' << c.n << ',' << c.errors.size() << ',' << format_number(c.mean) << ','
          << format_number(c.std) << '\n';
    for (std::size_t r = 0; r < c.errors.size(); ++r) {
      raw << c.problem << ',' << c.n << ',' << r << ',' << format_number(c.errors[r]) << '\n';
    }
    out["cells"].push_back({{"problem", c.problem}, {"n", c.n}, {"mean", c.mean}, {"std", c.std}});
  }
  return out;
}

json cmd_cost_profile(const ExperimentSpec& spec) {
  if (spec.problems.empty()) throw ConfigError("cost-profile needs a problem");
  fs::create_directories(spec.out_dir);
  json out{{"command", "cost-profile"}, {"algo", to_string(spec.algo)}, {"runs", json::array()}};
  for (const auto& entry : spec.problems) {
    for (std::size_t r = 0; r < spec.repeats; ++r) {
      const RunConfig config = make_run_config(spec, entry.objective, r);
      const RunResult result = run_one(spec, entry, spec.algo, config, {});
      const std::string name = run_stem(entry.name, spec.algo) + "_cost_run" + std::to_string(r);
      std::ofstream csv(spec.out_dir / (name + ".csv"));
      if (!csv) throw Error("cannot write " + name + ".csv");
      csv << "iteration,event,node_size,algo_time_s,eval_time_s\n";
      std::vector<double> times;
      for (const auto& log : result.logs) {
        if (log.iteration == 0) continue;
        times.push_back(log.algo_time_s);
        csv << log.iteration << ',' << to_string(log.event) << ',' << log.node_size << ','
            << format_number(log.algo_time_s) << ',' << format_number(log.eval_time_s) << '\n';
      }
      const double ratio = cost_trend_ratio(times);
      out["runs"].push_back({{"problem", entry.name},
                             {"repeat", r},
                             {"timing_rows", times.size()},
                             {"late_to_early_median_ratio", std::isfinite(ratio) ? json(ratio) : json(nullptr)}});
    }
  }
  write_json(spec.out_dir / "cost_profile.json", out);
  return out;
}

json run_experiment(const ExperimentSpec& spec) {
  if (spec.command == "optimize") return cmd_optimize(spec);
  if (spec.command == "bench-suite") return cmd_bench_suite(spec);
  if (spec.command == "model-error") return cmd_model_error(spec);
  if (spec.command == "cost-profile") return cmd_cost_profile(spec);
  throw ConfigError("unknown command '" + spec.command + "'");
}

}  // namespace prosrs
