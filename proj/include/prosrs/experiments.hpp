#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "prosrs/engine.hpp"
#include "prosrs/problem.hpp"

namespace prosrs {

enum class Algorithm { ProSRS, Random };

std::string_view to_string(Algorithm algo);
/// "prosrs" or "random"; throws ConfigError otherwise.
Algorithm parse_algorithm(std::string_view text);

/// Overrides RunConfig fields from keys that mirror the field names
/// (`s_init` is an object with gamma/p/sigma). Keys that are not RunConfig
/// fields are ignored; ill-typed or out-of-range values throw ConfigError.
void apply_overrides(RunConfig& config, const nlohmann::json& overrides);
nlohmann::json to_json(const RunConfig& config);

/// A named objective taking part in an experiment.
struct ProblemEntry {
  std::string name;
  Objective objective;
};

/// Everything one CLI invocation needs.
struct ExperimentSpec {
  std::string command = "optimize";
  std::vector<ProblemEntry> problems;
  Algorithm algo = Algorithm::ProSRS;
  std::size_t n_par = 4;
  std::size_t iterations = 50;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "prosrs_out";
  /// Writes timing columns as 0 so output files are reproducible byte for byte.
  bool deterministic = false;
  std::size_t threads = 1;
  /// RunConfig field overrides, applied on top of the per-problem defaults.
  nlohmann::json config_overrides = nlohmann::json::object();
  // model-error settings
  std::vector<std::size_t> n_values = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::size_t n_mc = 100000;
  std::size_t model_repeats = 10;
};

/// Builds a spec from a structured document (config file merged with flags).
///
/// Recognized keys: command, problem (name or list, "all" for every
/// benchmark), algo, n_par, iterations / n_iterations, repeats, seed, out,
/// deterministic, threads, model_error {n_values, n_mc, repeats}, and any
/// RunConfig field. Plug-in objectives are attached afterwards by the caller.
ExperimentSpec parse_spec(const nlohmann::json& doc);

/// Default config for one problem of the spec and one repeat.
RunConfig make_run_config(const ExperimentSpec& spec, const Objective& objective, std::size_t repeat);

/// Column header of the objective column: the true mean at x_best when the
/// objective has one, otherwise the best noisy value.
std::string objective_column(const Objective& objective);

/// Value of the objective column for one log row.
double objective_value(const Objective& objective, const IterationLog& log);

/// Streams per-iteration CSV rows as the engine produces them.
class RunCsvWriter {
 public:
  RunCsvWriter(const std::filesystem::path& path, const Objective& objective, bool deterministic);
  void write(const IterationLog& log);

 private:
  std::ofstream out_;
  const Objective& objective_;
  bool deterministic_;
};

/// Shortest round-trip decimal form of a double.
std::string format_number(double value);

nlohmann::json run_summary(const RunResult& result, const Objective& objective, std::string_view problem,
                           Algorithm algo);

/// Mean and sample standard deviation (0 for a single value).
std::pair<double, double> mean_and_std(const std::vector<double>& values);

double median(std::vector<double> values);

/// Late/early median ratio of per-iteration algorithm time. `times[k]` belongs
/// to iteration k+1. The early window is iterations round(0.1 N)..round(0.35 N),
/// the late window the final quarter. NaN when a window is empty.
double cost_trend_ratio(const std::vector<double>& times);

struct ModelErrorCell {
  std::string problem;
  std::size_t n = 0;
  std::vector<double> errors;  ///< one per repeat
  double mean = 0.0;
  double std = 0.0;
};

/// Regression study: Latin hypercube training sets of each size, noisy
/// responses, unweighted cross-validated fit, Monte-Carlo relative L2 error
/// against the true mean. Repeat r of every cell derives its streams from
/// seed + r; the Monte-Carlo points are shared by all sizes within a repeat.
std::vector<ModelErrorCell> model_error_study(const std::vector<ProblemEntry>& problems,
                                              const std::vector<std::size_t>& n_values, std::size_t repeats,
                                              std::size_t n_mc, std::uint64_t seed);

/// Each command writes its files under spec.out_dir and returns a summary document.
nlohmann::json cmd_optimize(const ExperimentSpec& spec);
nlohmann::json cmd_bench_suite(const ExperimentSpec& spec);
nlohmann::json cmd_model_error(const ExperimentSpec& spec);
nlohmann::json cmd_cost_profile(const ExperimentSpec& spec);
nlohmann::json run_experiment(const ExperimentSpec& spec);

}  // namespace prosrs
