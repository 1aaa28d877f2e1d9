// Command-line front end. Talks to the library only through prosrs.h.

#include <dlfcn.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prosrs/prosrs.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitEvaluator = 3;

int exit_code(prosrs_status s) {
  switch (s) {
    case PROSRS_OK: return kExitOk;
    case PROSRS_ERR_CONFIG:
    case PROSRS_ERR_INVALID_ARGUMENT: return kExitConfig;
    case PROSRS_ERR_EVALUATOR: return kExitEvaluator;
    default: return kExitOther;
  }
}

struct CliError {
  int code;
  std::string message;
};

void check(prosrs_status s) {
  if (s != PROSRS_OK) throw CliError{exit_code(s), prosrs_last_error()};
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CliError{kExitConfig, "not a number: '" + item + "'"};
    }
  }
  return out;
}

struct Flags {
  std::optional<std::string> config_file;
  std::vector<std::string> problems;
  std::optional<std::string> algo, out;
  std::optional<std::size_t> n_par, iterations, repeats, threads, n_mc, model_repeats;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> n_values;
  bool deterministic = false;
  std::optional<std::string> plugin, plugin_lower, plugin_upper, plugin_name;
  // RunConfig fields
  std::optional<std::size_t> m_doe, c_fail, n_candidates_per_dim, doe_restarts;
  std::optional<double> sigma_crit, beta_init, beta_min, rho, r_resolution, delta_gamma;
  std::optional<double> s_gamma, s_p, s_sigma;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_file, "JSON configuration file; flags take precedence");
  cmd->add_option("--problem", f.problems, "benchmark name(s), or 'all'")->delimiter(',');
  cmd->add_option("--algo", f.algo, "prosrs or random");
  cmd->add_option("--n-par", f.n_par, "points evaluated per iteration");
  cmd->add_option("--iterations", f.iterations, "iterations per run");
  cmd->add_option("--repeats", f.repeats, "independent runs; repeat k uses seed + k");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "evaluation threads");
  cmd->add_flag("--deterministic", f.deterministic, "write timing columns as 0");
  cmd->add_option("--plugin", f.plugin, "objective from a shared library, LIBRARY:SYMBOL");
  cmd->add_option("--plugin-lower", f.plugin_lower, "comma-separated lower bounds of the plug-in domain");
  cmd->add_option("--plugin-upper", f.plugin_upper, "comma-separated upper bounds of the plug-in domain");
  cmd->add_option("--plugin-name", f.plugin_name, "name used in output files (default: symbol)");
  cmd->add_option("--m-doe", f.m_doe);
  cmd->add_option("--sigma-crit", f.sigma_crit);
  cmd->add_option("--beta-init", f.beta_init);
  cmd->add_option("--beta-min", f.beta_min);
  cmd->add_option("--rho", f.rho);
  cmd->add_option("--r-resolution", f.r_resolution);
  cmd->add_option("--c-fail", f.c_fail);
  cmd->add_option("--delta-gamma", f.delta_gamma);
  cmd->add_option("--n-candidates-per-dim", f.n_candidates_per_dim);
  cmd->add_option("--doe-restarts", f.doe_restarts);
  cmd->add_option("--s-init-gamma", f.s_gamma);
  cmd->add_option("--s-init-p", f.s_p);
  cmd->add_option("--s-init-sigma", f.s_sigma);
}

template <typename T>
void put(json& doc, const char* key, const std::optional<T>& v) {
  if (v) doc[key] = *v;
}

json build_spec(const std::string& command, const Flags& f) {
  json doc = json::object();
  if (f.config_file) {
    std::ifstream in(*f.config_file);
    if (!in) throw CliError{kExitConfig, "cannot read config file " + *f.config_file};
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw CliError{kExitConfig, std::string("bad config file: ") + e.what()};
    }
    if (!doc.is_object()) throw CliError{kExitConfig, "config file must hold a JSON object"};
  }
  doc["command"] = command;
  if (!f.problems.empty()) doc["problem"] = f.problems;
  put(doc, "algo", f.algo);
  put(doc, "out", f.out);
  put(doc, "n_par", f.n_par);
  put(doc, "iterations", f.iterations);
  put(doc, "repeats", f.repeats);
  put(doc, "seed", f.seed);
  put(doc, "threads", f.threads);
  if (f.deterministic) doc["deterministic"] = true;
  put(doc, "m_doe", f.m_doe);
  put(doc, "sigma_crit", f.sigma_crit);
  put(doc, "beta_init", f.beta_init);
  put(doc, "beta_min", f.beta_min);
  put(doc, "rho", f.rho);
  put(doc, "r_resolution", f.r_resolution);
  put(doc, "c_fail", f.c_fail);
  put(doc, "delta_gamma", f.delta_gamma);
  put(doc, "n_candidates_per_dim", f.n_candidates_per_dim);
  put(doc, "doe_restarts", f.doe_restarts);
  if (f.s_gamma || f.s_p || f.s_sigma) {
    json& s = doc["s_init"];
    if (!s.is_object()) s = json::object();
    put(s, "gamma", f.s_gamma);
    put(s, "p", f.s_p);
    put(s, "sigma", f.s_sigma);
  }
  if (!f.n_values.empty() || f.n_mc || f.model_repeats) {
    json& me = doc["model_error"];
    if (!me.is_object()) me = json::object();
    if (!f.n_values.empty()) me["n_values"] = f.n_values;
    put(me, "n_mc", f.n_mc);
    put(me, "repeats", f.model_repeats);
  }
  if (f.plugin) {
    json& p = doc["plugin"];
    if (!p.is_object()) p = json::object();
    const auto colon = f.plugin->rfind(':');
    if (colon == std::string::npos) throw CliError{kExitConfig, "--plugin expects LIBRARY:SYMBOL"};
    p["library"] = f.plugin->substr(0, colon);
    p["symbol"] = f.plugin->substr(colon + 1);
  }
  if (f.plugin_lower) doc["plugin"]["lower"] = parse_reals(*f.plugin_lower);
  if (f.plugin_upper) doc["plugin"]["upper"] = parse_reals(*f.plugin_upper);
  if (f.plugin_name) doc["plugin"]["name"] = *f.plugin_name;
  return doc;
}

struct Plugin {
  void* handle = nullptr;
  prosrs_objective* objective = nullptr;
  std::string name;
  ~Plugin() {
    prosrs_objective_destroy(objective);
    if (handle) dlclose(handle);
  }
};

void load_plugin(const json& spec, Plugin& plugin) {
  const json& p = spec.at("plugin");
  std::string library, symbol;
  std::vector<double> lower, upper;
  try {
    library = p.at("library").get<std::string>();
    symbol = p.at("symbol").get<std::string>();
    lower = p.at("lower").get<std::vector<double>>();
    upper = p.at("upper").get<std::vector<double>>();
    plugin.name = p.value("name", symbol);
  } catch (const json::exception& e) {
    throw CliError{kExitConfig, std::string("plugin needs library, symbol, lower and upper: ") + e.what()};
  }
  if (lower.size() != upper.size() || lower.empty()) {
    throw CliError{kExitConfig, "plugin lower and upper bounds must have the same positive length"};
  }
  plugin.handle = dlopen(library.c_str(), RTLD_NOW | RTLD_LOCAL);
  if (!plugin.handle) throw CliError{kExitConfig, std::string("cannot load plugin: ") + dlerror()};
  void* sym = dlsym(plugin.handle, symbol.c_str());
  if (!sym) throw CliError{kExitConfig, "plugin symbol not found: " + symbol};
  check(prosrs_objective_callback(lower.size(), lower.data(), upper.data(), reinterpret_cast<prosrs_eval_fn>(sym),
                                  nullptr, &plugin.objective));
}

int run(const std::string& command, const Flags& flags) {
  json spec = build_spec(command, flags);
  Plugin plugin;
  if (spec.contains("plugin")) load_plugin(spec, plugin);

  prosrs_experiment* exp = nullptr;
  check(prosrs_experiment_create(spec.dump().c_str(), &exp));
  std::unique_ptr<prosrs_experiment, void (*)(prosrs_experiment*)> guard(exp, prosrs_experiment_destroy);
  if (plugin.objective) check(prosrs_experiment_add_objective(exp, plugin.name.c_str(), plugin.objective));
  check(prosrs_experiment_run(exp));

  std::size_t needed = 0;
  prosrs_experiment_summary_json(exp, nullptr, 0, &needed);
  std::string buffer(needed, '\0');
  check(prosrs_experiment_summary_json(exp, buffer.data(), buffer.size(), &needed));
  std::cout << buffer.c_str() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel surrogate optimization of noisy black-box functions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", prosrs_version());

  Flags flags;
  CLI::App* optimize = app.add_subcommand("optimize", "run the optimizer on one or more problems");
  CLI::App* bench = app.add_subcommand("bench-suite", "run every benchmark (or the given ones) and tabulate");
  CLI::App* model = app.add_subcommand("model-error", "surrogate relative L2 error versus training-set size");
  CLI::App* cost = app.add_subcommand("cost-profile", "per-iteration algorithm time");
  for (CLI::App* cmd : {optimize, bench, model, cost}) add_common(cmd, flags);
  model->add_option("--n-values", flags.n_values, "training-set sizes")->delimiter(',');
  model->add_option("--n-mc", flags.n_mc, "Monte-Carlo test points");
  model->add_option("--model-repeats", flags.model_repeats, "repeats per size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), flags);
  } catch (const CliError& e) {
    std::cerr << "prosrs: " << e.message << '\n';
    return e.code;
  }
}
