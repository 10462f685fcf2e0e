// goldpan: simulation and calibration front end.
// Subcommands: simulate, sweep-noise, sweep-concentration, calibrate.
// Exit codes: 0 success, 2 usage/config error, 3 I/O error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "goldpan/calibration.hpp"
#include "goldpan/simulation.hpp"

namespace {

using goldpan::AggregateResult;
using goldpan::DetectorSource;
using goldpan::EnvironmentSpec;
using goldpan::KRule;
using goldpan::StrategyKind;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct CliConfig {
  int n_items = 50;
  std::string detector_source = "uniform";
  double beta_alpha = 1.0;
  std::string detector_file;
  std::string k_rule = "sqrt";
  int k = 1;
  double noise_sigma = 0.0;
  std::vector<std::string> strategies = {"GoldPanning", "HungarianIG", "PSC"};
  int iterations = 20;
  int runs = 2000;
  std::optional<std::uint64_t> seed;
  int parallelism = std::max(1u, std::thread::hardware_concurrency());
  std::string output;
  std::vector<double> sigmas;
  std::vector<double> alphas;
};

template <typename T>
T get_field(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + key + "' has the wrong type");
  }
}

void merge_config_file(CliConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw goldpan::IoError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file must be a JSON object");

  for (const auto& [key, value] : doc.items()) {
    if (key == "n_items") cfg.n_items = get_field<int>(doc, key);
    else if (key == "detector_source") cfg.detector_source = get_field<std::string>(doc, key);
    else if (key == "beta_alpha") cfg.beta_alpha = get_field<double>(doc, key);
    else if (key == "detector_file") cfg.detector_file = get_field<std::string>(doc, key);
    else if (key == "k_rule") cfg.k_rule = get_field<std::string>(doc, key);
    else if (key == "k") cfg.k = get_field<int>(doc, key);
    else if (key == "noise_sigma") cfg.noise_sigma = get_field<double>(doc, key);
    else if (key == "strategies") cfg.strategies = get_field<std::vector<std::string>>(doc, key);
    else if (key == "iterations") cfg.iterations = get_field<int>(doc, key);
    else if (key == "runs") cfg.runs = get_field<int>(doc, key);
    else if (key == "seed") cfg.seed = get_field<std::uint64_t>(doc, key);
    else if (key == "parallelism") cfg.parallelism = get_field<int>(doc, key);
    else if (key == "output") cfg.output = get_field<std::string>(doc, key);
    else if (key == "sigmas") cfg.sigmas = get_field<std::vector<double>>(doc, key);
    else if (key == "alphas") cfg.alphas = get_field<std::vector<double>>(doc, key);
    else if (key == "command") { /* sidecar echo, ignored */ }
    else throw ConfigError("unknown config field '" + key + "'");
    (void)value;
  }
}

std::vector<double> parse_double_list(const std::string& raw, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError(flag + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(flag + ": empty list");
  return out;
}

std::vector<StrategyKind> resolve_strategies(const std::vector<std::string>& names) {
  if (names.empty()) throw ConfigError("strategies: must be non-empty");
  std::vector<StrategyKind> out;
  for (const std::string& name : names) {
    const auto kind = goldpan::strategy_from_string(name);
    if (!kind)
      throw ConfigError("strategies: unknown strategy '" + name +
                        "' (expected GoldPanning, HungarianIG, PSC, ThompsonSampling)");
    out.push_back(*kind);
  }
  return out;
}

EnvironmentSpec resolve_spec(const CliConfig& cfg) {
  if (cfg.n_items < 1) throw ConfigError("n_items: must be >= 1");
  if (cfg.iterations < 1) throw ConfigError("iterations: must be >= 1");
  if (cfg.runs < 1) throw ConfigError("runs: must be >= 1");
  if (cfg.parallelism < 1) throw ConfigError("parallelism: must be >= 1");
  if (cfg.noise_sigma < 0.0) throw ConfigError("noise_sigma: must be >= 0");

  EnvironmentSpec spec;
  spec.n_items = cfg.n_items;
  if (cfg.detector_source == "uniform") {
    spec.detector_source = DetectorSource::uniform();
  } else if (cfg.detector_source == "beta") {
    if (!(cfg.beta_alpha > 0.0)) throw ConfigError("beta_alpha: must be > 0");
    spec.detector_source = DetectorSource::beta(cfg.beta_alpha);
  } else if (cfg.detector_source == "file") {
    if (cfg.detector_file.empty())
      throw ConfigError("detector_file: required when detector_source is 'file'");
    spec.detector_source = DetectorSource::file(cfg.detector_file);
  } else {
    throw ConfigError("detector_source: expected 'uniform', 'beta' or 'file'");
  }
  if (cfg.k_rule == "sqrt") {
    spec.k_rule = KRule::sqrt_n();
  } else if (cfg.k_rule == "fixed") {
    if (cfg.k < 1 || cfg.k > cfg.n_items)
      throw ConfigError("k: must be in [1, n_items] for the fixed rule");
    spec.k_rule = KRule::fixed(cfg.k);
  } else {
    throw ConfigError("k_rule: expected 'sqrt' or 'fixed'");
  }
  spec.noise_sigma = cfg.noise_sigma;
  spec.seed = cfg.seed.value_or(0);
  return spec;
}

json config_to_json(const CliConfig& cfg, const std::string& command) {
  json doc;
  doc["command"] = command;
  doc["n_items"] = cfg.n_items;
  doc["detector_source"] = cfg.detector_source;
  if (cfg.detector_source == "beta") doc["beta_alpha"] = cfg.beta_alpha;
  if (cfg.detector_source == "file") doc["detector_file"] = cfg.detector_file;
  doc["k_rule"] = cfg.k_rule;
  if (cfg.k_rule == "fixed") doc["k"] = cfg.k;
  doc["noise_sigma"] = cfg.noise_sigma;
  doc["strategies"] = cfg.strategies;
  doc["iterations"] = cfg.iterations;
  doc["runs"] = cfg.runs;
  doc["seed"] = *cfg.seed;
  doc["parallelism"] = cfg.parallelism;
  doc["output"] = cfg.output;
  if (command == "sweep-noise") doc["sigmas"] = cfg.sigmas;
  if (command == "sweep-concentration") doc["alphas"] = cfg.alphas;
  return doc;
}

void write_sidecar(const CliConfig& cfg, const std::string& command) {
  const std::string path = cfg.output + ".meta.json";
  std::ofstream out(path);
  if (!out) throw goldpan::IoError("cannot write sidecar: " + path);
  out << config_to_json(cfg, command).dump(2) << "\n";
  if (!out) throw goldpan::IoError("failed writing sidecar: " + path);
}

void append_series(std::ostream& out, const std::string& prefix,
                   const AggregateResult& result) {
  for (std::size_t s = 0; s < result.strategies.size(); ++s) {
    const std::string name = goldpan::to_string(result.strategies[s]);
    const auto& series = result.series[s];
    for (int t = 0; t < result.iterations; ++t) {
      out << prefix << name << ',' << (t + 1) << ',' << fmt_g(series.mean_accuracy[t])
          << ',' << fmt_g(series.std_error[t]) << ',' << fmt_g(series.mean_entropy[t])
          << '\n';
    }
  }
}

void write_csv(const CliConfig& cfg, const std::string& lead_column,
               const std::vector<std::pair<double, AggregateResult>>& blocks) {
  std::ofstream out(cfg.output);
  if (!out) throw goldpan::IoError("cannot write output: " + cfg.output);
  if (lead_column.empty()) {
    out << "strategy,iteration,mean_accuracy,std_error,mean_entropy\n";
    append_series(out, "", blocks.front().second);
  } else {
    out << lead_column << ",strategy,iteration,mean_accuracy,std_error,mean_entropy\n";
    for (const auto& [value, result] : blocks)
      append_series(out, fmt_g(value) + ",", result);
  }
  if (!out) throw goldpan::IoError("failed writing output: " + cfg.output);
}

int cmd_simulate(const CliConfig& cfg) {
  const EnvironmentSpec spec = resolve_spec(cfg);
  const auto strategies = resolve_strategies(cfg.strategies);
  const AggregateResult result = goldpan::run_experiment(
      spec, strategies, cfg.iterations, cfg.runs, *cfg.seed, cfg.parallelism);
  write_csv(cfg, "", {{0.0, result}});
  write_sidecar(cfg, "simulate");
  std::cout << "wrote " << cfg.output << " (" << cfg.runs << " runs x "
            << cfg.strategies.size() << " strategies, seed " << *cfg.seed << ")\n";
  return kExitOk;
}

int cmd_sweep_noise(const CliConfig& cfg) {
  const EnvironmentSpec spec = resolve_spec(cfg);
  const auto strategies = resolve_strategies(cfg.strategies);
  for (double s : cfg.sigmas)
    if (s < 0.0) throw ConfigError("sigmas: must be >= 0");
  const auto entries = goldpan::sweep_noise(spec, cfg.sigmas, strategies,
                                            cfg.iterations, cfg.runs, *cfg.seed,
                                            cfg.parallelism);
  std::vector<std::pair<double, AggregateResult>> blocks;
  for (const auto& e : entries) blocks.emplace_back(e.sigma, e.result);
  write_csv(cfg, "sigma", blocks);
  write_sidecar(cfg, "sweep-noise");
  std::cout << "wrote " << cfg.output << " (" << cfg.sigmas.size()
            << " noise levels, seed " << *cfg.seed << ")\n";
  return kExitOk;
}

int cmd_sweep_concentration(const CliConfig& cfg) {
  const EnvironmentSpec spec = resolve_spec(cfg);
  const auto strategies = resolve_strategies(cfg.strategies);
  for (double a : cfg.alphas)
    if (!(a > 0.0)) throw ConfigError("alphas: must be > 0");
  const auto entries = goldpan::sweep_concentration(spec, cfg.alphas, strategies,
                                                    cfg.iterations, cfg.runs,
                                                    *cfg.seed, cfg.parallelism);
  std::vector<std::pair<double, AggregateResult>> blocks;
  for (const auto& e : entries) blocks.emplace_back(e.alpha, e.result);
  write_csv(cfg, "alpha", blocks);
  write_sidecar(cfg, "sweep-concentration");
  std::cout << "wrote " << cfg.output << " (" << cfg.alphas.size()
            << " concentration levels, seed " << *cfg.seed << ")\n";
  return kExitOk;
}

int cmd_calibrate(const std::string& log_path, const std::string& out_path,
                  bool smoothing) {
  const auto records = goldpan::load_trial_log(log_path);
  const goldpan::ProfileFile profiles = goldpan::estimate_profiles(records, smoothing);
  goldpan::save_profiles(profiles, out_path);

  std::printf("%-10s %-10s %-10s %-14s %8s %8s\n", "position", "tpr", "fpr",
              "diagnosticity", "n_gold", "n_other");
  for (std::size_t j = 0; j < profiles.positions.size(); ++j) {
    const auto& est = profiles.positions[j];
    const std::string tpr = est.tpr ? fmt_g(*est.tpr) : "undefined";
    const std::string fpr = est.fpr ? fmt_g(*est.fpr) : "undefined";
    const std::string diag = (est.tpr && est.fpr)
                                 ? fmt_g(std::abs(*est.tpr - *est.fpr))
                                 : "undefined";
    std::printf("%-10zu %-10s %-10s %-14s %8zu %8zu\n", j, tpr.c_str(), fpr.c_str(),
                diag.c_str(), est.n_gold_trials, est.n_nongold_trials);
  }
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

void apply_seed_flag(CliConfig& cfg, const std::string& seed_flag) {
  if (seed_flag.empty()) return;
  if (seed_flag == "random") {
    std::random_device rd;
    cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    return;
  }
  try {
    std::size_t pos = 0;
    cfg.seed = std::stoull(seed_flag, &pos);
    if (pos != seed_flag.size()) throw std::invalid_argument(seed_flag);
  } catch (const std::exception&) {
    throw ConfigError("--seed: expected an unsigned integer or 'random'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gold Panning Bandits: belief-guided document reordering simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, seed_flag, strategies_csv, sigmas_csv, alphas_csv;
  std::string detector_file;
  int runs = -1, iterations = -1, n_items = -1, parallelism = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_path, "output CSV path");
    sub->add_option("--seed", seed_flag, "master seed (unsigned integer) or 'random'");
    sub->add_option("--runs", runs, "Monte Carlo runs per strategy");
    sub->add_option("--iterations", iterations, "rounds per trial");
    sub->add_option("--n-items", n_items, "number of items / detectors");
    sub->add_option("--strategies", strategies_csv, "comma-separated strategy names");
    sub->add_option("--parallelism", parallelism, "worker threads");
    sub->add_option("--detector-file", detector_file,
                    "calibration profile file (sets detector_source=file)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run one experiment");
  add_common(simulate);
  CLI::App* sweep_noise = app.add_subcommand("sweep-noise", "noise-robustness sweep");
  add_common(sweep_noise);
  sweep_noise->add_option("--sigmas", sigmas_csv, "comma-separated noise levels");
  CLI::App* sweep_conc =
      app.add_subcommand("sweep-concentration", "detector-homogeneity sweep");
  add_common(sweep_conc);
  sweep_conc->add_option("--alphas", alphas_csv, "comma-separated Beta alphas");

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "estimate per-position profiles from a trial log");
  std::string log_path, calib_out;
  bool smoothing = false;
  calibrate->add_option("log", log_path, "JSON-lines trial log")->required();
  calibrate->add_option("--out", calib_out, "output profile file")->required();
  calibrate->add_flag("--smoothing", smoothing, "add-one smoothing of the ratios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (calibrate->parsed()) return cmd_calibrate(log_path, calib_out, smoothing);

    CliConfig cfg;
    if (!config_path.empty()) merge_config_file(cfg, config_path);
    if (!out_path.empty()) cfg.output = out_path;
    if (runs >= 0) cfg.runs = runs;
    if (iterations >= 0) cfg.iterations = iterations;
    if (n_items >= 0) cfg.n_items = n_items;
    if (parallelism >= 0) cfg.parallelism = parallelism;
    if (!strategies_csv.empty()) {
      cfg.strategies.clear();
      std::stringstream ss(strategies_csv);
      std::string name;
      while (std::getline(ss, name, ',')) cfg.strategies.push_back(name);
    }
    if (!detector_file.empty()) {
      cfg.detector_source = "file";
      cfg.detector_file = detector_file;
    }
    apply_seed_flag(cfg, seed_flag);
    if (!cfg.seed)
      throw ConfigError("a master seed is required: pass --seed <u64>, --seed random, "
                        "or set \"seed\" in the config");
    if (cfg.output.empty())
      throw ConfigError("an output path is required: pass --out or set \"output\"");

    if (simulate->parsed()) return cmd_simulate(cfg);
    if (sweep_noise->parsed()) {
      if (!sigmas_csv.empty()) cfg.sigmas = parse_double_list(sigmas_csv, "--sigmas");
      if (cfg.sigmas.empty()) cfg.sigmas = goldpan::default_noise_grid();
      return cmd_sweep_noise(cfg);
    }
    if (sweep_conc->parsed()) {
      if (!alphas_csv.empty()) cfg.alphas = parse_double_list(alphas_csv, "--alphas");
      if (cfg.alphas.empty()) cfg.alphas = goldpan::default_concentration_grid();
      return cmd_sweep_concentration(cfg);
    }
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const goldpan::ParseError& e) {
    std::cerr << "error: " << e.what();
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    std::cerr << "\n";
    return kExitConfig;
  } catch (const goldpan::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
