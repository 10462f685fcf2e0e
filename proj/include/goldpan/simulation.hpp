#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "goldpan/core.hpp"
#include "goldpan/rng.hpp"
#include "goldpan/strategies.hpp"

namespace goldpan {

// Where detector profiles come from. Uniform and Beta(alpha) generate
// symmetric profiles (tpr = 1 - fpr) from one draw per detector, so both
// marginals follow the named distribution; File loads a calibration profile.
struct DetectorSource {
  enum class Kind { Uniform, Beta, File };
  Kind kind = Kind::Uniform;
  double beta_alpha = 1.0;
  std::string file_path;

  static DetectorSource uniform() { return {}; }
  static DetectorSource beta(double alpha) {
    return {Kind::Beta, alpha, {}};
  }
  static DetectorSource file(std::string path) {
    return {Kind::File, 1.0, std::move(path)};
  }
};

struct KRule {
  enum class Kind { SqrtN, Fixed };
  Kind kind = Kind::SqrtN;
  int fixed_k = 1;

  static KRule sqrt_n() { return {}; }
  static KRule fixed(int k) { return {Kind::Fixed, k}; }
};

struct EnvironmentSpec {
  int n_items = 50;
  DetectorSource detector_source;
  KRule k_rule;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

// Early-stopping rule (disabled by default): stop when every belief is
// <= delta or >= 1-delta, or when total entropy falls below epsilon.
struct StoppingRule {
  std::optional<double> delta;
  std::optional<double> epsilon;
};

// A fully materialized environment: the true profiles and hidden states.
struct Environment {
  std::vector<DetectorProfile> detectors;
  GroundTruth truth;
  double noise_sigma = 0.0;
};

// Independent random streams for one trial. Policy randomness is the only
// strategy-specific stream; observation and noise streams are shared across
// strategies so the environment cannot depend on the policy.
struct TrialStreams {
  Rng policy;
  Rng obs;
  Rng noise;
};

struct RunResult {
  std::vector<double> accuracy;   // Accuracy@k per iteration (0/1)
  std::vector<double> entropy;    // total belief entropy per iteration (bits)
  std::optional<int> converged_at;  // 1-based iteration of early stop
};

struct StrategySeries {
  std::vector<double> mean_accuracy;
  std::vector<double> std_error;
  std::vector<double> mean_entropy;
};

struct AggregateResult {
  std::vector<StrategyKind> strategies;
  std::vector<StrategySeries> series;  // parallel to strategies
  int iterations = 0;
  int runs = 0;
  std::uint64_t master_seed = 0;
  EnvironmentSpec spec;
};

// Per-round view handed to an observer: update_profiles[i] is the profile
// the agent used in the Bayes update of item i this round.
struct RoundContext {
  int round = 0;  // 1-based
  const BeliefState& before;
  const Assignment& assignment;
  const std::vector<DetectorProfile>& update_profiles;
  const ObservationVector& observations;
  const BeliefState& after;
};
using RoundObserver = std::function<void(const RoundContext&)>;

// Detector generation from the configured source. File sources are read from
// disk on every call; see generate_environment for the preloaded path.
std::vector<DetectorProfile> gen_detectors(const EnvironmentSpec& spec, Rng& rng);

// SqrtN draws k uniformly from {1..floor(sqrt(n))}; Fixed uses the given k.
GroundTruth gen_ground_truth(int n, const KRule& k_rule, Rng& rng);

// Agent-visible profiles: tpr/fpr each perturbed by N(0, sigma^2) and clamped
// to [0,1]. sigma = 0 returns the input unchanged without consuming draws.
// Observations elsewhere always use the true profiles.
std::vector<DetectorProfile> inject_noise(const std::vector<DetectorProfile>& detectors,
                                          double sigma, Rng& rng);

// Detectors (padded/truncated to n_items) then ground truth, in that order,
// from one stream. file_profiles, when given, bypasses the disk read.
Environment generate_environment(const EnvironmentSpec& spec, Rng& rng,
                                 const std::vector<DetectorProfile>* file_profiles = nullptr);

// 1 iff the top-k items by belief (ties by lower index) equal the relevant set.
int accuracy_at_k(const BeliefState& beliefs, const GroundTruth& truth);

// One multi-round trial on a materialized environment.
RunResult run_trial(const Environment& env, StrategyKind strategy, int iterations,
                    const std::optional<StoppingRule>& stopping, TrialStreams& streams,
                    const RoundObserver* observer = nullptr);

// Convenience form: materializes the environment and derives the three
// trial streams from rng.
RunResult run_trial(const EnvironmentSpec& spec, StrategyKind strategy, int iterations,
                    const std::optional<StoppingRule>& stopping, Rng& rng);

// The per-run kernel behind run_experiment: derives the environment stream
// from (master_seed, run_index) and the policy/observation/noise streams as
// documented in the README, then runs one trial. Exposed so a single run of
// an experiment can be replayed in isolation.
RunResult simulate_run(const EnvironmentSpec& spec, StrategyKind strategy,
                       int run_index, std::uint64_t master_seed, int iterations,
                       const std::optional<StoppingRule>& stopping = std::nullopt);

// Monte Carlo experiment: `runs` paired trials per strategy, seeds derived
// from (master_seed, stream, run_index). Bit-identical output for a fixed
// master_seed regardless of parallelism; this is the OpenMP kernel.
AggregateResult run_experiment(const EnvironmentSpec& spec,
                               const std::vector<StrategyKind>& strategies,
                               int iterations, int runs, std::uint64_t master_seed,
                               int parallelism,
                               const std::optional<StoppingRule>& stopping = std::nullopt);

// Serial reference for the kernel above: identical results, no OpenMP.
AggregateResult run_experiment_serial(const EnvironmentSpec& spec,
                                      const std::vector<StrategyKind>& strategies,
                                      int iterations, int runs, std::uint64_t master_seed,
                                      const std::optional<StoppingRule>& stopping = std::nullopt);

struct NoiseSweepEntry {
  double sigma = 0.0;
  AggregateResult result;
};
struct ConcentrationSweepEntry {
  double alpha = 0.0;
  AggregateResult result;
};

// {0, 0.0051, 0.0255, 0.0510}
std::vector<double> default_noise_grid();
// 20 log-spaced values in [0.1, 100]
std::vector<double> default_concentration_grid();

// run_experiment once per sigma; per-run environments are shared across
// sigma levels (the noise stream is separate from the environment stream).
std::vector<NoiseSweepEntry> sweep_noise(const EnvironmentSpec& base,
                                         const std::vector<double>& sigmas,
                                         const std::vector<StrategyKind>& strategies,
                                         int iterations, int runs,
                                         std::uint64_t master_seed, int parallelism);

// run_experiment once per alpha with a Beta(alpha) detector source.
std::vector<ConcentrationSweepEntry> sweep_concentration(
    const EnvironmentSpec& base, const std::vector<double>& alphas,
    const std::vector<StrategyKind>& strategies, int iterations, int runs,
    std::uint64_t master_seed, int parallelism);

}  // namespace goldpan
