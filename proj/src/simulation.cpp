#include "goldpan/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "goldpan/calibration.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace goldpan {

namespace {

// Stream tags for derive_seed(master, tag, run_index). Policy streams are the
// only strategy-dependent ones, so the environment, the per-item observation
// uniforms, and the perception-noise draws are common to all strategies of a
// given run index.
constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kObsStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kPolicyStreamBase = 16;

std::uint64_t strategy_tag(StrategyKind s) {
  return kPolicyStreamBase + static_cast<std::uint64_t>(s);
}

int isqrt_floor(int n) {
  int r = static_cast<int>(std::sqrt(static_cast<double>(n)));
  while ((r + 1) * (r + 1) <= n) ++r;
  while (r * r > n) --r;
  return r;
}

}  // namespace

std::vector<DetectorProfile> gen_detectors(const EnvironmentSpec& spec, Rng& rng) {
  std::vector<DetectorProfile> out;
  switch (spec.detector_source.kind) {
    case DetectorSource::Kind::Uniform:
      out.reserve(spec.n_items);
      for (int j = 0; j < spec.n_items; ++j) {
        const double u = rng.uniform();
        out.push_back({u, 1.0 - u});
      }
      return out;
    case DetectorSource::Kind::Beta: {
      const double alpha = spec.detector_source.beta_alpha;
      if (!(alpha > 0.0))
        throw std::domain_error("gen_detectors: beta alpha must be positive");
      out.reserve(spec.n_items);
      for (int j = 0; j < spec.n_items; ++j) {
        const double p = rng.beta(alpha, alpha);
        out.push_back({p, 1.0 - p});
      }
      return out;
    }
    case DetectorSource::Kind::File:
      return load_profiles(spec.detector_source.file_path);
  }
  throw std::logic_error("gen_detectors: unknown source");
}

GroundTruth gen_ground_truth(int n, const KRule& k_rule, Rng& rng) {
  if (n < 1) throw std::domain_error("gen_ground_truth: n must be >= 1");
  int k = 0;
  switch (k_rule.kind) {
    case KRule::Kind::SqrtN: {
      const int kmax = std::max(1, isqrt_floor(n));
      k = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(kmax)));
      break;
    }
    case KRule::Kind::Fixed:
      k = k_rule.fixed_k;
      if (k < 1 || k > n)
        throw std::domain_error("gen_ground_truth: fixed k outside [1, n]");
      break;
  }
  GroundTruth truth;
  truth.states.assign(n, 0);
  truth.k = k;
  for (std::size_t i : rng.sample_subset(static_cast<std::size_t>(n),
                                         static_cast<std::size_t>(k)))
    truth.states[i] = 1;
  return truth;
}

std::vector<DetectorProfile> inject_noise(const std::vector<DetectorProfile>& detectors,
                                          double sigma, Rng& rng) {
  if (sigma < 0.0) throw std::domain_error("inject_noise: sigma must be >= 0");
  if (sigma == 0.0) return detectors;
  std::vector<DetectorProfile> out;
  out.reserve(detectors.size());
  for (const auto& d : detectors) {
    const double tpr = std::clamp(d.tpr + rng.normal(0.0, sigma), 0.0, 1.0);
    const double fpr = std::clamp(d.fpr + rng.normal(0.0, sigma), 0.0, 1.0);
    out.push_back({tpr, fpr});
  }
  return out;
}

Environment generate_environment(const EnvironmentSpec& spec, Rng& rng,
                                 const std::vector<DetectorProfile>* file_profiles) {
  Environment env;
  if (spec.detector_source.kind == DetectorSource::Kind::File && file_profiles)
    env.detectors = *file_profiles;
  else
    env.detectors = gen_detectors(spec, rng);
  env.detectors = pad_detectors(std::move(env.detectors),
                                static_cast<std::size_t>(spec.n_items));
  env.truth = gen_ground_truth(spec.n_items, spec.k_rule, rng);
  env.noise_sigma = spec.noise_sigma;
  return env;
}

int accuracy_at_k(const BeliefState& beliefs, const GroundTruth& truth) {
  if (beliefs.size() != truth.size())
    throw std::invalid_argument("accuracy_at_k: length mismatch");
  const std::size_t n = beliefs.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return beliefs.beliefs[a] > beliefs.beliefs[b];
  });
  for (std::size_t r = 0; r < static_cast<std::size_t>(truth.k); ++r)
    if (!truth.states[idx[r]]) return 0;
  return 1;
}

RunResult run_trial(const Environment& env, StrategyKind strategy, int iterations,
                    const std::optional<StoppingRule>& stopping, TrialStreams& streams,
                    const RoundObserver* observer) {
  if (iterations < 1) throw std::domain_error("run_trial: iterations must be >= 1");
  const std::size_t n = env.detectors.size();
  if (env.truth.size() != n)
    throw std::invalid_argument("run_trial: detectors/truth length mismatch");

  BeliefState beliefs = BeliefState::uniform(n);
  TsState ts = TsState::uniform_priors(n);
  RunResult result;
  result.accuracy.assign(iterations, 0.0);
  result.entropy.assign(iterations, 0.0);

  for (int t = 1; t <= iterations; ++t) {
    const std::vector<DetectorProfile> agent =
        inject_noise(env.detectors, env.noise_sigma, streams.noise);

    Assignment assign;
    std::vector<DetectorProfile> ts_sampled;
    switch (strategy) {
      case StrategyKind::GoldPanning:
        assign = gp_assign(beliefs, agent);
        break;
      case StrategyKind::HungarianIG:
        assign = hungarian_ig_assign(beliefs, agent);
        break;
      case StrategyKind::PSC:
        assign = psc_assign(n, streams.policy);
        break;
      case StrategyKind::ThompsonSampling:
        ts_sampled = ts_sample_profiles(ts, streams.policy);
        assign = hungarian_ig_assign(beliefs, ts_sampled);
        break;
    }

    // one uniform per item, in item order, from the shared observation stream
    ObservationVector obs;
    obs.outcomes.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      obs.outcomes[i] = static_cast<std::uint8_t>(
          sample_observation(env.truth.states[i], env.detectors[assign(i)], streams.obs));

    // profile used in each item's Bayes update: per-position for the
    // calibration-aware strategies, the pool average for information-agnostic
    // PSC, and this round's posterior sample for TS (which never sees the
    // calibration and conditions on its own hypothesis draw)
    std::vector<DetectorProfile> update_profiles(n);
    switch (strategy) {
      case StrategyKind::GoldPanning:
      case StrategyKind::HungarianIG:
        for (std::size_t i = 0; i < n; ++i) update_profiles[i] = agent[assign(i)];
        break;
      case StrategyKind::PSC: {
        const DetectorProfile avg = pool_average(agent);
        for (std::size_t i = 0; i < n; ++i) update_profiles[i] = avg;
        break;
      }
      case StrategyKind::ThompsonSampling:
        for (std::size_t i = 0; i < n; ++i)
          update_profiles[i] = ts_sampled[assign(i)];
        break;
    }

    BeliefState next = beliefs;
    next.round = t;
    for (std::size_t i = 0; i < n; ++i)
      next.beliefs[i] = clamp_belief(
          bayes_update(beliefs.beliefs[i], update_profiles[i], obs.outcomes[i]));

    if (strategy == StrategyKind::ThompsonSampling)
      ts = ts_update(std::move(ts), assign, obs, next);

    result.accuracy[t - 1] = static_cast<double>(accuracy_at_k(next, env.truth));
    result.entropy[t - 1] = next.total_entropy();

    if (observer) {
      const RoundContext ctx{t, beliefs, assign, update_profiles, obs, next};
      (*observer)(ctx);
    }
    beliefs = std::move(next);

    if (stopping && !result.converged_at) {
      bool stop = false;
      if (stopping->delta) {
        stop = true;
        for (double b : beliefs.beliefs)
          if (b > *stopping->delta && b < 1.0 - *stopping->delta) {
            stop = false;
            break;
          }
      }
      if (!stop && stopping->epsilon)
        stop = result.entropy[t - 1] < *stopping->epsilon;
      if (stop) {
        result.converged_at = t;
        for (int r = t; r < iterations; ++r) {
          result.accuracy[r] = result.accuracy[t - 1];
          result.entropy[r] = result.entropy[t - 1];
        }
        break;
      }
    }
  }
  return result;
}

RunResult run_trial(const EnvironmentSpec& spec, StrategyKind strategy, int iterations,
                    const std::optional<StoppingRule>& stopping, Rng& rng) {
  Environment env = generate_environment(spec, rng);
  TrialStreams streams{Rng(rng.next_u64()), Rng(rng.next_u64()), Rng(rng.next_u64())};
  return run_trial(env, strategy, iterations, stopping, streams);
}

namespace {

RunResult simulate_run_impl(const EnvironmentSpec& spec, StrategyKind strategy,
                            int run_index, std::uint64_t master_seed, int iterations,
                            const std::optional<StoppingRule>& stopping,
                            const std::vector<DetectorProfile>* file_profiles) {
  const auto run = static_cast<std::uint64_t>(run_index);
  Rng env_rng(derive_seed(master_seed, kEnvStream, run));
  const Environment env = generate_environment(spec, env_rng, file_profiles);
  TrialStreams streams{Rng(derive_seed(master_seed, strategy_tag(strategy), run)),
                       Rng(derive_seed(master_seed, kObsStream, run)),
                       Rng(derive_seed(master_seed, kNoiseStream, run))};
  return run_trial(env, strategy, iterations, stopping, streams);
}

// Ordered reduction over run index; identical regardless of how the per-run
// results were produced.
AggregateResult aggregate(const EnvironmentSpec& spec,
                          const std::vector<StrategyKind>& strategies,
                          const std::vector<std::vector<RunResult>>& per_run,
                          int iterations, int runs, std::uint64_t master_seed) {
  AggregateResult agg;
  agg.strategies = strategies;
  agg.iterations = iterations;
  agg.runs = runs;
  agg.master_seed = master_seed;
  agg.spec = spec;
  agg.series.resize(strategies.size());
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    StrategySeries& series = agg.series[s];
    series.mean_accuracy.assign(iterations, 0.0);
    series.std_error.assign(iterations, 0.0);
    series.mean_entropy.assign(iterations, 0.0);
    for (int t = 0; t < iterations; ++t) {
      double sum = 0.0, sumsq = 0.0, ent = 0.0;
      for (int r = 0; r < runs; ++r) {
        const double a = per_run[s][r].accuracy[t];
        sum += a;
        sumsq += a * a;
        ent += per_run[s][r].entropy[t];
      }
      const double nr = static_cast<double>(runs);
      series.mean_accuracy[t] = sum / nr;
      series.mean_entropy[t] = ent / nr;
      if (runs > 1) {
        const double var = std::max(0.0, (sumsq - sum * sum / nr) / (nr - 1.0));
        series.std_error[t] = std::sqrt(var / nr);
      }
    }
  }
  return agg;
}

void validate_experiment_args(const std::vector<StrategyKind>& strategies,
                              int iterations, int runs) {
  if (strategies.empty())
    throw std::invalid_argument("run_experiment: strategies must be non-empty");
  if (iterations < 1) throw std::domain_error("run_experiment: iterations >= 1");
  if (runs < 1) throw std::domain_error("run_experiment: runs >= 1");
}

}  // namespace

RunResult simulate_run(const EnvironmentSpec& spec, StrategyKind strategy,
                       int run_index, std::uint64_t master_seed, int iterations,
                       const std::optional<StoppingRule>& stopping) {
  return simulate_run_impl(spec, strategy, run_index, master_seed, iterations,
                           stopping, nullptr);
}

AggregateResult run_experiment(const EnvironmentSpec& spec,
                               const std::vector<StrategyKind>& strategies,
                               int iterations, int runs, std::uint64_t master_seed,
                               int parallelism,
                               const std::optional<StoppingRule>& stopping) {
  validate_experiment_args(strategies, iterations, runs);
  if (parallelism < 1) parallelism = 1;

  std::vector<DetectorProfile> file_profiles;
  const std::vector<DetectorProfile>* preloaded = nullptr;
  if (spec.detector_source.kind == DetectorSource::Kind::File) {
    file_profiles = load_profiles(spec.detector_source.file_path);
    preloaded = &file_profiles;
  }

  const std::size_t n_strategies = strategies.size();
  std::vector<std::vector<RunResult>> per_run(n_strategies);
  for (auto& v : per_run) v.resize(runs);

  const long long total = static_cast<long long>(n_strategies) * runs;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(parallelism)
#endif
  for (long long job = 0; job < total; ++job) {
    const std::size_t s = static_cast<std::size_t>(job / runs);
    const int r = static_cast<int>(job % runs);
    per_run[s][r] = simulate_run_impl(spec, strategies[s], r, master_seed,
                                      iterations, stopping, preloaded);
  }

  return aggregate(spec, strategies, per_run, iterations, runs, master_seed);
}

AggregateResult run_experiment_serial(const EnvironmentSpec& spec,
                                      const std::vector<StrategyKind>& strategies,
                                      int iterations, int runs,
                                      std::uint64_t master_seed,
                                      const std::optional<StoppingRule>& stopping) {
  validate_experiment_args(strategies, iterations, runs);

  std::vector<DetectorProfile> file_profiles;
  const std::vector<DetectorProfile>* preloaded = nullptr;
  if (spec.detector_source.kind == DetectorSource::Kind::File) {
    file_profiles = load_profiles(spec.detector_source.file_path);
    preloaded = &file_profiles;
  }

  std::vector<std::vector<RunResult>> per_run(strategies.size());
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    per_run[s].resize(runs);
    for (int r = 0; r < runs; ++r)
      per_run[s][r] = simulate_run_impl(spec, strategies[s], r, master_seed,
                                        iterations, stopping, preloaded);
  }
  return aggregate(spec, strategies, per_run, iterations, runs, master_seed);
}

std::vector<double> default_noise_grid() { return {0.0, 0.0051, 0.0255, 0.0510}; }

std::vector<double> default_concentration_grid() {
  std::vector<double> alphas;
  alphas.reserve(20);
  const double lo = std::log10(0.1), hi = std::log10(100.0);
  for (int i = 0; i < 20; ++i)
    alphas.push_back(std::pow(10.0, lo + (hi - lo) * i / 19.0));
  return alphas;
}

std::vector<NoiseSweepEntry> sweep_noise(const EnvironmentSpec& base,
                                         const std::vector<double>& sigmas,
                                         const std::vector<StrategyKind>& strategies,
                                         int iterations, int runs,
                                         std::uint64_t master_seed, int parallelism) {
  std::vector<NoiseSweepEntry> out;
  out.reserve(sigmas.size());
  for (double sigma : sigmas) {
    EnvironmentSpec spec = base;
    spec.noise_sigma = sigma;
    out.push_back({sigma, run_experiment(spec, strategies, iterations, runs,
                                         master_seed, parallelism)});
  }
  return out;
}

std::vector<ConcentrationSweepEntry> sweep_concentration(
    const EnvironmentSpec& base, const std::vector<double>& alphas,
    const std::vector<StrategyKind>& strategies, int iterations, int runs,
    std::uint64_t master_seed, int parallelism) {
  std::vector<ConcentrationSweepEntry> out;
  out.reserve(alphas.size());
  for (double alpha : alphas) {
    EnvironmentSpec spec = base;
    spec.detector_source = DetectorSource::beta(alpha);
    out.push_back({alpha, run_experiment(spec, strategies, iterations, runs,
                                         master_seed, parallelism)});
  }
  return out;
}

}  // namespace goldpan
