#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "goldpan/core.hpp"
#include "goldpan/rng.hpp"

namespace goldpan {

// Per-round assignment policies. The serialized names below appear in config
// files and CSV output and are stable.
enum class StrategyKind { GoldPanning, HungarianIG, PSC, ThompsonSampling };

std::string to_string(StrategyKind kind);
std::optional<StrategyKind> strategy_from_string(std::string_view name);
const std::vector<StrategyKind>& all_strategies();

// Beta posteriors over each detector's (tpr, fpr), Beta(1,1) priors.
struct TsState {
  std::vector<double> tpr_alpha, tpr_beta;
  std::vector<double> fpr_alpha, fpr_beta;

  static TsState uniform_priors(std::size_t n_detectors);
  std::size_t size() const { return tpr_alpha.size(); }
  DetectorProfile posterior_mean(std::size_t j) const;
  DetectorProfile sample(std::size_t j, Rng& rng) const;
};

// Equalizes detector and item counts: appends tpr = fpr = 0.5 dummies when
// short, keeps the most diagnostic detectors (ties by lower index, original
// order preserved) when long.
std::vector<DetectorProfile> pad_detectors(std::vector<DetectorProfile> detectors,
                                           std::size_t n_items);

// Greedy rank pairing: items by entropy descending, detectors by
// diagnosticity descending, ties by lower index. O(N log N).
Assignment gp_assign(const BeliefState& beliefs,
                     const std::vector<DetectorProfile>& detectors);

// Exact argmax of total expected information gain (gain_matrix + Hungarian).
Assignment hungarian_ig_assign(const BeliefState& beliefs,
                               const std::vector<DetectorProfile>& detectors);

// Uniformly random permutation (Fisher-Yates).
Assignment psc_assign(std::size_t n, Rng& rng);

// One profile per detector drawn from the Beta posteriors.
std::vector<DetectorProfile> ts_sample_profiles(const TsState& ts, Rng& rng);

// Samples one profile per detector from the Beta posteriors and returns the
// Hungarian-optimal assignment for the sampled gain matrix.
Assignment ts_assign(const BeliefState& beliefs, const TsState& ts, Rng& rng);

// Expected-sufficient-statistics update: item i tested by detector j with
// posterior belief b contributes b to the tpr Beta and (1-b) to the fpr Beta,
// success/failure chosen by the observed outcome.
TsState ts_update(TsState ts, const Assignment& assignment,
                  const ObservationVector& obs, const BeliefState& beliefs);

// Arithmetic mean of tpr and fpr over a detector pool.
DetectorProfile pool_average(const std::vector<DetectorProfile>& detectors);

}  // namespace goldpan
