#include "goldpan/strategies.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "goldpan/matching.hpp"

namespace goldpan {

namespace {

// indices 0..n-1 ordered by key descending, ties by lower index
std::vector<std::size_t> rank_descending(const std::vector<double>& key) {
  std::vector<std::size_t> idx(key.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  return idx;
}

}  // namespace

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::GoldPanning: return "GoldPanning";
    case StrategyKind::HungarianIG: return "HungarianIG";
    case StrategyKind::PSC: return "PSC";
    case StrategyKind::ThompsonSampling: return "ThompsonSampling";
  }
  throw std::logic_error("to_string: unknown StrategyKind");
}

std::optional<StrategyKind> strategy_from_string(std::string_view name) {
  if (name == "GoldPanning") return StrategyKind::GoldPanning;
  if (name == "HungarianIG") return StrategyKind::HungarianIG;
  if (name == "PSC") return StrategyKind::PSC;
  if (name == "ThompsonSampling") return StrategyKind::ThompsonSampling;
  return std::nullopt;
}

const std::vector<StrategyKind>& all_strategies() {
  static const std::vector<StrategyKind> kinds = {
      StrategyKind::GoldPanning, StrategyKind::HungarianIG, StrategyKind::PSC,
      StrategyKind::ThompsonSampling};
  return kinds;
}

TsState TsState::uniform_priors(std::size_t n_detectors) {
  TsState ts;
  ts.tpr_alpha.assign(n_detectors, 1.0);
  ts.tpr_beta.assign(n_detectors, 1.0);
  ts.fpr_alpha.assign(n_detectors, 1.0);
  ts.fpr_beta.assign(n_detectors, 1.0);
  return ts;
}

DetectorProfile TsState::posterior_mean(std::size_t j) const {
  return {tpr_alpha[j] / (tpr_alpha[j] + tpr_beta[j]),
          fpr_alpha[j] / (fpr_alpha[j] + fpr_beta[j])};
}

DetectorProfile TsState::sample(std::size_t j, Rng& rng) const {
  return {rng.beta(tpr_alpha[j], tpr_beta[j]), rng.beta(fpr_alpha[j], fpr_beta[j])};
}

std::vector<DetectorProfile> pad_detectors(std::vector<DetectorProfile> detectors,
                                           std::size_t n_items) {
  if (detectors.size() < n_items) {
    detectors.resize(n_items, DetectorProfile{0.5, 0.5});
    return detectors;
  }
  if (detectors.size() > n_items) {
    std::vector<double> diag(detectors.size());
    for (std::size_t j = 0; j < detectors.size(); ++j)
      diag[j] = detectors[j].diagnosticity();
    std::vector<std::size_t> keep = rank_descending(diag);
    keep.resize(n_items);
    std::sort(keep.begin(), keep.end());  // preserve original order
    std::vector<DetectorProfile> out;
    out.reserve(n_items);
    for (std::size_t j : keep) out.push_back(detectors[j]);
    return out;
  }
  return detectors;
}

Assignment gp_assign(const BeliefState& beliefs,
                     const std::vector<DetectorProfile>& detectors) {
  if (beliefs.size() != detectors.size())
    throw std::invalid_argument("gp_assign: beliefs/detectors length mismatch");
  const std::size_t n = beliefs.size();
  std::vector<double> entropy(n), diag(n);
  for (std::size_t i = 0; i < n; ++i) entropy[i] = binary_entropy(beliefs.beliefs[i]);
  for (std::size_t j = 0; j < n; ++j) diag[j] = detectors[j].diagnosticity();
  const std::vector<std::size_t> items = rank_descending(entropy);
  const std::vector<std::size_t> dets = rank_descending(diag);
  Assignment out;
  out.mapping.assign(n, 0);
  for (std::size_t r = 0; r < n; ++r) out.mapping[items[r]] = dets[r];
  return out;
}

Assignment hungarian_ig_assign(const BeliefState& beliefs,
                               const std::vector<DetectorProfile>& detectors) {
  return hungarian_solve(gain_matrix(beliefs, detectors)).assignment;
}

Assignment psc_assign(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("psc_assign: n must be >= 1");
  Assignment out;
  out.mapping.resize(n);
  std::iota(out.mapping.begin(), out.mapping.end(), 0);
  rng.shuffle(out.mapping);
  return out;
}

std::vector<DetectorProfile> ts_sample_profiles(const TsState& ts, Rng& rng) {
  std::vector<DetectorProfile> sampled(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) sampled[j] = ts.sample(j, rng);
  return sampled;
}

Assignment ts_assign(const BeliefState& beliefs, const TsState& ts, Rng& rng) {
  if (ts.size() != beliefs.size())
    throw std::invalid_argument("ts_assign: state does not cover all detectors");
  return hungarian_ig_assign(beliefs, ts_sample_profiles(ts, rng));
}

TsState ts_update(TsState ts, const Assignment& assignment,
                  const ObservationVector& obs, const BeliefState& beliefs) {
  if (assignment.size() != obs.size() || assignment.size() != beliefs.size())
    throw std::invalid_argument("ts_update: inconsistent lengths");
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const std::size_t j = assignment(i);
    const double b = beliefs.beliefs[i];
    if (obs.outcomes[i]) {
      ts.tpr_alpha[j] += b;
      ts.fpr_alpha[j] += 1.0 - b;
    } else {
      ts.tpr_beta[j] += b;
      ts.fpr_beta[j] += 1.0 - b;
    }
  }
  return ts;
}

DetectorProfile pool_average(const std::vector<DetectorProfile>& detectors) {
  if (detectors.empty())
    throw std::invalid_argument("pool_average: empty detector pool");
  double tpr = 0.0, fpr = 0.0;
  for (const auto& d : detectors) {
    tpr += d.tpr;
    fpr += d.fpr;
  }
  const double n = static_cast<double>(detectors.size());
  return {tpr / n, fpr / n};
}

}  // namespace goldpan
