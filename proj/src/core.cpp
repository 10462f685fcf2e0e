#include "goldpan/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace goldpan {

BeliefState BeliefState::uniform(std::size_t n_items) {
  BeliefState s;
  s.beliefs.assign(n_items, 0.5);
  s.round = 0;
  return s;
}

double BeliefState::total_entropy() const {
  double total = 0.0;
  for (double b : beliefs) total += binary_entropy(b);
  return total;
}

bool Assignment::is_permutation() const {
  std::vector<char> seen(mapping.size(), 0);
  for (std::size_t j : mapping) {
    if (j >= mapping.size() || seen[j]) return false;
    seen[j] = 1;
  }
  return true;
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("binary_entropy: p outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;  // 0*log 0 = 0 convention
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double likelihood(int z, const DetectorProfile& det) {
  return z ? det.tpr : det.fpr;
}

int sample_observation(int z, const DetectorProfile& det, Rng& rng) {
  return rng.uniform() < likelihood(z, det) ? 1 : 0;
}

double bayes_update(double b, const DetectorProfile& det, int o) {
  const double l1 = o ? det.tpr : 1.0 - det.tpr;
  const double l0 = o ? det.fpr : 1.0 - det.fpr;
  const double denom = b * l1 + (1.0 - b) * l0;
  if (denom <= 0.0) return b;
  return b * l1 / denom;
}

double clamp_belief(double b) {
  constexpr double kLo = 1e-12;
  constexpr double kHi = 1.0 - 1e-12;
  return std::min(kHi, std::max(kLo, b));
}

double info_gain(double b, const DetectorProfile& det) {
  const double delta = det.tpr - det.fpr;
  // marginal Pr(O = 1) under belief b; clamp rounding spill at the edges
  const double marginal = std::min(1.0, std::max(0.0, det.fpr + b * delta));
  const double conditional =
      b * binary_entropy(det.tpr) + (1.0 - b) * binary_entropy(det.fpr);
  return std::max(0.0, binary_entropy(marginal) - conditional);
}

GainMatrix gain_matrix(const BeliefState& beliefs,
                       const std::vector<DetectorProfile>& detectors) {
  if (beliefs.size() != detectors.size())
    throw std::invalid_argument("gain_matrix: beliefs/detectors length mismatch");
  const std::size_t n = beliefs.size();
  GainMatrix w(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      w(i, j) = info_gain(beliefs.beliefs[i], detectors[j]);
  return w;
}

}  // namespace goldpan
