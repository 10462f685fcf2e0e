#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "goldpan/rng.hpp"

namespace goldpan {

// One binary detector: P(output 1 | state 1) = tpr, P(output 1 | state 0) = fpr.
// Diagnosticity |tpr - fpr| is Youden's J; a dummy detector has tpr == fpr.
struct DetectorProfile {
  double tpr = 0.5;
  double fpr = 0.5;

  double diagnosticity() const { return tpr >= fpr ? tpr - fpr : fpr - tpr; }
  bool is_valid() const {
    return tpr >= 0.0 && tpr <= 1.0 && fpr >= 0.0 && fpr <= 1.0;
  }
};

// Posterior relevance probability per item.
struct BeliefState {
  std::vector<double> beliefs;
  int round = 0;

  static BeliefState uniform(std::size_t n_items);  // all entries 0.5, round 0
  double total_entropy() const;                     // bits
  std::size_t size() const { return beliefs.size(); }
};

// Hidden binary states; k = number of 1-entries.
struct GroundTruth {
  std::vector<std::uint8_t> states;
  int k = 0;

  std::size_t size() const { return states.size(); }
};

// Permutation mapping item i -> detector mapping[i].
struct Assignment {
  std::vector<std::size_t> mapping;

  std::size_t size() const { return mapping.size(); }
  std::size_t operator()(std::size_t item) const { return mapping[item]; }
  bool is_permutation() const;
};

// Binary outcomes of one round, indexed by item.
struct ObservationVector {
  std::vector<std::uint8_t> outcomes;

  std::size_t size() const { return outcomes.size(); }
};

// Square matrix of expected information gains, row = item, column = detector.
class GainMatrix {
 public:
  GainMatrix() = default;
  explicit GainMatrix(std::size_t n, double fill = 0.0) : n_(n), w_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return w_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> w_;
};

// H(p) = -p log2 p - (1-p) log2(1-p), with H(0) = H(1) = 0.
// Throws std::domain_error outside [0, 1].
double binary_entropy(double p);

// Pr(O = 1 | Z = z) = z*tpr + (1-z)*fpr
double likelihood(int z, const DetectorProfile& det);

// Bernoulli draw from likelihood(z, det); one uniform consumed.
int sample_observation(int z, const DetectorProfile& det, Rng& rng);

// Posterior after observing o through det. A zero denominator (impossible
// observation under a degenerate profile) returns b unchanged.
double bayes_update(double b, const DetectorProfile& det, int o);

// Keeps entropies finite after repeated certain updates.
double clamp_belief(double b);

// Expected information gain (bits) of testing an item with belief b on det:
//   H(fpr + b*(tpr-fpr)) - (b*H(tpr) + (1-b)*H(fpr))
// Non-negative, at most 1.
double info_gain(double b, const DetectorProfile& det);

// W[i][j] = info_gain(beliefs[i], detectors[j]); lengths must match.
GainMatrix gain_matrix(const BeliefState& beliefs,
                       const std::vector<DetectorProfile>& detectors);

}  // namespace goldpan
