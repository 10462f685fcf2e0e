#pragma once

#include "goldpan/core.hpp"

namespace goldpan {

struct MatchResult {
  Assignment assignment;
  double total_weight = 0.0;  // sum of W[i][assignment(i)]
};

// Exact maximum-weight assignment on a square matrix with finite entries,
// O(n^3) shortest-augmenting-path (Jonker-Volgenant potentials on negated
// weights). Among co-optimal permutations any one may be returned; the
// weight is unique. Throws std::domain_error on non-finite entries.
MatchResult hungarian_solve(const GainMatrix& w);

// Exhaustive oracle over all n! permutations; n must be <= 10.
MatchResult brute_force_match(const GainMatrix& w);

// True iff W[i][j] + W[k][l] >= W[i][l] + W[k][j] - tol for all i<k, j<l.
bool is_anti_monge(const GainMatrix& w, double tol = 1e-9);

}  // namespace goldpan
