#include "goldpan/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace goldpan {

namespace {

double weight_of(const GainMatrix& w, const std::vector<std::size_t>& perm) {
  double total = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) total += w(i, perm[i]);
  return total;
}

}  // namespace

MatchResult hungarian_solve(const GainMatrix& w) {
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(w(i, j)))
        throw std::domain_error("hungarian_solve: non-finite entry");

  if (n == 0) return {};

  // Shortest augmenting path with row/column potentials on cost = -w.
  // 1-based arrays; p[j] is the row matched to column j, column 0 is virtual.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      std::size_t j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -w(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  MatchResult result;
  result.assignment.mapping.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) result.assignment.mapping[p[j] - 1] = j - 1;
  result.total_weight = weight_of(w, result.assignment.mapping);
  return result;
}

MatchResult brute_force_match(const GainMatrix& w) {
  const std::size_t n = w.size();
  if (n > 10) throw std::length_error("brute_force_match: n > 10");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(w(i, j)))
        throw std::domain_error("brute_force_match: non-finite entry");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  MatchResult best;
  best.assignment.mapping = perm;
  best.total_weight = weight_of(w, perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double total = weight_of(w, perm);
    if (total > best.total_weight) {
      best.total_weight = total;
      best.assignment.mapping = perm;
    }
  }
  return best;
}

bool is_anti_monge(const GainMatrix& w, double tol) {
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = j + 1; l < n; ++l)
          if (w(i, j) + w(k, l) < w(i, l) + w(k, j) - tol) return false;
  return true;
}

}  // namespace goldpan
