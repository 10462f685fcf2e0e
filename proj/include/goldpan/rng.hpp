#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace goldpan {

// 64-bit finalizing mix (splitmix64). Stable across platforms and versions;
// the seed-derivation scheme below is part of the reproducibility contract.
constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Stream seed for (master_seed, stream_tag, index):
//   mix64(mix64(mix64(master) ^ stream_tag) + index * golden_gamma)
// Distinct tags give statistically independent streams; documented in README.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_tag,
                                 std::uint64_t index) {
  return mix64(mix64(mix64(master) ^ stream_tag) + index * kGoldenGamma);
}

// Counter-based splitmix64 generator with explicit distribution code so that
// sequences are bit-identical everywhere (libstdc++/libc++ distributions are
// not portable). Cheap to construct; never shared between workers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  // uniform double in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased integer in [0, n)
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::domain_error("Rng::uniform_below: n must be positive");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;  // multiple of n
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller, one value per call (no cached spare, keeps replay exact)
  double normal(double mean, double stddev) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Marsaglia-Tsang for shape >= 1, with the boost transform below 1
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::domain_error("Rng::gamma: shape must be positive");
    if (shape < 1.0) {
      const double u = 1.0 - uniform();  // (0, 1]
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal(0.0, 1.0);
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    for (;;) {
      const double ga = gamma(a);
      const double gb = gamma(b);
      const double sum = ga + gb;
      if (sum > 0.0) return ga / sum;
    }
  }

  // in-place Fisher-Yates
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // uniform k-subset of {0..n-1} via partial Fisher-Yates; returned unsorted
  std::vector<std::size_t> sample_subset(std::size_t n, std::size_t k) {
    if (k > n) throw std::domain_error("Rng::sample_subset: k exceeds n");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(uniform_below(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  std::uint64_t state_;
};

}  // namespace goldpan
