// Benchmark: OpenMP-parallel Monte Carlo kernel vs the serial reference, with
// a bitwise equality check on everything the CSV would contain.
//
//   goldpan_bench [runs] [n_items] [iterations] [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "goldpan/simulation.hpp"

using namespace goldpan;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool identical(const AggregateResult& a, const AggregateResult& b) {
  if (a.series.size() != b.series.size()) return false;
  for (std::size_t s = 0; s < a.series.size(); ++s)
    for (int t = 0; t < a.iterations; ++t)
      if (a.series[s].mean_accuracy[t] != b.series[s].mean_accuracy[t] ||
          a.series[s].std_error[t] != b.series[s].std_error[t] ||
          a.series[s].mean_entropy[t] != b.series[s].mean_entropy[t])
        return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const int runs = argc > 1 ? std::atoi(argv[1]) : 500;
  const int n_items = argc > 2 ? std::atoi(argv[2]) : 50;
  const int iterations = argc > 3 ? std::atoi(argv[3]) : 20;
  const int threads = argc > 4 ? std::atoi(argv[4])
                               : static_cast<int>(std::thread::hardware_concurrency());

  EnvironmentSpec spec;
  spec.n_items = n_items;
  const std::vector<StrategyKind> strategies = {
      StrategyKind::GoldPanning, StrategyKind::HungarianIG, StrategyKind::PSC};
  const std::uint64_t seed = 20240915;

  std::printf("runs=%d n_items=%d iterations=%d threads=%d strategies=%zu\n", runs,
              n_items, iterations, threads, strategies.size());

  auto t0 = Clock::now();
  const AggregateResult serial =
      run_experiment_serial(spec, strategies, iterations, runs, seed);
  const double serial_s = seconds_since(t0);
  std::printf("serial reference : %8.3f s\n", serial_s);

  t0 = Clock::now();
  const AggregateResult parallel =
      run_experiment(spec, strategies, iterations, runs, seed, threads);
  const double parallel_s = seconds_since(t0);
  std::printf("openmp (%2d thr)  : %8.3f s   speedup %.2fx\n", threads, parallel_s,
              serial_s / parallel_s);

  if (!identical(serial, parallel)) {
    std::printf("MISMATCH: parallel kernel diverged from the serial reference\n");
    return 1;
  }
  std::printf("bitwise identical: yes\n");
  return 0;
}
