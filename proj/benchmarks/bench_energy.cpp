#include <benchmark/benchmark.h>

#include "wfdelay/conserved.hpp"
#include "wfdelay/schild.hpp"

using namespace wfdelay;

namespace {

const SolutionPair& orbit() {
  static const SolutionPair s = [] {
    const SchildParams p = schild_solve(1.0, 1.0, 1.0, -1.0, 1.0);
    return schild_trajectories(p, 0.0, 4.0 * schild_period(p));
  }();
  return s;
}

void BM_EnergyPoint(benchmark::State& state) {
  const SolutionPair& s = orbit();
  const double t1 = s.domains[0].lo + 1.0, t2 = s.domains[1].lo + 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(energy(s, t1, t2));
}
BENCHMARK(BM_EnergyPoint)->Unit(benchmark::kMicrosecond);

void BM_EnergyDriftGrid(benchmark::State& state) {
  const SolutionPair& s = orbit();
  const int n = static_cast<int>(state.range(0));
  std::vector<double> g1, g2;
  for (int k = 0; k < n; ++k) {
    g1.push_back(s.domains[0].lo + (s.domains[0].hi - s.domains[0].lo) * k / (n - 1));
    g2.push_back(s.domains[1].lo + (s.domains[1].hi - s.domains[1].lo) * k / (n - 1));
  }
  for (auto _ : state) benchmark::DoNotOptimize(energy_drift(s, g1, g2));
}
BENCHMARK(BM_EnergyDriftGrid)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
