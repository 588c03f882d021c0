#include <benchmark/benchmark.h>

#include "wfdelay/construction.hpp"
#include "wfdelay/schild.hpp"

using namespace wfdelay;

namespace {

void BM_ValidateSchildStrips(benchmark::State& state) {
  const InitialData d = schild_initial_data(schild_solve(1.0, 1.0, 1.0, -1.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(validate_initial_data(d, GuardParams{}));
}
BENCHMARK(BM_ValidateSchildStrips)->Unit(benchmark::kMillisecond);

// one half-step on each side
void BM_ConstructHalfSteps(benchmark::State& state) {
  const InitialData d = schild_initial_data(schild_solve(1.0, 1.0, 1.0, -1.0, 1.0));
  const Horizons h{std::min(d.t0[0], d.t0[1]), std::max(d.t1[0], d.t1[1])};
  for (auto _ : state) benchmark::DoNotOptimize(construct(d, GuardParams{}, h));
}
BENCHMARK(BM_ConstructHalfSteps)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
