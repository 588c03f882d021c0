#include <benchmark/benchmark.h>

#include <random>

#include "wfdelay/delayfields.hpp"
#include "wfdelay/schild.hpp"

using namespace wfdelay;

namespace {

const SchildParams& orbit() {
  static const SchildParams p = schild_solve(1.0, 1.0, 1.0, -1.0, 1.0);
  return p;
}

void BM_DelayOnSchildOrbit(benchmark::State& state) {
  const SchildParams& p = orbit();
  const SolutionPair s = schild_trajectories(p, -20.0, 20.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> ts(256);
  for (double& t : ts) t = u(rng);
  std::size_t k = 0;
  for (auto _ : state) {
    const double t = ts[k++ % ts.size()];
    benchmark::DoNotOptimize(delay_time(s.lines[1], t, s.lines[0].position(t), Sign::retarded));
  }
}
BENCHMARK(BM_DelayOnSchildOrbit);

void BM_LienardWiechert(benchmark::State& state) {
  const SolutionPair s = schild_trajectories(orbit(), -20.0, 20.0);
  const Vec3 x(2.0, 1.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(lienard_wiechert_field(s.lines[1], -1.0, 0.3, x, Sign::advanced));
}
BENCHMARK(BM_LienardWiechert);

void BM_SchildSolve(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(schild_solve(1.0, 1.0, 1.0, -1.0, 1.0));
}
BENCHMARK(BM_SchildSolve);

}  // namespace

BENCHMARK_MAIN();
