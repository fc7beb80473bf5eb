#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "glueflow/builder.hpp"
#include "glueflow/construction.hpp"
#include "glueflow/verify.hpp"

namespace {

using namespace glueflow;

const ConstructionState& depth2() {
  static const ConstructionState state = [] {
    ConstructionConfig c;
    c.depth = 2;
    c.seed = 1;
    return run_construction(c);
  }();
  return state;
}

void BM_PsiApply(benchmark::State& st) {
  const PsiMap psi(static_cast<int>(st.range(0)), {0.7, -1.3});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (auto _ : st) {
    const Fiber v{0.7 + u(rng), -1.3 + u(rng)};
    benchmark::DoNotOptimize(psi.apply(v));
  }
}
BENCHMARK(BM_PsiApply)->Arg(1)->Arg(2)->Arg(3);

void BM_TravelTimeFold(benchmark::State& st) {
  const LevelParams& p = depth2().systems[1].level(1);
  for (auto _ : st) benchmark::DoNotOptimize(lambda2(p, p.w0));
}
BENCHMARK(BM_TravelTimeFold);

void BM_TravelTimeTwist(benchmark::State& st) {
  const LevelParams& p = depth2().systems[1].level(1);
  for (auto _ : st) benchmark::DoNotOptimize(lambda3(p, p.w0));
}
BENCHMARK(BM_TravelTimeTwist);

// One full period of the marked orbit of the top level.
void BM_PeriodicCycle(benchmark::State& st) {
  const int level = static_cast<int>(st.range(0));
  const DisplayedSystem& d = depth2().systems[level];
  const SpacePoint sigma = marked_point(d, level);
  const double T = d.level(level).T;
  for (auto _ : st) benchmark::DoNotOptimize(flow(d, sigma, T).end);
}
BENCHMARK(BM_PeriodicCycle)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_IsFlat(benchmark::State& st) {
  const DisplayedSystem& d = depth2().systems[1];
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> x(-d.N() + 0.5, d.N() - 0.5);
  std::uniform_real_distribution<double> f(-3.0, 3.0);
  std::vector<SpacePoint> points;
  while (points.size() < 256) {
    const SpacePoint s{x(rng), {f(rng), f(rng)}};
    const Location loc = locate(d, s);
    if (loc.member && !loc.ambiguous) points.push_back(s);
  }
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(is_flat(d, points[i++ % points.size()]).flat);
}
BENCHMARK(BM_IsFlat)->Unit(benchmark::kMicrosecond);

void BM_ConstructDepth2(benchmark::State& st) {
  for (auto _ : st) {
    ConstructionConfig c;
    c.depth = 2;
    c.seed = 1;
    benchmark::DoNotOptimize(run_construction(c).complete);
  }
}
BENCHMARK(BM_ConstructDepth2)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
