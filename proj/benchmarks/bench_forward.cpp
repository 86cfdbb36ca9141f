#include <benchmark/benchmark.h>

#include "gridlearn/beam.hpp"
#include "gridlearn/fem.hpp"
#include "gridlearn/mesh.hpp"
#include "gridlearn/priors.hpp"
#include "gridlearn/sde.hpp"

using namespace gridlearn;

static void BM_BeamForward(benchmark::State& state) {
  BeamConfig cfg;
  const std::vector<double> sensors{5.25, 5.75, 6.25, 6.75, 7.25, 7.75, 8.25, 8.75, 9.25, 9.75};
  BeamForward fwd(cfg, sensors);
  const UnknownState u = FiniteVector{Vector::Constant(5, 200.0)};
  const DiscretizationParam a = uniform_grid(static_cast<std::size_t>(state.range(0)), cfg.domain());
  for (auto _ : state) benchmark::DoNotOptimize(fwd.evaluate(u, a));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BeamForward)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_SdeForward(benchmark::State& state) {
  SdeConfig cfg;
  SdeForward fwd(cfg);
  Rng rng(1);
  const UnknownState u = sample_wiener(WienerPrior{cfg.representation}, rng);
  const DiscretizationParam a = uniform_grid(static_cast<std::size_t>(state.range(0)), cfg.domain());
  for (auto _ : state) benchmark::DoNotOptimize(fwd.evaluate(u, a));
}
BENCHMARK(BM_SdeForward)->Arg(24)->Arg(100)->Arg(1000);

static void BM_DensityMesh(benchmark::State& state) {
  FemConfig cfg;
  const DensityBased a{static_cast<std::size_t>(state.range(0)), {2.0, 1.0, 2.0, 1.0}};
  for (auto _ : state) benchmark::DoNotOptimize(density_mesh(a, cfg));
}
BENCHMARK(BM_DensityMesh)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_FemSolve(benchmark::State& state) {
  const Mesh mesh = density_mesh(DensityBased{static_cast<std::size_t>(state.range(0)), {1.0, 1.0, 1.0, 1.0}},
                                 FemConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(assemble_and_solve(mesh, {0.85, 0.85}));
}
BENCHMARK(BM_FemSolve)->Arg(100)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_FemForwardCached(benchmark::State& state) {
  FemForward fwd(FemConfig{});
  const DiscretizationParam a = DensityBased{100, {1.0, 1.0, 1.0, 1.0}};
  fwd.evaluate(PlanarPoint{0.5, 0.5}, a);
  for (auto _ : state) benchmark::DoNotOptimize(fwd.evaluate(PlanarPoint{0.85, 0.85}, a));
}
BENCHMARK(BM_FemForwardCached);
