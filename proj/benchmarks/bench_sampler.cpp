#include <benchmark/benchmark.h>

#include "gridlearn/beam.hpp"
#include "gridlearn/priors.hpp"
#include "gridlearn/samplers.hpp"

using namespace gridlearn;

static void BM_GpDraw(benchmark::State& state) {
  GaussianSampler sampler(GaussianProcessPrior{200.0, 50.0, 0.5, UniformGrid{0.0, 0.1, 101}});
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.draw(rng));
}
BENCHMARK(BM_GpDraw);

static void BM_GibbsIteration(benchmark::State& state) {
  BeamConfig cfg;
  const std::vector<double> sensors{0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5, 9.5};
  BeamForward fwd(cfg, sensors);
  const auto obs = generate_beam_data(PiecewiseConstantModulus{Vector::Constant(5, 205.0)}, sensors, cfg, 1);
  Target target(obs, fwd);
  const GaussianVectorPrior prior{Vector::Constant(5, 200.0), 25.0};
  DiscretizationKernels kernels;
  kernels.domain = cfg.domain();
  kernels.k_prior = make_poisson_k(60.0);
  SamplerConfig sc;
  sc.beta = 0.08;
  sc.n_iterations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto chain = make_chain_state(FiniteVector{prior.mean}, uniform_grid(60, cfg.domain()), target);
    benchmark::DoNotOptimize(run_gibbs(std::move(chain), sc, make_unknown_kernel(prior), kernels, target));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GibbsIteration)->Arg(1000)->Unit(benchmark::kMillisecond);
