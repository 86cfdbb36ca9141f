#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gridlearn/beam.hpp"
#include "gridlearn/core.hpp"
#include "gridlearn/priors.hpp"
#include "gridlearn/samplers.hpp"

using namespace gridlearn;

namespace {

// Returns a fixed vector regardless of the input.
class ConstantForward final : public ForwardModel {
 public:
  explicit ConstantForward(Vector out) : out_(std::move(out)) {}
  Vector evaluate(const UnknownState&, const DiscretizationParam&) const override { return out_; }

 private:
  Vector out_;
};

ObservationModel make_obs(Vector data, double variance) {
  ObservationModel obs;
  for (Eigen::Index i = 0; i < data.size(); ++i) obs.sensors.push_back({static_cast<double>(i), 0.0});
  obs.noise = NoiseModel::isotropic(static_cast<std::size_t>(data.size()), variance);
  obs.data = std::move(data);
  return obs;
}

}  // namespace

TEST(GammaNorm, ZeroResidualIsZero) {
  EXPECT_EQ(gamma_norm_sq(Vector::Zero(3), NoiseModel(Vector::Constant(3, 0.7))), 0.0);
}

TEST(GammaNorm, UnitCase) {
  EXPECT_DOUBLE_EQ(gamma_norm_sq(Vector::Unit(2, 0), NoiseModel::isotropic(2, 1.0)), 1.0);
}

TEST(GammaNorm, ScaledByVariance) {
  Vector r(2);
  r << 0.2, 0.0;
  EXPECT_NEAR(gamma_norm_sq(r, NoiseModel::isotropic(2, 0.01)), 4.0, 1e-12);
}

TEST(GammaNorm, DimensionMismatchThrows) {
  EXPECT_THROW(gamma_norm_sq(Vector::Zero(3), NoiseModel::isotropic(2, 1.0)), ContractError);
}

TEST(NoiseModel, RejectsNonPositiveVariance) {
  Vector v(2);
  v << 1.0, 0.0;
  EXPECT_THROW(NoiseModel{v}, ContractError);
}

TEST(ObservationModel, ValidateChecksLengths) {
  auto obs = make_obs(Vector::Zero(3), 1.0);
  EXPECT_NO_THROW(obs.validate());
  obs.sensors.pop_back();
  EXPECT_THROW(obs.validate(), ContractError);
}

TEST(Potential, PerfectFitIsZero) {
  Vector y(2);
  y << 0.3, -1.2;
  ConstantForward fwd(y);
  EXPECT_EQ(potential(FiniteVector{Vector::Zero(1)}, GridBased{}, make_obs(y, 0.5), fwd), 0.0);
}

TEST(Potential, UnitResidualPair) {
  ConstantForward fwd(Vector::Ones(2));
  EXPECT_DOUBLE_EQ(potential(FiniteVector{Vector::Zero(1)}, GridBased{}, make_obs(Vector::Zero(2), 1.0), fwd),
                   1.0);
}

TEST(Potential, NonFiniteOutputIsInfiniteAndCounted) {
  Vector out = Vector::Zero(2);
  out[1] = std::numeric_limits<double>::quiet_NaN();
  ConstantForward fwd(out);
  FailureCounter counter;
  const double psi =
      potential(FiniteVector{Vector::Zero(1)}, GridBased{}, make_obs(Vector::Zero(2), 1.0), fwd, &counter);
  EXPECT_EQ(psi, kInfinity);
  EXPECT_EQ(counter.failures, 1u);

  Target target(make_obs(Vector::Zero(2), 1.0), fwd);
  EXPECT_EQ(target.evaluate(FiniteVector{Vector::Zero(1)}, GridBased{}).potential, kInfinity);
  EXPECT_EQ(target.solver_failures(), 1u);
  EXPECT_EQ(target.evaluations(), 1u);
}

TEST(Potential, NonNegativeAndZeroOnlyForZeroResidual) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    Vector out(4), y(4);
    for (int i = 0; i < 4; ++i) {
      out[i] = n(rng);
      y[i] = n(rng);
    }
    ConstantForward fwd(out);
    EXPECT_GT(potential(FiniteVector{Vector::Zero(1)}, GridBased{}, make_obs(y, 0.3), fwd), 0.0);
  }
}

TEST(Potential, InvariantUnderGridPermutation) {
  BeamConfig cfg;
  const std::vector<double> sensors{1.0, 3.5, 7.25};
  BeamForward fwd(cfg, sensors);
  const UnknownState u = FiniteVector{Vector::Constant(5, 200.0)};
  auto obs = make_obs(Vector::Zero(3), cfg.observation_variance);
  for (std::size_t i = 0; i < sensors.size(); ++i) obs.sensors[i] = {sensors[i], 0.0};

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.0, 10.0);
  GridBased grid;
  for (int i = 0; i < 40; ++i) grid.interior_points.push_back(pos(rng));
  const double psi = potential(u, grid, obs, fwd);
  for (int trial = 0; trial < 5; ++trial) {
    GridBased shuffled = grid;
    std::shuffle(shuffled.interior_points.begin(), shuffled.interior_points.end(), rng);
    EXPECT_EQ(potential(u, shuffled, obs, fwd), psi);
  }
}

TEST(ChainState, CachedPotentialMatchesRecomputation) {
  BeamConfig cfg;
  const std::vector<double> sensors{0.5, 2.5, 4.5, 6.5, 8.5};
  BeamForward fwd(cfg, sensors);
  YoungsModulusField truth = PiecewiseConstantModulus{Vector::Constant(5, 205.0)};
  ObservationModel obs = generate_beam_data(truth, sensors, cfg, 5, 200);
  Target target(obs, fwd);

  GaussianVectorPrior prior{Vector::Constant(5, 200.0), 25.0};
  auto state = make_chain_state(FiniteVector{prior.mean}, uniform_grid(20, cfg.domain()), target);
  SamplerConfig sc;
  sc.n_iterations = 300;
  sc.beta = 0.2;
  sc.seed = 4;
  DiscretizationKernels kernels;
  kernels.domain = cfg.domain();
  kernels.k_prior = make_poisson_k(20.0);
  const auto record = run_gibbs(std::move(state), sc, make_unknown_kernel(prior), kernels, target);

  const auto& fin = record.final_state;
  EXPECT_GT(fin.tallies.u.accepted + fin.tallies.relocation.accepted + fin.tallies.dimension.accepted, 0u);
  const double fresh = potential(fin.u, fin.a, obs, fwd);
  EXPECT_NEAR(fin.cached_potential, fresh, 1e-10 * std::max(1.0, std::abs(fresh)));
  for (const auto& s : record.samples) {
    const double p = potential(s.u, s.a, obs, fwd);
    EXPECT_NEAR(s.potential, p, 1e-10 * std::max(1.0, std::abs(p)));
  }
}

TEST(GridField, LinearInterpolationAndClampedEnds) {
  GridField f{UniformGrid{0.0, 0.5, 3}, Vector(3)};
  f.values << 1.0, 3.0, 2.0;
  EXPECT_DOUBLE_EQ(f.at(0.25), 2.0);
  EXPECT_DOUBLE_EQ(f.at(0.75), 2.5);
  EXPECT_DOUBLE_EQ(f.at(-1.0), 1.0);
  EXPECT_DOUBLE_EQ(f.at(5.0), 2.0);
}

TEST(Coefficients, PlanarPointHasNone) {
  UnknownState u = PlanarPoint{0.2, 0.3};
  EXPECT_THROW(coefficients(u), ContractError);
}
