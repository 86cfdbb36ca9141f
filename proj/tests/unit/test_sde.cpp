#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gridlearn/beam.hpp"
#include "gridlearn/priors.hpp"
#include "gridlearn/sde.hpp"

using namespace gridlearn;

namespace {

GridField wiener_draw(std::uint64_t seed, const SdeConfig& cfg) {
  Rng rng(seed);
  return sample_wiener(WienerPrior{cfg.representation}, rng);
}

GridBased random_grid(std::size_t k, unsigned seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(lo, hi);
  GridBased g;
  for (std::size_t i = 0; i < k; ++i) g.interior_points.push_back(pos(rng));
  return g;
}

}  // namespace

TEST(Sde, DriftValues) {
  EXPECT_EQ(double_well_drift(0.0), 0.0);
  EXPECT_EQ(double_well_drift(1.0), 0.0);
  EXPECT_EQ(double_well_drift(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(double_well_drift(2.0), -12.0);
  EXPECT_DOUBLE_EQ(double_well_drift(0.5), 10.0 * 0.5 * 0.75 / 1.25);
  EXPECT_DOUBLE_EQ(double_well_drift(-0.5), -double_well_drift(0.5));
}

TEST(Sde, WithoutDriftPathFollowsInputIncrements) {
  SdeConfig cfg;
  cfg.drift_enabled = false;
  const auto u = wiener_draw(3, cfg);
  const auto path = euler_maruyama(u, random_grid(80, 2, cfg.t_start, cfg.horizon), cfg);
  ASSERT_FALSE(path.diverged);
  const double u0 = u.at(cfg.t_start);
  for (std::size_t j = 0; j < path.nodes.size(); ++j) {
    EXPECT_NEAR(path.values[j], u.at(path.nodes[j]) - u0, 1e-12);
  }
  for (double t = cfg.t_start; t < cfg.horizon; t += 0.173) EXPECT_NEAR(path.at(t), u.at(t) - u0, 1e-12);
}

TEST(Sde, ZeroInputStaysAtRest) {
  SdeConfig cfg;
  const GridField u{cfg.representation, Vector::Zero(static_cast<Eigen::Index>(cfg.representation.size))};
  const auto path = euler_maruyama(u, uniform_grid(40, cfg.domain()), cfg);
  for (double z : path.values) EXPECT_EQ(z, 0.0);
  EXPECT_EQ(observe_sde(path, cfg.observation_times), Vector::Zero(24));
}

TEST(Sde, PathStartsAtZeroOnTheFixedFirstNode) {
  SdeConfig cfg;
  const auto path = euler_maruyama(wiener_draw(4, cfg), uniform_grid(100, cfg.domain()), cfg);
  EXPECT_EQ(path.nodes.front(), cfg.t_start);
  EXPECT_EQ(path.values.front(), 0.0);
  EXPECT_EQ(path.nodes.back(), cfg.horizon);
}

TEST(Sde, CoarseUniformGridBlowsUpForSomePriorPaths) {
  SdeConfig cfg;
  SdeForward fwd(cfg);
  const auto grid = uniform_grid(24, cfg.domain());
  int blowups = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    if (fwd.evaluate(wiener_draw(s, cfg), grid).hasNaN()) ++blowups;
  }
  EXPECT_GE(blowups, 1);
}

TEST(Sde, DivergenceBoundFlagsBlowUp) {
  SdeConfig cfg;
  const GridField u{cfg.representation, Vector::Constant(static_cast<Eigen::Index>(cfg.representation.size), 0.0)};
  GridField kick = u;
  kick.values[10] = 5.0;  // jump at t = 1 drives z to 5, where h f(z) overshoots
  GridBased grid;
  grid.interior_points = {0.95, 1.0, 3.0, 6.0};
  const auto path = euler_maruyama(kick, grid, cfg);
  EXPECT_TRUE(path.diverged);
  EXPECT_TRUE(observe_sde(path, cfg.observation_times).hasNaN());
}

TEST(Sde, OutputIgnoresInputAndGridBeyondLastObservation) {
  SdeConfig cfg;
  SdeForward fwd(cfg);
  const double last = cfg.observation_times.back();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = wiener_draw(100 + static_cast<std::uint64_t>(trial), cfg);
    auto grid = random_grid(60, static_cast<unsigned>(trial), cfg.t_start, last);
    const Vector ref = fwd.evaluate(u, grid);
    GridField u2 = u;
    for (std::size_t i = 0; i < cfg.representation.size; ++i) {
      if (cfg.representation.at(i) > last + 1e-9) u2.values[static_cast<Eigen::Index>(i)] += 3.0 * noise(rng);
    }
    auto grid2 = grid;
    const auto extra = random_grid(30, 50 + static_cast<unsigned>(trial), last + 1e-6, cfg.horizon);
    grid2.interior_points.insert(grid2.interior_points.end(), extra.interior_points.begin(),
                                 extra.interior_points.end());
    const Vector out = fwd.evaluate(u2, grid2);
    for (Eigen::Index i = 0; i < ref.size(); ++i) {
      if (std::isnan(ref[i])) {
        EXPECT_TRUE(std::isnan(out[i]));
      } else {
        EXPECT_EQ(out[i], ref[i]);
      }
    }
  }
}

TEST(Sde, RefinementConverges) {
  SdeConfig cfg;
  SdeForward fwd(cfg);
  double previous = kInfinity;
  for (std::size_t k : {50, 100, 200}) {
    double err = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto u = wiener_draw(200 + s, cfg);
      const Vector ref = fwd.evaluate(u, uniform_grid(6400, cfg.domain()));
      err += (fwd.evaluate(u, uniform_grid(k, cfg.domain())) - ref).cwiseAbs().maxCoeff();
    }
    EXPECT_LT(err, previous) << k;
    previous = err;
  }
}

TEST(SdeData, ReproducibleAndNoiseCalibrated) {
  SdeConfig cfg;
  const auto a = generate_sde_data(9, cfg);
  const auto b = generate_sde_data(9, cfg);
  EXPECT_EQ(a.obs.data, b.obs.data);
  EXPECT_EQ(a.true_path_input.values, b.true_path_input.values);
  EXPECT_EQ(a.obs.sensors.size(), 24u);

  // Psi at the noise-free output: mean of chi^2_24 / 2 over many seeds.
  const int seeds = 200;
  double total = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const auto d = generate_sde_data(static_cast<std::uint64_t>(1000 + s), cfg);
    total += 0.5 * gamma_norm_sq(d.obs.data - d.truth_output, d.obs.noise);
  }
  EXPECT_NEAR(total / seeds, 12.0, 4.0 * std::sqrt(12.0 / seeds));
}

TEST(SdeConfig, RejectsBadObservationTimes) {
  SdeConfig cfg;
  cfg.observation_times = {0.5, 0.4};
  EXPECT_THROW(cfg.validate(), ContractError);
  cfg.observation_times = {0.5, 10.0};
  EXPECT_THROW(cfg.validate(), ContractError);
}
