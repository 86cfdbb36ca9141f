// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/kernel_oracle.hpp"
#include "gridlearn/beam.hpp"
#include "gridlearn/diagnostics.hpp"
#include "gridlearn/harness/config.hpp"
#include "gridlearn/harness/scenario.hpp"
#include "gridlearn/priors.hpp"
#include "gridlearn/samplers.hpp"
#include "gridlearn/sde.hpp"

using namespace gridlearn;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d: %s  %s  [%s]\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(4);
  ss << x;
  return ss.str();
}

double summary_value(const ScenarioResult& r, const std::string& key) {
  for (const auto& [k, v] : r.summary) {
    if (k == key) return std::stod(v);
  }
  throw std::runtime_error("summary has no key " + key);
}

ScenarioConfig desk(ScenarioId id) {
  auto c = default_config(id);
  apply_desk_scale(c);
  c.sampler.seed = 1;
  return c;
}

ScenarioConfig continuous(Layout layout, bool baseline) {
  auto c = desk(ScenarioId::BeamContinuous);
  c.layout = layout;
  c.baseline = baseline;
  return c;
}

// Zero output against zero data, so Psi == 0 everywhere.
class ZeroForward final : public ForwardModel {
 public:
  Vector evaluate(const UnknownState&, const DiscretizationParam&) const override {
    return Vector::Zero(1);
  }
};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gridlearn_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

int main() {
  report(1, "beam tip deflection vs Timoshenko, k = 500", [] {
    const auto t0 = Clock::now();
    BeamConfig cfg;
    const auto sol = solve_beam(PiecewiseConstantModulus{Vector::Constant(5, 200.0)},
                                uniform_grid(500, cfg.domain()), cfg);
    const double exact = timoshenko_tip_deflection(200.0, cfg);
    const double rel = std::abs(sol.displacement.back() / exact - 1.0);
    const double t = seconds_since(t0);
    return Outcome{rel <= 0.01 && t < 1.0, "relative error " + fmt(rel) + " (<= 0.01), " + fmt(t) + " s (< 1)"};
  });

  report(2, "beam causality under downstream perturbation", [] {
    BeamConfig cfg;
    std::mt19937_64 rng(2);
    std::normal_distribution<double> noise(0.0, 10.0);
    std::uniform_real_distribution<double> pos(0.0, cfg.length);
    const UniformGrid rep{0.0, 0.1, 101};
    std::size_t compared = 0;
    for (int trial = 0; trial < 50; ++trial) {
      Vector base(101);
      for (Eigen::Index i = 0; i < base.size(); ++i) base[i] = 200.0 + noise(rng);
      const auto cut = static_cast<Eigen::Index>(5 + trial % 90);
      const double x_star = rep.at(static_cast<std::size_t>(cut));
      Vector perturbed = base;
      for (Eigen::Index i = cut + 1; i < base.size(); ++i) perturbed[i] += noise(rng);
      GridBased grid;
      for (int i = 0; i < 80; ++i) grid.interior_points.push_back(pos(rng));
      const auto a = solve_beam(ContinuousModulus{GridField{rep, base}}, grid, cfg);
      const auto b = solve_beam(ContinuousModulus{GridField{rep, perturbed}}, grid, cfg);
      for (std::size_t j = 0; j < a.nodes.size() && a.nodes[j] <= x_star; ++j, ++compared) {
        if (a.displacement[j] != b.displacement[j]) {
          return Outcome{false, "z differs at x = " + fmt(a.nodes[j]) + " <= x* = " + fmt(x_star)};
        }
      }
    }
    return Outcome{true, std::to_string(compared) + " upstream nodal values bit-identical over 50 trials"};
  });

  report(3, "beam grid concentration, left layout, N = 12000", [] {
    const auto t0 = Clock::now();
    const auto r = run_scenario(continuous(Layout::Left, false));
    const double t = seconds_since(t0);
    const auto& h = *r.histogram;
    double left = 0.0, right = 0.0;
    for (std::size_t j = 0; j < 5; ++j) left += h.mean_count[j] / 5.0;
    for (std::size_t j = 5; j < 10; ++j) right += h.mean_count[j] / 5.0;
    const auto m0 = h.modal_bucket(0), m9 = h.modal_bucket(9);
    const bool pass = left > right && m0 > m9 && t < 180.0;
    return Outcome{pass, "mean count [0,5] " + fmt(left) + " vs [5,10] " + fmt(right) + ", modal bucket (0,1) " +
                             h.bucket_label(m0) + " vs (9,10) " + h.bucket_label(m9) + ", " + fmt(t) + " s (< 180)"};
  });

  const auto adaptive_right = run_scenario(continuous(Layout::Right, false));
  report(4, "beam acceptance rates, right layout", [&] {
    const double u = adaptive_right.acceptance.u, a = adaptive_right.acceptance.a;
    const bool pass = std::abs(u - 0.27) <= 0.10 && std::abs(a - 0.20) <= 0.10;
    return Outcome{pass, "u " + fmt(u) + " (0.27 +- 0.10), a " + fmt(a) + " (0.20 +- 0.10)"};
  });

  report(5, "reconstruction error, adaptive vs fixed uniform grid", [&] {
    const auto baseline = run_scenario(continuous(Layout::Right, true));
    const auto& ea = adaptive_right.error.per_sensor;
    const auto& eb = baseline.error.per_sensor;
    Eigen::Index better = 0;
    for (Eigen::Index i = 0; i < ea.size(); ++i) better += ea[i] < eb[i] ? 1 : 0;
    const double frac = static_cast<double>(better) / static_cast<double>(ea.size());
    return Outcome{frac >= 0.7, "adaptive lower at " + std::to_string(better) + "/" + std::to_string(ea.size()) +
                                    " sensors (>= 70%), total " + fmt(adaptive_right.error.total) + " vs " +
                                    fmt(baseline.error.total)};
  });

  std::vector<ScenarioResult> sde_chains;
  report(6, "SDE blow-up on uniform grid and adaptive band coverage", [&] {
    SdeConfig cfg;
    SdeForward fwd(cfg);
    const auto grid = uniform_grid(24, cfg.domain());
    Rng rng(6);
    int blowups = 0;
    for (int i = 0; i < 100; ++i) {
      if (fwd.evaluate(sample_wiener(WienerPrior{cfg.representation}, rng), grid).hasNaN()) ++blowups;
    }
    const auto c = desk(ScenarioId::Sde);
    sde_chains = run_chains(c, c.chains, scratch("sde"));
    const auto pooled = pooled_prediction_bands(sde_chains);
    const double coverage = band_coverage(pooled.bands, sde_chains.front().problem.reference_output);
    const bool pass = blowups >= 1 && coverage >= 0.8;
    return Outcome{pass, std::to_string(blowups) + "/100 prior paths blow up (>= 1), " +
                             std::to_string(sde_chains.size()) + "-chain 5-95% band covers truth at " + fmt(coverage) +
                             " of times (>= 0.8)"};
  });

  report(7, "SDE grid fraction in the observed window", [&] {
    if (sde_chains.empty()) return Outcome{false, "SDE chains unavailable"};
    double fraction = 0.0;
    for (const auto& r : sde_chains) fraction += summary_value(r, "observed_window_fraction");
    fraction /= static_cast<double>(sde_chains.size());
    return Outcome{fraction >= 0.75, "mean fraction in [0, 4.8] " + fmt(fraction) + " (>= 0.75)"};
  });

  auto fem_config = [](bool baseline) {
    auto c = default_config(ScenarioId::SourceDetection);
    c.sampler.n_iterations = 2000;
    c.sampler.seed = 1;
    c.baseline = baseline;
    return c;
  };
  std::optional<ScenarioResult> fem_adaptive;
  report(8, "FEM source recovery and mesh concentration, N = 2000", [&] {
    const auto t0 = Clock::now();
    fem_adaptive = run_scenario(fem_config(false));
    const double t = seconds_since(t0);
    const double dist = summary_value(*fem_adaptive, "posterior_mean_distance");
    const double ratio = summary_value(*fem_adaptive, "final_density_ratio");
    const bool pass = dist <= 0.05 && ratio >= 2.0 && t < 300.0;
    return Outcome{pass, "posterior mean distance " + fmt(dist) + " (<= 0.05), node density ratio " + fmt(ratio) +
                             " (>= 2), " + fmt(t) + " s (< 300)"};
  });

  report(9, "FEM pushforward error, adaptive vs fixed uniform mesh", [&] {
    if (!fem_adaptive) return Outcome{false, "adaptive run unavailable"};
    const auto baseline = run_scenario(fem_config(true));
    const double ea = summary_value(*fem_adaptive, "pushforward_mean_error");
    const double eb = summary_value(baseline, "pushforward_mean_error");
    return Outcome{ea <= eb, "mean sensor error " + fmt(ea) + " vs " + fmt(eb)};
  });

  report(10, "posterior TV distance vs surrogate error", [] {
    const auto t0 = Clock::now();
    const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
    const auto sweep = perturbation_tv_sweep(eps);
    const double t = seconds_since(t0);
    bool monotone = true;
    double lo = kInfinity, hi = 0.0;
    std::string values;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      if (i > 0 && !(sweep.distance[i] < sweep.distance[i - 1])) monotone = false;
      const double r = sweep.distance[i] / eps[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      values += (i ? ", " : "") + fmt(sweep.distance[i]);
    }
    // Bounded ratio: d/eps varies by at most a factor of two over the sweep.
    const bool pass = monotone && hi <= 2.0 * lo && t < 10.0;
    return Outcome{pass, "d_TV = {" + values + "}, d/eps in [" + fmt(lo) + ", " + fmt(hi) + "], " + fmt(t) + " s (< 10)"};
  });

  report(11, "kernel stationarity on the enumerated toy target", [] {
    double worst = 0.0;
    for (unsigned seed = 1; seed <= 20; ++seed) {
      const auto r = oracle::stationarity_residuals(oracle::make_toy(seed));
      worst = std::max({worst, r.pcn, r.relocation, r.birth_death});
    }
    return Outcome{worst <= 1e-10, "max |pi P - pi| = " + fmt(worst) + " (<= 1e-10) over 20 targets"};
  });

  report(12, "pCN preserves the prior when the potential vanishes", [] {
    ZeroForward fwd;
    ObservationModel obs;
    obs.sensors = {{0.0, 0.0}};
    obs.data = Vector::Zero(1);
    obs.noise = NoiseModel::isotropic(1, 1.0);
    Target target(obs, fwd);
    const GaussianProcessPrior spec{200.0, 50.0, 0.5, UniformGrid{0.0, 0.1, 101}};
    GaussianSampler sampler(spec);
    Rng init(12);
    SamplerConfig sc;
    sc.beta = 0.9;
    sc.n_iterations = 10000;
    sc.thin = 1;
    sc.seed = 12;
    sc.adapt_discretization = false;
    const auto rec = run_gibbs(make_chain_state(sampler.draw(init), GridBased{}, target), sc,
                               make_unknown_kernel(spec), {}, target);
    Rng rng(1212);
    std::vector<UnknownState> direct;
    for (int i = 0; i < 10000; ++i) direct.push_back(sampler.draw(rng));
    double worst = 0.0;
    std::string values;
    for (Eigen::Index j : {20, 50, 80}) {
      std::vector<double> a, b;
      for (std::size_t i = 1; i < rec.samples.size(); ++i) a.push_back(coefficients(rec.samples[i].u)[j]);
      for (const auto& d : direct) b.push_back(coefficients(d)[j]);
      const double ks = ks_distance(a, b);
      worst = std::max(worst, ks);
      values += (values.empty() ? "" : ", ") + fmt(ks);
    }
    return Outcome{worst < 0.05, "KS at x = 2, 5, 8: " + values + " (< 0.05)"};
  });

  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ALL PASS" : "SOME FAIL", failures);
  return failures == 0 ? 0 : 1;
}
