#include "gridlearn/beam.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gridlearn/priors.hpp"

namespace gridlearn {

void BeamConfig::validate() const {
  const double values[] = {length, width, thickness, poisson_ratio, shear_coefficient,
                           mollifier_width, observation_variance, modulus_scale,
                           displacement_scale};
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ContractError("beam parameters must be positive");
  }
  if (tip_mass < 0.0 || gravity < 0.0) throw ContractError("tip load must be nonnegative");
}

double modulus_at(const YoungsModulusField& field, double x, double length) {
  if (const auto* pc = std::get_if<PiecewiseConstantModulus>(&field)) {
    const auto n = pc->segment_values.size();
    auto seg = static_cast<Eigen::Index>(std::floor(x / length * static_cast<double>(n)));
    seg = std::clamp<Eigen::Index>(seg, 0, n - 1);
    return pc->segment_values[seg];
  }
  return std::get<ContinuousModulus>(field).field.at(x);
}

double moment_profile(double x, const BeamConfig& cfg) {
  return cfg.tip_load() * (cfg.length - x);
}

double timoshenko_tip_deflection(double modulus_gpa, const BeamConfig& cfg) {
  const double e = modulus_gpa * cfg.modulus_scale;
  const double g = e / (2.0 * (1.0 + cfg.poisson_ratio));
  const double p = cfg.tip_load();
  const double l = cfg.length;
  return p * l * l * l / (3.0 * e * cfg.inertia()) +
         p * l / (cfg.shear_coefficient * cfg.area() * g);
}

double BeamSolution::at(double x) const {
  if (nodes.empty()) return 0.0;
  if (x <= nodes.front()) return displacement.front();
  if (x >= nodes.back()) return displacement.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const auto j = static_cast<std::size_t>(it - nodes.begin());
  const double h = nodes[j] - nodes[j - 1];
  if (h <= 0.0) return displacement[j];
  const double w = (x - nodes[j - 1]) / h;
  return (1.0 - w) * displacement[j - 1] + w * displacement[j];
}

BeamSolution solve_beam(const YoungsModulusField& field, const GridBased& grid,
                        const BeamConfig& cfg) {
  BeamSolution sol;
  sol.nodes.reserve(grid.k() + 2);
  sol.nodes.push_back(0.0);
  sol.nodes.insert(sol.nodes.end(), grid.interior_points.begin(), grid.interior_points.end());
  std::sort(sol.nodes.begin() + 1, sol.nodes.end());
  sol.nodes.push_back(cfg.length);

  const std::size_t n = sol.nodes.size();
  sol.displacement.assign(n, 0.0);
  sol.rotation.assign(n, 0.0);
  sol.moment.assign(n, 0.0);

  const double kappa_a = cfg.shear_coefficient * cfg.area();
  const double inertia = cfg.inertia();
  const double p = cfg.tip_load();

  // Clamped root: z = phi = 0; the root carries moment P L and the shear
  // variable s = u/(2(1+r)) (phi - z') is fixed by kappa A s = -P.
  double z = 0.0;
  double phi = 0.0;
  double moment = p * cfg.length;
  const double shear = -p / kappa_a;
  sol.moment[0] = moment;

  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double h = sol.nodes[j + 1] - sol.nodes[j];
    const double e = modulus_at(field, sol.nodes[j], cfg.length) * cfg.modulus_scale;
    if (!(e > 0.0) || !std::isfinite(e)) {
      sol.ok = false;
      return sol;
    }
    const double g = e / (2.0 * (1.0 + cfg.poisson_ratio));
    const double dz = phi - shear / g;
    const double dphi = moment / (e * inertia);
    z += h * dz;
    phi += h * dphi;
    moment += h * kappa_a * shear;
    sol.displacement[j + 1] = z;
    sol.rotation[j + 1] = phi;
    sol.moment[j + 1] = moment;
  }
  return sol;
}

double mollifier_normalizer(double sensor, const BeamConfig& cfg) {
  const double d = cfg.mollifier_width;
  const double c = d * std::numbers::sqrt2;
  return d * std::sqrt(std::numbers::pi / 2.0) *
         (std::erf((cfg.length - sensor) / c) + std::erf(sensor / c));
}

Vector observe_beam(const BeamSolution& solution, const std::vector<double>& sensors,
                    const BeamConfig& cfg) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(sensors.size()));
  const double two_d2 = 2.0 * cfg.mollifier_width * cfg.mollifier_width;
  const auto& x = solution.nodes;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const double s = sensors[i];
    const double inv_gamma = 1.0 / mollifier_normalizer(s, cfg);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < x.size(); ++j) {
      const double d = s - x[j];
      const double w = d * d / two_d2;
      if (w > 745.0) continue;  // exp underflows to zero
      acc += solution.displacement[j] * std::exp(-w) * (x[j + 1] - x[j]);
    }
    out[static_cast<Eigen::Index>(i)] = acc * inv_gamma;
  }
  return out;
}

GridBased uniform_grid(std::size_t k, Interval domain) {
  GridBased g;
  g.interior_points.resize(k);
  const double h = domain.length() / static_cast<double>(k + 1);
  for (std::size_t i = 0; i < k; ++i) {
    g.interior_points[i] = domain.lower + h * static_cast<double>(i + 1);
  }
  return g;
}

Vector beam_reference_output(const YoungsModulusField& true_field,
                             const std::vector<double>& sensors, const BeamConfig& cfg,
                             std::size_t fine_k) {
  const auto sol = solve_beam(true_field, uniform_grid(fine_k, cfg.domain()), cfg);
  if (!sol.ok) throw ContractError("true modulus must be positive");
  return cfg.displacement_scale * observe_beam(sol, sensors, cfg);
}

ObservationModel generate_beam_data(const YoungsModulusField& true_field,
                                    const std::vector<double>& sensors, const BeamConfig& cfg,
                                    std::uint64_t seed, std::size_t fine_k) {
  ObservationModel obs;
  for (double s : sensors) {
    if (!cfg.domain().contains_open(s)) throw ContractError("beam sensor outside (0, L)");
    obs.sensors.push_back(Location{s, 0.0});
  }
  obs.data = beam_reference_output(true_field, sensors, cfg, fine_k);
  Rng rng(seed);
  const double sd = std::sqrt(cfg.observation_variance);
  for (Eigen::Index i = 0; i < obs.data.size(); ++i) obs.data[i] += sd * standard_normal(rng);
  obs.noise = NoiseModel::isotropic(sensors.size(), cfg.observation_variance);
  return obs;
}

YoungsModulusField to_modulus_field(const UnknownState& u) {
  if (const auto* v = std::get_if<FiniteVector>(&u)) return PiecewiseConstantModulus{v->values};
  if (const auto* f = std::get_if<GridField>(&u)) return ContinuousModulus{*f};
  throw ContractError("beam unknown must be a vector or a grid field");
}

BeamForward::BeamForward(BeamConfig cfg, std::vector<double> sensors)
    : cfg_(cfg), sensors_(std::move(sensors)) {
  cfg_.validate();
}

Vector BeamForward::evaluate(const UnknownState& u, const DiscretizationParam& a) const {
  const auto* grid = std::get_if<GridBased>(&a);
  if (!grid) throw ContractError("beam forward model needs a grid-based discretization");
  const auto sol = solve_beam(to_modulus_field(u), *grid, cfg_);
  if (!sol.ok) {
    return Vector::Constant(static_cast<Eigen::Index>(sensors_.size()),
                            std::numeric_limits<double>::quiet_NaN());
  }
  return cfg_.displacement_scale * observe_beam(sol, sensors_, cfg_);
}

}  // namespace gridlearn
