#include "gridlearn/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridlearn/priors.hpp"

namespace gridlearn {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> SdeConfig::default_observation_times() {
  std::vector<double> t(24);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.2 * static_cast<double>(i + 1);
  return t;
}

void SdeConfig::validate() const {
  if (!(t_start >= 0.0 && horizon > t_start)) throw ContractError("SDE requires 0 <= t_0 < T");
  for (std::size_t i = 0; i < observation_times.size(); ++i) {
    const double t = observation_times[i];
    if (!(t > 0.0 && t < horizon)) throw ContractError("observation time outside (0, T)");
    if (i > 0 && !(t > observation_times[i - 1])) {
      throw ContractError("observation times must be strictly increasing");
    }
  }
  if (!(noise_sd > 0.0)) throw ContractError("SDE noise level must be positive");
  if (representation.start != 0.0 || representation.back() < horizon - 1e-9) {
    throw ContractError("representation grid must cover [0, T]");
  }
  if (!(divergence_bound > 0.0)) throw ContractError("divergence bound must be positive");
}

double double_well_drift(double z) {
  return 10.0 * z * (1.0 - z * z) / (1.0 + z * z);
}

double PathSolution::at(double t) const {
  if (diverged || nodes.empty() || t < nodes.front() || t > reach) return kNaN;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
  const auto j = static_cast<std::size_t>(it - nodes.begin()) - 1;
  if (t == nodes[j]) return values[j];
  const double drift = drift_enabled ? double_well_drift(values[j]) : 0.0;
  const double z = values[j] + (t - nodes[j]) * drift + input.at(t) - input.at(nodes[j]);
  return std::isfinite(z) && std::abs(z) <= divergence_bound ? z : kNaN;
}

PathSolution euler_maruyama_on_nodes(const GridField& u, std::vector<double> nodes,
                                     const SdeConfig& cfg, double stop_time) {
  PathSolution path;
  path.input = u;
  path.drift_enabled = cfg.drift_enabled;
  path.divergence_bound = cfg.divergence_bound;
  if (nodes.empty()) return path;
  path.reach = std::min(stop_time, nodes.back());

  std::size_t last = 0;
  while (last + 1 < nodes.size() && nodes[last + 1] <= path.reach) ++last;
  nodes.resize(last + 1);
  path.nodes = std::move(nodes);
  path.values.assign(path.nodes.size(), 0.0);

  double z = 0.0;
  double u_prev = u.at(path.nodes[0]);
  for (std::size_t j = 0; j < last; ++j) {
    const double h = path.nodes[j + 1] - path.nodes[j];
    const double u_next = u.at(path.nodes[j + 1]);
    const double drift = cfg.drift_enabled ? double_well_drift(z) : 0.0;
    z = z + h * drift + (u_next - u_prev);
    u_prev = u_next;
    if (!std::isfinite(z) || std::abs(z) > cfg.divergence_bound) {
      path.diverged = true;
      return path;
    }
    path.values[j + 1] = z;
  }
  return path;
}

PathSolution euler_maruyama(const GridField& u, const GridBased& grid, const SdeConfig& cfg,
                            double stop_time) {
  std::vector<double> nodes;
  nodes.reserve(grid.k() + 2);
  nodes.push_back(cfg.t_start);
  nodes.insert(nodes.end(), grid.interior_points.begin(), grid.interior_points.end());
  std::sort(nodes.begin() + 1, nodes.end());
  nodes.push_back(cfg.horizon);
  return euler_maruyama_on_nodes(u, std::move(nodes), cfg, stop_time);
}

Vector observe_sde(const PathSolution& path, const std::vector<double>& times) {
  Vector out(static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = path.at(times[i]);
  }
  return out;
}

SdeData generate_sde_data(std::uint64_t seed, const SdeConfig& cfg) {
  cfg.validate();
  Rng rng(seed);
  SdeData d;
  d.true_path_input = sample_wiener(WienerPrior{cfg.representation}, rng);
  d.true_solution = euler_maruyama_on_nodes(d.true_path_input, cfg.representation.abscissae(), cfg);
  if (d.true_solution.diverged) throw std::runtime_error("reference SDE solve diverged");
  d.truth_output = observe_sde(d.true_solution, cfg.observation_times);
  d.obs.data = d.truth_output;
  for (Eigen::Index i = 0; i < d.obs.data.size(); ++i) d.obs.data[i] += cfg.noise_sd * standard_normal(rng);
  for (double t : cfg.observation_times) d.obs.sensors.push_back(Location{t, 0.0});
  d.obs.noise = NoiseModel::isotropic(cfg.observation_times.size(), cfg.noise_sd * cfg.noise_sd);
  return d;
}

SdeForward::SdeForward(SdeConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  last_time_ = cfg_.observation_times.empty() ? cfg_.t_start : cfg_.observation_times.back();
}

Vector SdeForward::evaluate(const UnknownState& u, const DiscretizationParam& a) const {
  const auto* path = std::get_if<GridField>(&u);
  const auto* grid = std::get_if<GridBased>(&a);
  if (!path || !grid) throw ContractError("SDE forward model needs a path and a grid");
  return observe_sde(euler_maruyama(*path, *grid, cfg_, last_time_), cfg_.observation_times);
}

}  // namespace gridlearn
