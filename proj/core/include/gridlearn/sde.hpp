#pragma once

// Euler-Maruyama solution map z = F^a(u) for dz = f(z) dt + du, z(t_0) = 0,
// driven by a given path u on an arbitrary sorted time grid.

#include <cstdint>
#include <vector>

#include "gridlearn/core.hpp"

namespace gridlearn {

struct SdeConfig {
  double t_start = 0.01;  // fixed first node t_0
  double horizon = 10.0;  // fixed last node T
  std::vector<double> observation_times = default_observation_times();
  double noise_sd = 0.1;
  UniformGrid representation{0.0, 0.1, 101};
  bool drift_enabled = true;
  // An iterate whose magnitude exceeds this bound is treated as a blow-up.
  double divergence_bound = 1e3;

  Interval domain() const { return {t_start, horizon}; }
  void validate() const;

  /// t_i = 0.2 i, i = 1..24.
  static std::vector<double> default_observation_times();
};

/// 10 z (1 - z^2) / (1 + z^2).
double double_well_drift(double z);

struct PathSolution {
  std::vector<double> nodes;
  std::vector<double> values;  // same length as nodes
  bool diverged = false;
  GridField input;             // driving path u
  bool drift_enabled = true;
  double reach = 0.0;          // last time the solution is defined at
  double divergence_bound = kInfinity;

  /// Continuous Euler-Maruyama interpolant: from the last node t_j <= t,
  /// z(t) = z_j + (t - t_j) f(z_j) + u(t) - u(t_j). NaN outside [t_0, reach]
  /// or past the divergence bound.
  double at(double t) const;
};

/// Marches over `nodes` (sorted, first node carries z = 0) up to the last
/// node not beyond `stop_time`; the solution is then defined on
/// [nodes[0], min(stop_time, nodes.back())].
PathSolution euler_maruyama_on_nodes(const GridField& u, std::vector<double> nodes,
                                     const SdeConfig& cfg, double stop_time = kInfinity);

/// Grid-based solve over t_0 <= sorted interior points <= T.
PathSolution euler_maruyama(const GridField& u, const GridBased& grid, const SdeConfig& cfg,
                            double stop_time = kInfinity);

Vector observe_sde(const PathSolution& path, const std::vector<double>& times);

struct SdeData {
  ObservationModel obs;
  GridField true_path_input;  // the driving Wiener path u*
  PathSolution true_solution; // z on the representation grid
  Vector truth_output;        // noise-free z(t_i)
};

/// Draws u* from the Wiener prior, solves on the representation grid and
/// perturbs z(t_i) with N(0, noise_sd^2) noise.
SdeData generate_sde_data(std::uint64_t seed, const SdeConfig& cfg);

/// G^a(u): the solver only marches as far as the last observation time needs.
class SdeForward final : public ForwardModel {
 public:
  explicit SdeForward(SdeConfig cfg);

  Vector evaluate(const UnknownState& u, const DiscretizationParam& a) const override;
  const SdeConfig& config() const { return cfg_; }

 private:
  SdeConfig cfg_;
  double last_time_;
};

}  // namespace gridlearn
