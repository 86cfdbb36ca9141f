#pragma once

// Timoshenko cantilever clamped at x = 0 and loaded by a tip mass at x = L,
// solved by explicit Euler marching on an arbitrary sorted grid.

#include <cstdint>
#include <variant>
#include <vector>

#include "gridlearn/core.hpp"

namespace gridlearn {

struct BeamConfig {
  double length = 10.0;           // m
  double width = 0.1;             // m
  double thickness = 0.3;         // m
  double poisson_ratio = 0.28;
  double shear_coefficient = 5.0 / 6.0;
  double tip_mass = 5.0;          // kg
  double gravity = 9.81;          // m/s^2
  double mollifier_width = 0.2;   // m, sensor kernel standard deviation
  double observation_variance = 1e-3;
  // Moduli are carried in GPa; the solver works in Pa.
  double modulus_scale = 1e9;
  // Displacements leave the forward model in these units per metre.
  double displacement_scale = 1.2e5;

  double area() const { return width * thickness; }
  double inertia() const { return width * thickness * thickness * thickness / 12.0; }
  double tip_load() const { return tip_mass * gravity; }
  Interval domain() const { return {0.0, length}; }
  void validate() const;
};

/// Five (or any number of) equal-length segments with constant modulus, in GPa.
struct PiecewiseConstantModulus {
  Vector segment_values;
};

struct ContinuousModulus {
  GridField field;
};

using YoungsModulusField = std::variant<PiecewiseConstantModulus, ContinuousModulus>;

double modulus_at(const YoungsModulusField& field, double x, double length);

/// Bending moment carried by the section at x under the tip load: P (L - x).
double moment_profile(double x, const BeamConfig& cfg);

/// Analytic tip deflection (m) of a homogeneous beam with modulus in GPa.
double timoshenko_tip_deflection(double modulus_gpa, const BeamConfig& cfg);

struct BeamSolution {
  std::vector<double> nodes;         // 0 = x_0 <= ... <= x_{k+1} = L
  std::vector<double> displacement;  // z, m
  std::vector<double> rotation;      // phi
  std::vector<double> moment;        // u I phi'
  bool ok = true;

  /// Linear interpolant of z.
  double at(double x) const;
};

/// Explicit Euler marching of (z, phi, moment, shear) from the clamped root.
/// Interior points are sorted on a copy. A nonpositive modulus at any node
/// yields ok == false.
BeamSolution solve_beam(const YoungsModulusField& field, const GridBased& grid,
                        const BeamConfig& cfg);

/// Integral over [0, L] of the unnormalized sensor kernel at s.
double mollifier_normalizer(double sensor, const BeamConfig& cfg);

/// Left-endpoint Riemann sum sum_{j=0}^{k} z(x_j) phi_i(x_j) (x_{j+1} - x_j).
Vector observe_beam(const BeamSolution& solution, const std::vector<double>& sensors,
                    const BeamConfig& cfg);

/// Uniform grid with k interior points.
GridBased uniform_grid(std::size_t k, Interval domain);

/// Noise-free forward output on the uniform fine grid (k = fine_k), in
/// displacement units.
Vector beam_reference_output(const YoungsModulusField& true_field,
                             const std::vector<double>& sensors, const BeamConfig& cfg,
                             std::size_t fine_k = 500);

/// Synthetic data: fine-grid forward output plus N(0, observation_variance I).
ObservationModel generate_beam_data(const YoungsModulusField& true_field,
                                    const std::vector<double>& sensors, const BeamConfig& cfg,
                                    std::uint64_t seed, std::size_t fine_k = 500);

/// G^a(u) for the beam. FiniteVector unknowns are piecewise-constant moduli,
/// GridField unknowns continuous ones.
class BeamForward final : public ForwardModel {
 public:
  BeamForward(BeamConfig cfg, std::vector<double> sensors);

  Vector evaluate(const UnknownState& u, const DiscretizationParam& a) const override;
  const BeamConfig& config() const { return cfg_; }
  const std::vector<double>& sensors() const { return sensors_; }

 private:
  BeamConfig cfg_;
  std::vector<double> sensors_;
};

YoungsModulusField to_modulus_field(const UnknownState& u);

}  // namespace gridlearn
