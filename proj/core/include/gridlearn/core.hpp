#pragma once

// Shared domain types for joint inference of an unknown input and the
// discretization of the forward model, plus the data-misfit potential.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace gridlearn {

using Vector = Eigen::VectorXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Raised when a caller breaks a documented precondition.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Location in the forward domain. One-dimensional problems use `x` only.
struct Location {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Location&, const Location&) = default;
};

/// Diagonal Gaussian noise covariance.
class NoiseModel {
 public:
  NoiseModel() = default;
  explicit NoiseModel(Vector variances);

  static NoiseModel isotropic(std::size_t dimension, double variance);

  const Vector& variances() const { return variances_; }
  std::size_t dimension() const { return static_cast<std::size_t>(variances_.size()); }

 private:
  Vector variances_;
};

struct ObservationModel {
  std::vector<Location> sensors;
  Vector data;
  NoiseModel noise;

  std::size_t dimension() const { return sensors.size(); }
  /// Throws ContractError when sensors, data and noise disagree in length.
  void validate() const;
};

// --- discretization parameter a = (k, theta) -------------------------------

/// Explicit interior grid points. Fixed endpoints belong to the forward problem.
struct GridBased {
  std::vector<double> interior_points;

  std::size_t k() const { return interior_points.size(); }
  friend bool operator==(const GridBased&, const GridBased&) = default;
};

/// Beta x Beta density parameters (alpha1, beta1, alpha2, beta2).
using BetaParameters = std::array<double, 4>;

struct DensityBased {
  std::size_t k = 0;
  BetaParameters theta{1.0, 1.0, 1.0, 1.0};

  friend bool operator==(const DensityBased&, const DensityBased&) = default;
};

using DiscretizationParam = std::variant<GridBased, DensityBased>;

std::size_t grid_size(const DiscretizationParam& a);

/// Open interval (lower, upper) hosting the movable grid points.
struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  bool contains_open(double x) const { return x > lower && x < upper; }
  double length() const { return upper - lower; }
};

// --- unknown input u -------------------------------------------------------

/// Fixed, uniformly spaced abscissae start + i * step, i = 0..size-1.
struct UniformGrid {
  double start = 0.0;
  double step = 1.0;
  std::size_t size = 0;

  double at(std::size_t i) const { return start + step * static_cast<double>(i); }
  double back() const { return at(size - 1); }
  std::vector<double> abscissae() const;
  friend bool operator==(const UniformGrid&, const UniformGrid&) = default;
};

struct FiniteVector {
  Vector values;
};

/// A function represented by its values on a fixed uniform grid; evaluated
/// elsewhere by linear interpolation (constant extrapolation past the ends).
struct GridField {
  UniformGrid grid;
  Vector values;

  double at(double x) const;
};

struct PlanarPoint {
  double x = 0.5;
  double y = 0.5;
};

using UnknownState = std::variant<FiniteVector, GridField, PlanarPoint>;

/// Coefficient vector of a vector-valued unknown (FiniteVector or GridField).
/// Throws ContractError for PlanarPoint.
const Vector& coefficients(const UnknownState& u);
Vector& coefficients(UnknownState& u);

// --- forward model and potential -------------------------------------------

/// Discretized forward map G^a(u). Implementations return a vector with
/// non-finite entries to signal solver failure.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;
  virtual Vector evaluate(const UnknownState& u, const DiscretizationParam& a) const = 0;
};

/// Sum_i residual_i^2 / variance_i.
double gamma_norm_sq(const Vector& residual, const NoiseModel& noise);

/// Counts forward evaluations that produced non-finite output.
struct FailureCounter {
  std::size_t failures = 0;
};

/// 0.5 * |y - G^a(u)|^2_Gamma, or +inf when the forward output is not finite.
double potential(const UnknownState& u, const DiscretizationParam& a,
                 const ObservationModel& obs, const ForwardModel& forward,
                 FailureCounter* counter = nullptr);

struct Evaluation {
  double potential = kInfinity;
  Vector predicted;
};

/// Observation model and forward map bound together, with a running
/// solver-failure counter. Every sampler kernel consumes one of these.
class Target {
 public:
  Target(const ObservationModel& obs, const ForwardModel& forward);

  Evaluation evaluate(const UnknownState& u, const DiscretizationParam& a);
  const ObservationModel& observations() const { return *obs_; }
  const ForwardModel& forward() const { return *forward_; }
  std::size_t solver_failures() const { return counter_.failures; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  const ObservationModel* obs_;
  const ForwardModel* forward_;
  FailureCounter counter_;
  std::size_t evaluations_ = 0;
};

// --- chain state -----------------------------------------------------------

struct MoveTally {
  std::size_t attempted = 0;
  std::size_t accepted = 0;

  void record(bool accept) {
    ++attempted;
    if (accept) ++accepted;
  }
  double rate() const {
    return attempted == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempted);
  }
};

struct Tallies {
  MoveTally u;
  MoveTally relocation;  // grid relocation or density-parameter moves
  MoveTally dimension;   // birth/death moves on k
};

struct ChainState {
  UnknownState u;
  DiscretizationParam a;
  double cached_potential = kInfinity;
  Vector predicted;
  std::size_t iteration = 0;
  Tallies tallies;
};

/// Builds a chain state with the potential evaluated from scratch.
ChainState make_chain_state(UnknownState u, DiscretizationParam a, Target& target);

}  // namespace gridlearn
