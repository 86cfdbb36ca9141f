#include "gridlearn/core.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace gridlearn {

NoiseModel::NoiseModel(Vector variances) : variances_(std::move(variances)) {
  for (Eigen::Index i = 0; i < variances_.size(); ++i) {
    if (!(variances_[i] > 0.0) || !std::isfinite(variances_[i])) {
      throw ContractError("noise variance " + std::to_string(i) + " must be positive and finite");
    }
  }
}

NoiseModel NoiseModel::isotropic(std::size_t dimension, double variance) {
  return NoiseModel(Vector::Constant(static_cast<Eigen::Index>(dimension), variance));
}

void ObservationModel::validate() const {
  if (static_cast<std::size_t>(data.size()) != sensors.size()) {
    throw ContractError("observation data length does not match sensor count");
  }
  if (noise.dimension() != sensors.size()) {
    throw ContractError("noise dimension does not match sensor count");
  }
}

std::size_t grid_size(const DiscretizationParam& a) {
  return std::visit(
      [](const auto& p) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, GridBased>) {
          return p.k();
        } else {
          return p.k;
        }
      },
      a);
}

std::vector<double> UniformGrid::abscissae() const {
  std::vector<double> xs(size);
  for (std::size_t i = 0; i < size; ++i) xs[i] = at(i);
  return xs;
}

double GridField::at(double x) const {
  const auto n = static_cast<std::size_t>(values.size());
  if (n == 0) throw ContractError("empty grid field");
  if (n == 1 || x <= grid.start) return values[0];
  if (x >= grid.back()) return values[static_cast<Eigen::Index>(n - 1)];
  const double s = (x - grid.start) / grid.step;
  // A query at a node reads that node alone, even when s carries rounding.
  const double nearest = std::round(s);
  if (std::abs(s - nearest) < 1e-9) return values[static_cast<Eigen::Index>(nearest)];
  auto i = static_cast<std::size_t>(s);
  if (i >= n - 1) i = n - 2;
  const double w = s - static_cast<double>(i);
  const auto ii = static_cast<Eigen::Index>(i);
  return (1.0 - w) * values[ii] + w * values[ii + 1];
}

const Vector& coefficients(const UnknownState& u) {
  if (const auto* v = std::get_if<FiniteVector>(&u)) return v->values;
  if (const auto* f = std::get_if<GridField>(&u)) return f->values;
  throw ContractError("planar-point unknown has no coefficient vector");
}

Vector& coefficients(UnknownState& u) {
  return const_cast<Vector&>(coefficients(std::as_const(u)));
}

double gamma_norm_sq(const Vector& residual, const NoiseModel& noise) {
  if (static_cast<std::size_t>(residual.size()) != noise.dimension()) {
    throw ContractError("residual length " + std::to_string(residual.size()) +
                        " does not match noise dimension " + std::to_string(noise.dimension()));
  }
  return (residual.array().square() / noise.variances().array()).sum();
}

namespace {

double potential_of(const Vector& predicted, const ObservationModel& obs, FailureCounter* counter) {
  if (predicted.size() != obs.data.size() || !predicted.allFinite()) {
    if (counter) ++counter->failures;
    return kInfinity;
  }
  const double value = 0.5 * gamma_norm_sq(obs.data - predicted, obs.noise);
  if (!std::isfinite(value)) {
    if (counter) ++counter->failures;
    return kInfinity;
  }
  return value;
}

}  // namespace

double potential(const UnknownState& u, const DiscretizationParam& a, const ObservationModel& obs,
                 const ForwardModel& forward, FailureCounter* counter) {
  return potential_of(forward.evaluate(u, a), obs, counter);
}

Target::Target(const ObservationModel& obs, const ForwardModel& forward)
    : obs_(&obs), forward_(&forward) {
  obs.validate();
}

Evaluation Target::evaluate(const UnknownState& u, const DiscretizationParam& a) {
  ++evaluations_;
  Evaluation e;
  e.predicted = forward_->evaluate(u, a);
  e.potential = potential_of(e.predicted, *obs_, &counter_);
  return e;
}

ChainState make_chain_state(UnknownState u, DiscretizationParam a, Target& target) {
  ChainState s;
  auto e = target.evaluate(u, a);
  s.u = std::move(u);
  s.a = std::move(a);
  s.cached_potential = e.potential;
  s.predicted = std::move(e.predicted);
  return s;
}

}  // namespace gridlearn
