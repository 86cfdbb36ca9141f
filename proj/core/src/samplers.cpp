#include "gridlearn/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gridlearn {

void KProposal::validate() const {
  if (steps.empty()) throw ContractError("k proposal needs at least one step");
  for (long s : steps) {
    const auto fwd = std::count(steps.begin(), steps.end(), s);
    const auto bwd = std::count(steps.begin(), steps.end(), -s);
    if (fwd != bwd) throw ContractError("k proposal steps must be symmetric");
  }
}

long KProposal::draw(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, steps.size() - 1);
  return steps[pick(rng)];
}

void SamplerConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ContractError("beta must lie in [0, 1]");
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw ContractError("zeta must lie in [0, 1]");
  if (thin == 0) throw ContractError("thin must be positive");
  k_proposal.validate();
}

double metropolis_acceptance(double current_potential, double proposed_potential) {
  if (!std::isfinite(proposed_potential)) return 0.0;
  if (!std::isfinite(current_potential)) return 1.0;
  return std::min(1.0, std::exp(current_potential - proposed_potential));
}

double birth_death_acceptance(double log_prior_ratio, double current_potential,
                              double proposed_potential) {
  if (!std::isfinite(proposed_potential) || log_prior_ratio == -kInfinity) return 0.0;
  if (!std::isfinite(current_potential)) return 1.0;
  const double log_r = log_prior_ratio + current_potential - proposed_potential;
  return log_r >= 0.0 ? 1.0 : std::exp(log_r);
}

namespace {

// Accept-reject bookkeeping shared by every kernel.
bool settle(ChainState& state, Evaluation proposal, double alpha, UnknownState* u_new,
            DiscretizationParam* a_new, MoveTally& tally, Rng& rng) {
  const bool accept = alpha >= 1.0 || (alpha > 0.0 && uniform01(rng) < alpha);
  tally.record(accept);
  if (accept) {
    if (u_new) state.u = std::move(*u_new);
    if (a_new) state.a = std::move(*a_new);
    state.cached_potential = proposal.potential;
    state.predicted = std::move(proposal.predicted);
  }
  return accept;
}

}  // namespace

bool pcn_step(ChainState& state, const GaussianSampler& prior, Target& target, double beta,
              Rng& rng) {
  const Vector& mean = coefficients(prior.mean());
  UnknownState proposal = state.u;
  Vector& v = coefficients(proposal);
  if (v.size() != mean.size()) throw ContractError("pCN prior and unknown differ in dimension");
  const double shrink = std::sqrt(1.0 - beta * beta);
  const Vector xi = prior.centered_draw(rng);
  if (beta > 0.0) v = mean + shrink * (v - mean) + beta * xi;
  auto eval = target.evaluate(proposal, state.a);
  const double alpha = metropolis_acceptance(state.cached_potential, eval.potential);
  return settle(state, std::move(eval), alpha, &proposal, nullptr, state.tallies.u, rng);
}

bool random_walk_step(ChainState& state, const UniformBoxPrior& prior, Target& target,
                      double step, Rng& rng) {
  UnknownState proposal = state.u;
  Vector x;
  if (auto* p = std::get_if<PlanarPoint>(&proposal)) {
    x = Vector(2);
    x << p->x + step * standard_normal(rng), p->y + step * standard_normal(rng);
    p->x = x[0];
    p->y = x[1];
  } else {
    Vector& v = coefficients(proposal);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += step * standard_normal(rng);
    x = v;
  }
  if (!prior.contains(x)) {
    state.tallies.u.record(false);
    return false;
  }
  auto eval = target.evaluate(proposal, state.a);
  const double alpha = metropolis_acceptance(state.cached_potential, eval.potential);
  return settle(state, std::move(eval), alpha, &proposal, nullptr, state.tallies.u, rng);
}

bool relocation_step(ChainState& state, Target& target, Interval domain, Rng& rng) {
  const auto* grid = std::get_if<GridBased>(&state.a);
  if (!grid) throw ContractError("relocation requires a grid-based discretization");
  if (grid->k() == 0) {
    state.tallies.relocation.record(false);
    return false;
  }
  std::uniform_int_distribution<std::size_t> pick(0, grid->k() - 1);
  const std::size_t index = pick(rng);
  DiscretizationParam proposal = *grid;
  auto& points = std::get<GridBased>(proposal).interior_points;
  double x = domain.lower + domain.length() * uniform01(rng);
  while (!domain.contains_open(x)) x = domain.lower + domain.length() * uniform01(rng);
  points[index] = x;
  auto eval = target.evaluate(state.u, proposal);
  const double alpha = metropolis_acceptance(state.cached_potential, eval.potential);
  return settle(state, std::move(eval), alpha, nullptr, &proposal, state.tallies.relocation, rng);
}

bool birth_death_step(ChainState& state, Target& target, Interval domain, const KPrior& k_prior,
                      const KProposal& proposal_kernel, Rng& rng) {
  const auto k = static_cast<long>(grid_size(state.a));
  const long k_new = k + proposal_kernel.draw(rng);
  const double log_ratio = log_pmf(k_prior, k_new) - log_pmf(k_prior, k);
  if (k_new < 0 || log_ratio == -kInfinity || std::isnan(log_ratio)) {
    state.tallies.dimension.record(false);
    return false;
  }

  DiscretizationParam proposal = state.a;
  if (auto* grid = std::get_if<GridBased>(&proposal)) {
    auto& points = grid->interior_points;
    if (k_new > k) {
      for (long i = k; i < k_new; ++i) {
        double x = domain.lower + domain.length() * uniform01(rng);
        while (!domain.contains_open(x)) x = domain.lower + domain.length() * uniform01(rng);
        points.push_back(x);
      }
    } else {
      for (long removed = 0; removed < k - k_new; ++removed) {
        std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
        points.erase(points.begin() + static_cast<std::ptrdiff_t>(pick(rng)));
      }
    }
  } else {
    std::get<DensityBased>(proposal).k = static_cast<std::size_t>(k_new);
  }

  auto eval = target.evaluate(state.u, proposal);
  const double alpha = birth_death_acceptance(log_ratio, state.cached_potential, eval.potential);
  return settle(state, std::move(eval), alpha, nullptr, &proposal, state.tallies.dimension, rng);
}

bool density_param_step(ChainState& state, Target& target, std::pair<double, double> box,
                        double step_size, Rng& rng) {
  const auto* density = std::get_if<DensityBased>(&state.a);
  if (!density) throw ContractError("density move requires a density-based discretization");
  DensityBased next = *density;
  bool inside = true;
  for (double& t : next.theta) {
    t += step_size * standard_normal(rng);
    inside = inside && t >= box.first && t <= box.second;
  }
  if (!inside) {
    state.tallies.relocation.record(false);
    return false;
  }
  DiscretizationParam proposal = next;
  auto eval = target.evaluate(state.u, proposal);
  const double alpha = metropolis_acceptance(state.cached_potential, eval.potential);
  return settle(state, std::move(eval), alpha, nullptr, &proposal, state.tallies.relocation, rng);
}

UnknownKernel make_unknown_kernel(const UnknownPrior& prior) {
  if (const auto* box = std::get_if<UniformBoxPrior>(&prior)) return RandomWalkKernel{*box};
  return PcnKernel{GaussianSampler(prior)};
}

std::vector<const ChainSample*> ChainRecord::after_burn_in(double burn_in_fraction) const {
  const double cutoff = burn_in_fraction * static_cast<double>(n_iterations);
  std::vector<const ChainSample*> out;
  for (const auto& s : samples) {
    if (static_cast<double>(s.iteration) >= cutoff) out.push_back(&s);
  }
  return out;
}

ChainRecord run_gibbs(ChainState initial, const SamplerConfig& config, const UnknownKernel& u_kernel,
                      const DiscretizationKernels& a_kernels, Target& target) {
  config.validate();
  Rng rng(config.seed);
  ChainRecord record;
  record.n_iterations = config.n_iterations;
  ChainState state = std::move(initial);
  const std::size_t failures_before = target.solver_failures();

  auto snapshot = [&](const ChainState& s) {
    record.samples.push_back(ChainSample{s.iteration, s.u, s.a, s.cached_potential, s.predicted});
  };
  snapshot(state);

  for (std::size_t n = 0; n < config.n_iterations; ++n) {
    // Stage I: u | a, y
    if (const auto* pcn = std::get_if<PcnKernel>(&u_kernel)) {
      pcn_step(state, pcn->prior, target, config.beta, rng);
    } else {
      random_walk_step(state, std::get<RandomWalkKernel>(u_kernel).prior, target,
                       config.random_walk_step, rng);
    }

    // Stage II: a | u, y
    if (config.adapt_discretization) {
      if (uniform01(rng) < config.zeta) {
        if (std::holds_alternative<GridBased>(state.a)) {
          relocation_step(state, target, a_kernels.domain, rng);
        } else {
          density_param_step(state, target, a_kernels.density_box, config.density_step, rng);
        }
      } else {
        birth_death_step(state, target, a_kernels.domain, a_kernels.k_prior, config.k_proposal,
                         rng);
      }
    }

    state.iteration = n + 1;
    if (state.iteration % config.thin == 0) snapshot(state);
  }

  record.tallies = state.tallies;
  record.solver_failures = target.solver_failures() - failures_before;
  record.final_state = std::move(state);
  return record;
}

}  // namespace gridlearn
