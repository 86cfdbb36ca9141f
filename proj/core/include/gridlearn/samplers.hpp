#pragma once

// Metropolis-within-Gibbs over (u, a): a pCN (or bounded random-walk) update
// of u given a, followed by either a grid relocation / density-parameter move
// or a birth/death move on k. All grid proposals draw new points from the
// uniform density on the domain, so proposal densities cancel in the ratios.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "gridlearn/core.hpp"
#include "gridlearn/priors.hpp"

namespace gridlearn {

/// Symmetric proposal on k: k~ = k + s with s drawn uniformly from `steps`.
struct KProposal {
  std::vector<long> steps{-1, 1};

  /// Throws ContractError unless every step s has a matching -s.
  void validate() const;
  long draw(Rng& rng) const;
};

struct SamplerConfig {
  double beta = 0.08;   // pCN step in [0, 1]; 0 gives the identity proposal
  double zeta = 0.5;    // probability of a relocation / theta move in Stage II
  std::size_t n_iterations = 1000;
  std::uint64_t seed = 1;
  KProposal k_proposal;
  std::size_t thin = 10;
  double random_walk_step = 0.05;  // bounded-prior u moves
  double density_step = 0.5;       // theta random-walk standard deviation
  bool adapt_discretization = true;  // false: Stage II skipped, a stays fixed

  void validate() const;
};

// --- acceptance probabilities ----------------------------------------------

/// min{1, exp(current - proposed)}. A non-finite proposal is never accepted;
/// a finite proposal from a non-finite current state always is.
double metropolis_acceptance(double current_potential, double proposed_potential);

/// min{1, (nu(k~)/nu(k)) * exp(current - proposed)} given log(nu(k~)/nu(k)).
double birth_death_acceptance(double log_prior_ratio, double current_potential,
                              double proposed_potential);

// --- kernels ---------------------------------------------------------------
// Each kernel mutates `state` in place and returns whether the move was accepted.

/// pCN on u | a, y: u~ = m + sqrt(1 - beta^2) (u - m) + beta xi, xi ~ N(0, C).
bool pcn_step(ChainState& state, const GaussianSampler& prior, Target& target, double beta,
              Rng& rng);

/// Gaussian random walk on a box-bounded unknown (uniform prior); proposals
/// leaving the box are rejected.
bool random_walk_step(ChainState& state, const UniformBoxPrior& prior, Target& target,
                      double step, Rng& rng);

/// Replaces one uniformly chosen interior point by a uniform draw in `domain`.
/// k = 0 is a rejected no-op.
bool relocation_step(ChainState& state, Target& target, Interval domain, Rng& rng);

/// Proposes k~ from `proposal`; appends uniform draws (birth) or deletes
/// uniformly chosen points (death). Grid-based and density-based a.
bool birth_death_step(ChainState& state, Target& target, Interval domain, const KPrior& k_prior,
                      const KProposal& proposal, Rng& rng);

/// Gaussian random walk on theta in [lower, upper]^4 (uniform prior).
bool density_param_step(ChainState& state, Target& target, std::pair<double, double> box,
                        double step_size, Rng& rng);

// --- driver ----------------------------------------------------------------

struct PcnKernel {
  GaussianSampler prior;
};

struct RandomWalkKernel {
  UniformBoxPrior prior;
};

using UnknownKernel = std::variant<PcnKernel, RandomWalkKernel>;

/// Builds the u-kernel matching a prior: pCN for Gaussian-type priors,
/// bounded random walk for a uniform box.
UnknownKernel make_unknown_kernel(const UnknownPrior& prior);

struct DiscretizationKernels {
  Interval domain;  // where grid points live (grid-based a)
  KPrior k_prior = PointMassK{1};
  std::pair<double, double> density_box{1.0, 10.0};
};

struct ChainSample {
  std::size_t iteration = 0;
  UnknownState u;
  DiscretizationParam a;
  double potential = kInfinity;
  Vector predicted;
};

struct ChainRecord {
  std::vector<ChainSample> samples;  // thinned, starting with the initial state
  Tallies tallies;
  std::size_t n_iterations = 0;
  std::size_t solver_failures = 0;
  ChainState final_state;

  /// Samples with iteration >= burn_in_fraction * n_iterations.
  std::vector<const ChainSample*> after_burn_in(double burn_in_fraction) const;
};

ChainRecord run_gibbs(ChainState initial, const SamplerConfig& config, const UnknownKernel& u_kernel,
                      const DiscretizationKernels& a_kernels, Target& target);

}  // namespace gridlearn
