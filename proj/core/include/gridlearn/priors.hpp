#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "gridlearn/core.hpp"

namespace gridlearn {

/// All randomness flows through an explicitly passed engine.
using Rng = std::mt19937_64;

double uniform01(Rng& rng);
double standard_normal(Rng& rng);

// --- priors on the unknown u -----------------------------------------------

/// N(mean, variance * I).
struct GaussianVectorPrior {
  Vector mean;
  double variance = 1.0;
};

/// GP(mean, c) with c(x, x') = kernel_variance * exp(-(x - x')^2 / kernel_scale),
/// restricted to a representation grid.
struct GaussianProcessPrior {
  double mean = 0.0;
  double kernel_variance = 50.0;
  double kernel_scale = 0.5;
  UniformGrid grid;
};

/// Standard Wiener measure on a grid starting at 0 with u(0) = 0.
struct WienerPrior {
  UniformGrid grid;
};

struct UniformBoxPrior {
  std::vector<std::pair<double, double>> bounds;

  bool contains(const Vector& x) const;
};

using UnknownPrior =
    std::variant<GaussianVectorPrior, GaussianProcessPrior, WienerPrior, UniformBoxPrior>;

bool is_gaussian(const UnknownPrior& prior);

Vector sample_gaussian_vector(const GaussianVectorPrior& spec, Rng& rng);

double gp_kernel(double x, double x2, double variance = 50.0, double scale = 0.5);

/// Covariance matrix of the GP on its grid (symmetric by construction).
Eigen::MatrixXd gp_covariance(const GaussianProcessPrior& spec);

GridField sample_gp(const GaussianProcessPrior& spec, Rng& rng);
GridField sample_wiener(const WienerPrior& spec, Rng& rng);
Vector sample_uniform_box(const UniformBoxPrior& spec, Rng& rng);

/// Draws from a Gaussian-type prior with its covariance factor computed once.
/// Used by pCN, which needs a fresh centered draw at every step.
class GaussianSampler {
 public:
  explicit GaussianSampler(const UnknownPrior& prior);

  /// Prior mean in the same representation as the unknown.
  const UnknownState& mean() const { return mean_; }
  /// A draw from N(0, C).
  Vector centered_draw(Rng& rng) const;
  /// A draw from the prior.
  UnknownState draw(Rng& rng) const;
  double jitter() const { return jitter_; }

 private:
  enum class Kind { IidVector, Factored, Wiener };
  Kind kind_;
  UnknownState mean_;
  double scale_ = 1.0;
  Eigen::MatrixXd factor_;
  double jitter_ = 0.0;
};

/// Lower Cholesky factor of `cov` after adding diagonal jitter, starting at
/// 1e-8 * base_variance and escalating x10 up to 1e-4 * base_variance.
/// Reports the jitter that succeeded.
Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& cov, double base_variance,
                                  double* jitter_used = nullptr);

// --- priors on the grid size k ---------------------------------------------

/// Poisson(mean) truncated to {k_min, ..., k_max}.
struct PoissonK {
  double mean = 60.0;
  std::size_t k_min = 2;
  std::size_t k_max = 600;
};

struct PointMassK {
  std::size_t k = 1;
};

using KPrior = std::variant<PoissonK, PointMassK>;

/// Untruncated Poisson log-pmf; -inf for negative k.
double log_pmf_poisson_k(long k, double mean);

/// Log-mass of k under the prior, unnormalized over the truncation; -inf off support.
double log_pmf(const KPrior& prior, long k);

/// Default truncation: k_min = 2, k_max = 10 * mean.
PoissonK make_poisson_k(double mean);

}  // namespace gridlearn
