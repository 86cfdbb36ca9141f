#pragma once

// Point-source detection: -Laplace(z) = delta_u on the unit square with
// homogeneous Dirichlet data, P1 elements on a Delaunay mesh of CVT points
// drawn from a Beta x Beta density.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gridlearn/core.hpp"
#include "gridlearn/mesh.hpp"
#include "gridlearn/priors.hpp"

namespace gridlearn {

struct FemConfig {
  std::vector<PlanarPoint> sensors = default_sensors();
  double noise_sd = 0.05;
  PlanarPoint true_source{0.85, 0.85};
  std::size_t reference_k = 2000;
  std::size_t macqueen_updates_per_point = 200;
  std::uint64_t mesh_seed = 7;
  std::size_t cache_capacity = 256;  // meshes kept by FemForward

  void validate() const;

  /// {0.5, 0.6, ..., 0.9}^2, x running fastest.
  static std::vector<PlanarPoint> default_sensors();
};

/// Independent coordinates x ~ Beta(alpha1, beta1), y ~ Beta(alpha2, beta2).
PlanarPoint sample_beta_density(const BetaParameters& theta, Rng& rng);

double sample_beta(double alpha, double beta, Rng& rng);

/// MacQueen's stochastic CVT iteration: k initial draws from the density,
/// then n_updates sample/nearest-generator/running-mean updates.
std::vector<PlanarPoint> macqueen_cvt(const BetaParameters& theta, std::size_t k,
                                      std::size_t n_updates, Rng& rng);

/// Seed for the CVT of (theta, k), so that a mesh is a function of a.
std::uint64_t mesh_seed(const BetaParameters& theta, std::size_t k, std::uint64_t global_seed);

/// CVT mesh for a density-based discretization.
Mesh density_mesh(const DensityBased& a, const FemConfig& cfg);

/// Load vector of a unit point source: barycentric weights of the containing
/// triangle, full nodal numbering. Throws std::runtime_error when the source
/// is outside the mesh.
Vector dirac_load(const Mesh& mesh, const PlanarPoint& source);

/// P1 stiffness of -Laplace over interior nodes, factorized once.
class FemSystem {
 public:
  explicit FemSystem(Mesh mesh);
  ~FemSystem();
  FemSystem(FemSystem&&) noexcept;
  FemSystem& operator=(FemSystem&&) noexcept;

  const Mesh& mesh() const { return mesh_; }
  std::size_t interior_count() const { return interior_.size(); }

  /// Nodal solution (zeros on the boundary) for a full nodal load vector.
  Vector solve(const Vector& load) const;

  /// Matrix R with R * load = point values of the solution at `points`.
  Eigen::MatrixXd response(const std::vector<PlanarPoint>& points) const;

 private:
  struct Factor;
  Mesh mesh_;
  std::vector<std::size_t> interior_;  // interior node ids
  std::vector<long> slot_;             // node id -> interior slot or -1
  std::unique_ptr<Factor> factor_;
};

/// Nodal solution for a unit source at `source`.
Vector assemble_and_solve(const Mesh& mesh, const PlanarPoint& source);

/// Barycentric interpolation of a nodal field at each sensor.
Vector observe_fem(const Vector& solution, const Mesh& mesh,
                   const std::vector<PlanarPoint>& sensors);

struct FemData {
  ObservationModel obs;
  Mesh reference_mesh;
  Vector truth_output;  // noise-free sensor values on the reference mesh
};

/// Reference solve on a uniform-density CVT mesh with reference_k generators.
FemData generate_fem_data(std::uint64_t seed, const FemConfig& cfg, bool add_noise = true);

/// G^a(u) with one precomputed sensor response per (theta, k). Not safe for
/// concurrent use: the mesh cache is mutated by evaluate().
class FemForward final : public ForwardModel {
 public:
  explicit FemForward(FemConfig cfg);
  ~FemForward() override;

  Vector evaluate(const UnknownState& u, const DiscretizationParam& a) const override;
  const FemConfig& config() const { return cfg_; }
  const Mesh& mesh_for(const DensityBased& a) const;
  std::size_t meshes_built() const { return built_; }

 private:
  struct Entry {
    Mesh mesh;
    Eigen::MatrixXd response;
  };
  const Entry& entry(const DensityBased& a) const;

  FemConfig cfg_;
  mutable std::map<std::pair<BetaParameters, std::size_t>, Entry> cache_;
  mutable std::vector<std::pair<BetaParameters, std::size_t>> order_;
  mutable std::size_t built_ = 0;
};

}  // namespace gridlearn
