#include "gridlearn/fem.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace gridlearn {

std::vector<PlanarPoint> FemConfig::default_sensors() {
  std::vector<PlanarPoint> s;
  for (int j = 0; j < 5; ++j) {
    for (int i = 0; i < 5; ++i) s.push_back({0.5 + 0.1 * i, 0.5 + 0.1 * j});
  }
  return s;
}

void FemConfig::validate() const {
  auto inside = [](const PlanarPoint& p) { return p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0; };
  if (sensors.empty()) throw ContractError("FEM needs at least one sensor");
  for (const auto& s : sensors) {
    if (!inside(s)) throw ContractError("FEM sensor outside the unit square");
  }
  if (!inside(true_source)) throw ContractError("true source outside the unit square");
  if (!(noise_sd > 0.0)) throw ContractError("FEM noise level must be positive");
  if (reference_k == 0) throw ContractError("reference mesh needs generators");
  if (cache_capacity == 0) throw ContractError("mesh cache capacity must be positive");
}

double sample_beta(double alpha, double beta, Rng& rng) {
  std::gamma_distribution<double> ga(alpha, 1.0);
  std::gamma_distribution<double> gb(beta, 1.0);
  for (;;) {
    const double x = ga(rng);
    const double y = gb(rng);
    const double v = x / (x + y);
    if (v > 0.0 && v < 1.0) return v;
  }
}

PlanarPoint sample_beta_density(const BetaParameters& theta, Rng& rng) {
  const double x = sample_beta(theta[0], theta[1], rng);
  const double y = sample_beta(theta[2], theta[3], rng);
  return {x, y};
}

std::vector<PlanarPoint> macqueen_cvt(const BetaParameters& theta, std::size_t k,
                                      std::size_t n_updates, Rng& rng) {
  if (k == 0) throw ContractError("CVT needs at least one generator");
  std::vector<PlanarPoint> g(k);
  for (auto& p : g) p = sample_beta_density(theta, rng);
  std::vector<double> visits(k, 1.0);
  for (std::size_t n = 0; n < n_updates; ++n) {
    const PlanarPoint x = sample_beta_density(theta, rng);
    std::size_t best = 0;
    double best_d = kInfinity;
    for (std::size_t i = 0; i < k; ++i) {
      const double dx = g[i].x - x.x, dy = g[i].y - x.y;
      const double d = dx * dx + dy * dy;
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    const double w = visits[best];
    g[best].x = (w * g[best].x + x.x) / (w + 1.0);
    g[best].y = (w * g[best].y + x.y) / (w + 1.0);
    visits[best] = w + 1.0;
  }
  return g;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mesh_seed(const BetaParameters& theta, std::size_t k, std::uint64_t global_seed) {
  std::uint64_t h = splitmix(global_seed);
  for (double t : theta) h = splitmix(h ^ std::bit_cast<std::uint64_t>(t));
  return splitmix(h ^ static_cast<std::uint64_t>(k));
}

Mesh density_mesh(const DensityBased& a, const FemConfig& cfg) {
  Rng rng(mesh_seed(a.theta, a.k, cfg.mesh_seed));
  const auto gens = macqueen_cvt(a.theta, a.k, cfg.macqueen_updates_per_point * a.k, rng);
  return build_mesh(gens, default_boundary_per_side(a.k));
}

Vector dirac_load(const Mesh& mesh, const PlanarPoint& source) {
  const auto loc = locate(mesh, source);
  if (!loc) throw std::runtime_error("point source outside the mesh");
  Vector b = Vector::Zero(static_cast<Eigen::Index>(mesh.nodes.size()));
  const auto& tri = mesh.triangles[loc->triangle];
  for (int v = 0; v < 3; ++v) b[static_cast<Eigen::Index>(tri[v])] += loc->barycentric[v];
  return b;
}

struct FemSystem::Factor {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

FemSystem::FemSystem(Mesh mesh) : mesh_(std::move(mesh)), factor_(std::make_unique<Factor>()) {
  slot_.assign(mesh_.nodes.size(), -1);
  for (std::size_t i = 0; i < mesh_.nodes.size(); ++i) {
    if (!mesh_.boundary[i]) {
      slot_[i] = static_cast<long>(interior_.size());
      interior_.push_back(i);
    }
  }
  const auto n = static_cast<Eigen::Index>(interior_.size());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(9 * mesh_.triangles.size());
  for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
    const auto& tri = mesh_.triangles[t];
    const double area = mesh_.area(t);
    // Gradient of barycentric coordinate i is (y_j - y_k, x_k - x_j) / (2 area).
    double gx[3], gy[3];
    for (int i = 0; i < 3; ++i) {
      const auto& pj = mesh_.nodes[tri[(i + 1) % 3]];
      const auto& pk = mesh_.nodes[tri[(i + 2) % 3]];
      gx[i] = (pj.y - pk.y) / (2.0 * area);
      gy[i] = (pk.x - pj.x) / (2.0 * area);
    }
    for (int i = 0; i < 3; ++i) {
      const long si = slot_[tri[i]];
      if (si < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const long sj = slot_[tri[j]];
        if (sj < 0) continue;
        entries.emplace_back(si, sj, area * (gx[i] * gx[j] + gy[i] * gy[j]));
      }
    }
  }
  Eigen::SparseMatrix<double> k(n, n);
  k.setFromTriplets(entries.begin(), entries.end());
  factor_->ldlt.compute(k);
  if (factor_->ldlt.info() != Eigen::Success) throw std::runtime_error("singular stiffness matrix");
}

FemSystem::~FemSystem() = default;
FemSystem::FemSystem(FemSystem&&) noexcept = default;
FemSystem& FemSystem::operator=(FemSystem&&) noexcept = default;

Vector FemSystem::solve(const Vector& load) const {
  if (load.size() != static_cast<Eigen::Index>(mesh_.nodes.size())) {
    throw ContractError("load vector length must match the node count");
  }
  Vector rhs(static_cast<Eigen::Index>(interior_.size()));
  for (std::size_t s = 0; s < interior_.size(); ++s) {
    rhs[static_cast<Eigen::Index>(s)] = load[static_cast<Eigen::Index>(interior_[s])];
  }
  const Vector x = factor_->ldlt.solve(rhs);
  Vector full = Vector::Zero(load.size());
  for (std::size_t s = 0; s < interior_.size(); ++s) {
    full[static_cast<Eigen::Index>(interior_[s])] = x[static_cast<Eigen::Index>(s)];
  }
  return full;
}

Eigen::MatrixXd FemSystem::response(const std::vector<PlanarPoint>& points) const {
  const auto m = static_cast<Eigen::Index>(points.size());
  const auto n = static_cast<Eigen::Index>(interior_.size());
  // The stiffness matrix is symmetric, so R = S K^{-1} = (K^{-1} S^T)^T.
  Eigen::MatrixXd st = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto loc = locate(mesh_, points[static_cast<std::size_t>(i)]);
    if (!loc) throw std::runtime_error("sensor outside the mesh");
    const auto& tri = mesh_.triangles[loc->triangle];
    for (int v = 0; v < 3; ++v) {
      const long s = slot_[tri[v]];
      if (s >= 0) st(s, i) += loc->barycentric[v];
    }
  }
  const Eigen::MatrixXd x = factor_->ldlt.solve(st);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(mesh_.nodes.size()));
  for (std::size_t s = 0; s < interior_.size(); ++s) {
    r.col(static_cast<Eigen::Index>(interior_[s])) = x.row(static_cast<Eigen::Index>(s)).transpose();
  }
  return r;
}

Vector assemble_and_solve(const Mesh& mesh, const PlanarPoint& source) {
  const FemSystem system(mesh);
  return system.solve(dirac_load(mesh, source));
}

Vector observe_fem(const Vector& solution, const Mesh& mesh,
                   const std::vector<PlanarPoint>& sensors) {
  Vector out(static_cast<Eigen::Index>(sensors.size()));
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const auto loc = locate(mesh, sensors[i]);
    if (!loc) throw std::runtime_error("sensor outside the mesh");
    const auto& tri = mesh.triangles[loc->triangle];
    double v = 0.0;
    for (int j = 0; j < 3; ++j) v += loc->barycentric[j] * solution[static_cast<Eigen::Index>(tri[j])];
    out[static_cast<Eigen::Index>(i)] = v;
  }
  return out;
}

FemData generate_fem_data(std::uint64_t seed, const FemConfig& cfg, bool add_noise) {
  cfg.validate();
  FemData d;
  d.reference_mesh = density_mesh(DensityBased{cfg.reference_k, {1.0, 1.0, 1.0, 1.0}}, cfg);
  const FemSystem system(d.reference_mesh);
  d.truth_output = observe_fem(system.solve(dirac_load(d.reference_mesh, cfg.true_source)),
                               d.reference_mesh, cfg.sensors);
  d.obs.data = d.truth_output;
  if (add_noise) {
    Rng rng(seed);
    for (Eigen::Index i = 0; i < d.obs.data.size(); ++i) d.obs.data[i] += cfg.noise_sd * standard_normal(rng);
  }
  for (const auto& s : cfg.sensors) d.obs.sensors.push_back(Location{s.x, s.y});
  d.obs.noise = NoiseModel::isotropic(cfg.sensors.size(), cfg.noise_sd * cfg.noise_sd);
  return d;
}

FemForward::FemForward(FemConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

FemForward::~FemForward() = default;

const FemForward::Entry& FemForward::entry(const DensityBased& a) const {
  const auto key = std::pair{a.theta, a.k};
  if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  if (cache_.size() >= cfg_.cache_capacity) {
    cache_.erase(order_.front());
    order_.erase(order_.begin());
  }
  FemSystem system(density_mesh(a, cfg_));
  Entry e;
  e.response = system.response(cfg_.sensors);
  e.mesh = system.mesh();
  ++built_;
  order_.push_back(key);
  return cache_.emplace(key, std::move(e)).first->second;
}

const Mesh& FemForward::mesh_for(const DensityBased& a) const { return entry(a).mesh; }

Vector FemForward::evaluate(const UnknownState& u, const DiscretizationParam& a) const {
  const auto* source = std::get_if<PlanarPoint>(&u);
  const auto* density = std::get_if<DensityBased>(&a);
  if (!source || !density) throw ContractError("FEM forward model needs a point and a density parameter");
  const auto& e = entry(*density);
  const auto loc = locate(e.mesh, *source);
  if (!loc) {
    return Vector::Constant(static_cast<Eigen::Index>(cfg_.sensors.size()),
                            std::numeric_limits<double>::quiet_NaN());
  }
  const auto& tri = e.mesh.triangles[loc->triangle];
  Vector out = Vector::Zero(static_cast<Eigen::Index>(cfg_.sensors.size()));
  for (int v = 0; v < 3; ++v) out += loc->barycentric[v] * e.response.col(static_cast<Eigen::Index>(tri[v]));
  return out;
}

}  // namespace gridlearn
