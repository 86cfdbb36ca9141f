#include "gridlearn/priors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace gridlearn {

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

bool UniformBoxPrior::contains(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != bounds.size()) return false;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const double v = x[static_cast<Eigen::Index>(i)];
    if (!(v >= bounds[i].first && v <= bounds[i].second)) return false;
  }
  return true;
}

bool is_gaussian(const UnknownPrior& prior) {
  return !std::holds_alternative<UniformBoxPrior>(prior);
}

Vector sample_gaussian_vector(const GaussianVectorPrior& spec, Rng& rng) {
  if (!(spec.variance >= 0.0)) throw ContractError("Gaussian prior variance must be nonnegative");
  const double sd = std::sqrt(spec.variance);
  Vector out(spec.mean.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = spec.mean[i] + sd * standard_normal(rng);
  return out;
}

double gp_kernel(double x, double x2, double variance, double scale) {
  const double d = x - x2;
  return variance * std::exp(-d * d / scale);
}

Eigen::MatrixXd gp_covariance(const GaussianProcessPrior& spec) {
  const auto n = static_cast<Eigen::Index>(spec.grid.size);
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = spec.grid.at(static_cast<std::size_t>(i));
    c(i, i) = spec.kernel_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = gp_kernel(xi, spec.grid.at(static_cast<std::size_t>(j)),
                                 spec.kernel_variance, spec.kernel_scale);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& cov, double base_variance,
                                  double* jitter_used) {
  const Eigen::Index n = cov.rows();
  for (double rel = 1e-8; rel <= 1e-4 * 1.0000001; rel *= 10.0) {
    const double jitter = rel * base_variance;
    Eigen::MatrixXd shifted = cov;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd l = llt.matrixL();
      if (l.allFinite() && (l.diagonal().array() > 0.0).all()) {
        if (jitter_used) *jitter_used = jitter;
        return l;
      }
    }
  }
  throw std::runtime_error("covariance factorization failed after jitter escalation (n=" +
                           std::to_string(n) + ")");
}

GaussianSampler::GaussianSampler(const UnknownPrior& prior) {
  if (const auto* g = std::get_if<GaussianVectorPrior>(&prior)) {
    if (!(g->variance >= 0.0)) throw ContractError("Gaussian prior variance must be nonnegative");
    kind_ = Kind::IidVector;
    mean_ = FiniteVector{g->mean};
    scale_ = std::sqrt(g->variance);
  } else if (const auto* gp = std::get_if<GaussianProcessPrior>(&prior)) {
    kind_ = Kind::Factored;
    mean_ = GridField{gp->grid, Vector::Constant(static_cast<Eigen::Index>(gp->grid.size), gp->mean)};
    factor_ = jittered_cholesky(gp_covariance(*gp), gp->kernel_variance, &jitter_);
  } else if (const auto* w = std::get_if<WienerPrior>(&prior)) {
    if (w->grid.start != 0.0 || !(w->grid.step > 0.0)) {
      throw ContractError("Wiener prior grid must start at 0 with positive step");
    }
    kind_ = Kind::Wiener;
    mean_ = GridField{w->grid, Vector::Zero(static_cast<Eigen::Index>(w->grid.size))};
    scale_ = std::sqrt(w->grid.step);
  } else {
    throw ContractError("GaussianSampler requires a Gaussian-type prior");
  }
}

Vector GaussianSampler::centered_draw(Rng& rng) const {
  const Vector& m = coefficients(mean_);
  const Eigen::Index n = m.size();
  Vector out(n);
  switch (kind_) {
    case Kind::IidVector:
      for (Eigen::Index i = 0; i < n; ++i) out[i] = scale_ * standard_normal(rng);
      break;
    case Kind::Factored: {
      Vector z(n);
      for (Eigen::Index i = 0; i < n; ++i) z[i] = standard_normal(rng);
      out.noalias() = factor_.triangularView<Eigen::Lower>() * z;
      break;
    }
    case Kind::Wiener: {
      double acc = 0.0;
      if (n > 0) out[0] = 0.0;
      for (Eigen::Index i = 1; i < n; ++i) {
        acc += scale_ * standard_normal(rng);
        out[i] = acc;
      }
      break;
    }
  }
  return out;
}

UnknownState GaussianSampler::draw(Rng& rng) const {
  UnknownState u = mean_;
  coefficients(u) += centered_draw(rng);
  return u;
}

GridField sample_gp(const GaussianProcessPrior& spec, Rng& rng) {
  return std::get<GridField>(GaussianSampler(spec).draw(rng));
}

GridField sample_wiener(const WienerPrior& spec, Rng& rng) {
  return std::get<GridField>(GaussianSampler(spec).draw(rng));
}

Vector sample_uniform_box(const UniformBoxPrior& spec, Rng& rng) {
  Vector out(static_cast<Eigen::Index>(spec.bounds.size()));
  for (std::size_t i = 0; i < spec.bounds.size(); ++i) {
    const auto [lo, hi] = spec.bounds[i];
    out[static_cast<Eigen::Index>(i)] = lo + (hi - lo) * uniform01(rng);
  }
  return out;
}

double log_pmf_poisson_k(long k, double mean) {
  if (k < 0) return -kInfinity;
  const auto kd = static_cast<double>(k);
  return kd * std::log(mean) - mean - std::lgamma(kd + 1.0);
}

double log_pmf(const KPrior& prior, long k) {
  if (const auto* p = std::get_if<PoissonK>(&prior)) {
    if (k < static_cast<long>(p->k_min) || k > static_cast<long>(p->k_max)) return -kInfinity;
    return log_pmf_poisson_k(k, p->mean);
  }
  const auto& pm = std::get<PointMassK>(prior);
  return k == static_cast<long>(pm.k) ? 0.0 : -kInfinity;
}

PoissonK make_poisson_k(double mean) {
  if (!(mean > 0.0)) throw ContractError("Poisson mean must be positive");
  return PoissonK{mean, 2, static_cast<std::size_t>(std::ceil(10.0 * mean))};
}

}  // namespace gridlearn
