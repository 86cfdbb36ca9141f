#include "gridlearn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gridlearn {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw ContractError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ContractError("quantile level outside [0, 1]");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return w == 0.0 ? sorted[lo] : (1.0 - w) * sorted[lo] + w * sorted[hi];
}

Bands percentile_bands(const std::vector<Vector>& chain, std::vector<double> levels) {
  if (chain.empty()) throw ContractError("percentile bands need a non-empty chain");
  const Eigen::Index n = chain.front().size();
  for (const auto& v : chain) {
    if (v.size() != n) throw ContractError("chain states differ in length");
  }
  std::sort(levels.begin(), levels.end());
  Bands b;
  b.levels = levels;
  b.mean = Vector::Zero(n);
  b.quantiles.resize(static_cast<Eigen::Index>(levels.size()), n);
  std::vector<double> column(chain.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      column[i] = chain[i][j];
      s += column[i];
    }
    b.mean[j] = s / static_cast<double>(chain.size());
    std::sort(column.begin(), column.end());
    for (std::size_t l = 0; l < levels.size(); ++l) {
      b.quantiles(static_cast<Eigen::Index>(l), j) = quantile_sorted(column, levels[l] / 100.0);
    }
  }
  return b;
}

double band_coverage(const Bands& bands, const Vector& truth) {
  if (truth.size() != bands.mean.size() || bands.quantiles.rows() == 0) {
    throw ContractError("band coverage needs matching truth and non-empty bands");
  }
  if (truth.size() == 0) return 0.0;
  const Eigen::Index top = bands.quantiles.rows() - 1;
  Eigen::Index covered = 0;
  for (Eigen::Index j = 0; j < truth.size(); ++j) {
    if (truth[j] >= bands.quantiles(0, j) && truth[j] <= bands.quantiles(top, j)) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(truth.size());
}

std::vector<std::size_t> grid_counts(const GridBased& grid, Interval domain, std::size_t bins) {
  std::vector<std::size_t> counts(bins, 0);
  const double width = domain.length() / static_cast<double>(bins);
  for (double x : grid.interior_points) {
    auto b = static_cast<long>(std::floor((x - domain.lower) / width));
    b = std::clamp<long>(b, 0, static_cast<long>(bins) - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  return counts;
}

std::size_t GridHistogram::modal_bucket(std::size_t column) const {
  Eigen::Index row = 0;
  probability.col(static_cast<Eigen::Index>(column)).maxCoeff(&row);
  return static_cast<std::size_t>(row);
}

std::string GridHistogram::bucket_label(std::size_t row) const {
  const std::size_t lo = row * bucket_width;
  return std::to_string(lo) + "-" + std::to_string(lo + bucket_width - 1);
}

GridHistogram grid_histogram(const std::vector<GridBased>& chain, Interval domain,
                             std::size_t bins, std::size_t bucket_width) {
  if (chain.empty()) throw ContractError("grid histogram needs a non-empty chain");
  if (bins == 0 || bucket_width == 0) throw ContractError("histogram needs bins and buckets");
  std::vector<std::vector<std::size_t>> counts;
  counts.reserve(chain.size());
  std::size_t max_count = 0;
  for (const auto& g : chain) {
    counts.push_back(grid_counts(g, domain, bins));
    max_count = std::max(max_count, *std::max_element(counts.back().begin(), counts.back().end()));
  }
  GridHistogram h;
  h.domain = domain;
  h.bins = bins;
  h.bucket_width = bucket_width;
  const auto rows = static_cast<Eigen::Index>(max_count / bucket_width + 1);
  h.probability = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(bins));
  h.mean_count.assign(bins, 0.0);
  const double w = 1.0 / static_cast<double>(chain.size());
  for (const auto& c : counts) {
    for (std::size_t j = 0; j < bins; ++j) {
      h.probability(static_cast<Eigen::Index>(c[j] / bucket_width), static_cast<Eigen::Index>(j)) += w;
      h.mean_count[j] += w * static_cast<double>(c[j]);
    }
  }
  return h;
}

double fraction_in(const GridBased& grid, double lower, double upper) {
  if (grid.interior_points.empty()) return 0.0;
  const auto n = std::count_if(grid.interior_points.begin(), grid.interior_points.end(),
                               [&](double x) { return x >= lower && x <= upper; });
  return static_cast<double>(n) / static_cast<double>(grid.k());
}

ReconstructionError reconstruction_error(const std::vector<Vector>& predicted,
                                         const Vector& reference) {
  ReconstructionError e;
  e.per_sensor = Vector::Zero(reference.size());
  for (const auto& p : predicted) {
    if (p.size() != reference.size()) throw ContractError("prediction length mismatch");
    e.per_sensor += (p - reference).array().square().matrix();
  }
  e.total = std::sqrt(e.per_sensor.sum());
  e.per_sensor = e.per_sensor.array().sqrt().matrix();
  return e;
}

double tv_distance_discretized(const Vector& density_a, const Vector& density_b,
                               const Vector& weights) {
  if (density_a.size() != weights.size() || density_b.size() != weights.size()) {
    throw ContractError("densities and weights differ in length");
  }
  if ((density_a.array() < 0.0).any() || (density_b.array() < 0.0).any() ||
      (weights.array() < 0.0).any()) {
    throw ContractError("densities and weights must be nonnegative");
  }
  if (std::abs(density_a.dot(weights) - 1.0) > 1e-8 ||
      std::abs(density_b.dot(weights) - 1.0) > 1e-8) {
    throw ContractError("densities must be normalized");
  }
  return std::min(1.0, 0.5 * ((density_a - density_b).array().abs() * weights.array()).sum());
}

namespace {

// Surrogate error profile over a small discretization set, bounded by one.
double surrogate_error(std::size_t a) { return std::cos(1.7 * static_cast<double>(a) + 0.3); }

Vector normalize(Vector density, const Vector& weights) {
  return density / density.dot(weights);
}

}  // namespace

TvSweep perturbation_tv_sweep(const std::vector<double>& epsilons, double observation,
                             double noise_variance, std::size_t quadrature_points) {
  if (quadrature_points < 3) throw ContractError("quadrature needs at least three points");
  constexpr std::size_t kDiscretizations = 5;
  const double lo = -8.0, hi = 8.0;
  const auto n = static_cast<Eigen::Index>(quadrature_points);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  Vector u(n), weights(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u[i] = lo + h * static_cast<double>(i);
    weights[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
  }
  auto posterior = [&](auto forward) {
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = observation - forward(u[i]);
      d[i] = std::exp(-0.5 * u[i] * u[i] - 0.5 * r * r / noise_variance);
    }
    return d;
  };
  const Vector exact = normalize(posterior([](double x) { return x; }), weights);

  TvSweep out;
  for (double eps : epsilons) {
    // Marginal over a of the joint surrogate posterior, uniform prior on a.
    Vector joint = Vector::Zero(n);
    for (std::size_t a = 0; a < kDiscretizations; ++a) {
      const double shift = eps * surrogate_error(a);
      joint += posterior([shift](double x) { return x + shift; });
    }
    out.epsilon.push_back(eps);
    out.distance.push_back(tv_distance_discretized(exact, normalize(joint, weights), weights));
  }
  return out;
}

AcceptanceSummary acceptance_summary(const Tallies& tallies) {
  AcceptanceSummary s;
  s.u = tallies.u.rate();
  s.relocation = tallies.relocation.rate();
  s.dimension = tallies.dimension.rate();
  MoveTally pooled;
  pooled.attempted = tallies.relocation.attempted + tallies.dimension.attempted;
  pooled.accepted = tallies.relocation.accepted + tallies.dimension.accepted;
  s.a = pooled.rate();
  return s;
}

std::vector<double> running_mean(const std::vector<double>& trace) {
  std::vector<double> out(trace.size());
  double s = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    s += trace[i];
    out[i] = s / static_cast<double>(i + 1);
  }
  return out;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ContractError("KS distance needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace gridlearn
