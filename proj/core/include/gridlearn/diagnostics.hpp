#pragma once

// Chain summaries: percentile bands, grid-occupancy tables, reconstruction
// error, acceptance rates, running means, KS and total-variation distances.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gridlearn/core.hpp"

namespace gridlearn {

/// Linear interpolation between order statistics of an ascending sample,
/// p in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double p);

struct Bands {
  std::vector<double> levels;  // percentiles, e.g. 5, 10, 50, 90, 95
  Vector mean;
  Eigen::MatrixXd quantiles;   // levels.size() x abscissae
};

/// Per-coordinate mean and percentiles over a chain of equal-length vectors.
Bands percentile_bands(const std::vector<Vector>& chain,
                       std::vector<double> levels = {5.0, 10.0, 50.0, 90.0, 95.0});

/// Fraction of coordinates where truth lies between the lowest and highest
/// quantile rows of the bands.
double band_coverage(const Bands& bands, const Vector& truth);

/// Number of points in each of `bins` equal subintervals of `domain`.
std::vector<std::size_t> grid_counts(const GridBased& grid, Interval domain, std::size_t bins);

struct GridHistogram {
  Interval domain;
  std::size_t bins = 10;
  std::size_t bucket_width = 2;    // rows group counts {0,1}, {2,3}, ...
  Eigen::MatrixXd probability;     // bucket x subinterval; columns sum to one
  std::vector<double> mean_count;  // per subinterval

  std::size_t modal_bucket(std::size_t column) const;
  /// "lo-hi" label of a row.
  std::string bucket_label(std::size_t row) const;
};

/// Occupancy distribution per subinterval over a chain of grids.
GridHistogram grid_histogram(const std::vector<GridBased>& chain, Interval domain,
                             std::size_t bins = 10, std::size_t bucket_width = 2);

/// Fraction of a grid's points lying in [lower, upper].
double fraction_in(const GridBased& grid, double lower, double upper);

struct ReconstructionError {
  Vector per_sensor;     // sqrt(sum_n (G^{a_n}(u_n)_i - G(u)_i)^2)
  double total = 0.0;    // sqrt(sum_i per_sensor_i^2)
};

ReconstructionError reconstruction_error(const std::vector<Vector>& predicted,
                                         const Vector& reference);

/// 0.5 * sum_i |a_i - b_i| w_i for densities normalized against the weights.
/// Throws ContractError for negative or unnormalized input.
double tv_distance_discretized(const Vector& density_a, const Vector& density_b,
                               const Vector& weights);

struct TvSweep {
  std::vector<double> epsilon;
  std::vector<double> distance;
};

/// Scalar toy problem: u ~ N(0, 1), y = g(u) + noise with g(u) = u, and a
/// surrogate g^a(u) = u + epsilon * e(a) over a finite discretization set
/// with uniform prior. Both posteriors on u are computed by quadrature and
/// compared in total variation for each epsilon.
TvSweep perturbation_tv_sweep(const std::vector<double>& epsilons, double observation = 0.7,
                             double noise_variance = 0.1, std::size_t quadrature_points = 4001);

struct AcceptanceSummary {
  double u = 0.0;
  double a = 0.0;           // relocation / theta and birth/death pooled
  double relocation = 0.0;
  double dimension = 0.0;
};

AcceptanceSummary acceptance_summary(const Tallies& tallies);

/// Prefix means of a trace.
std::vector<double> running_mean(const std::vector<double>& trace);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace gridlearn
