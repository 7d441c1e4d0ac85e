#ifndef LSSGLD_DIAGNOSTICS_HPP_
#define LSSGLD_DIAGNOSTICS_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lssgld/samplers.hpp"
#include "lssgld/targets.hpp"

namespace lssgld {

// Integrated autocorrelation time tau = 1/2 + sum_{t>=1} A(t)/A(0) of a
// scalar series, truncated at the first lag pair (2t-1, 2t) whose
// autocovariance sum is negative (Geyer initial positive sequence).
// Optional per-sample weights (step sizes) enter the mean estimate.
// Throws on fewer than 100 samples or a degenerate (zero variance) series.
double autocorrelation_time(std::span<const double> values,
                            std::span<const double> weights = {});

struct MomentErrors {
  double mse = 0.0;       // mean elementwise squared error
  double mean_abs = 0.0;  // mean elementwise absolute error
};

// Empirical covariance of `samples` (count x dim, row-major) against a
// reference covariance (dim x dim, row-major). Needs at least 2 samples.
MomentErrors covariance_error(std::span<const double> samples, std::size_t dim,
                              std::span<const double> true_cov);

// Empirical mean against a reference mean; (1/d) sum_j (mean_j - mu_j)^2.
MomentErrors mean_error(std::span<const double> samples, std::size_t dim,
                        std::span<const double> true_mean);

// Exact empirical 2-Wasserstein distance between two point sets of equal
// size (subsampled uniformly to max_points with `seed` when larger),
// via a min-cost assignment with squared euclidean cost.
// used_points, when non-null, reports the matched set size.
double wasserstein2(std::span<const double> a, std::size_t na,
                    std::span<const double> b, std::size_t nb, std::size_t dim,
                    std::size_t max_points = 2000, std::uint64_t seed = 0,
                    std::size_t* used_points = nullptr);

struct KdeGridSpec {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  std::size_t nx = 0, ny = 0;
};

struct KdeGrid {
  KdeGridSpec spec;
  std::vector<double> density;  // ny rows x nx cols, row-major
  double cell_mass() const;     // Riemann-sum total
};

// Gaussian-kernel density estimate of 2D samples on a rectangular grid.
KdeGrid kde_grid(std::span<const double> samples, std::size_t count,
                 double bandwidth, const KdeGridSpec& spec);

// Scott's rule bandwidth for 2D samples (count x 2 row-major).
double scott_bandwidth(std::span<const double> samples, std::size_t count);

// Grid spec covering the sample range plus `pad` bandwidths on each side.
KdeGridSpec kde_grid_cover(std::span<const double> samples, std::size_t count,
                           double bandwidth, std::size_t nx, std::size_t ny,
                           double pad = 6.0);

// Maximum, over path points and coordinates, of the empirical variance of
// smoothed mini-batch gradients around the smoothed full-batch gradient.
// `path` is point-count x dim row-major; op == nullptr means no smoothing.
double gradient_variance_profile(const TargetModel& model,
                                 std::span<const double> path, std::size_t points,
                                 const LaplacianOperator* op, std::size_t batch_size,
                                 std::size_t repeats, std::uint64_t seed);

// Mean per-example negative log-likelihood and 0/1 accuracy of the logistic
// model with parameter x on the rows of `data`. Zero margins count as wrong.
std::pair<double, double> nll_accuracy(const BlrTarget& data, std::span<const double> x);

}  // namespace lssgld

#endif  // LSSGLD_DIAGNOSTICS_HPP_
