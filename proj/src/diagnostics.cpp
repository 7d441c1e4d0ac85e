#include "lssgld/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lssgld/rng.hpp"

namespace lssgld {

namespace detail {
double solve_assignment(const std::vector<double>& cost, std::size_t n);
}

double autocorrelation_time(std::span<const double> values,
                            std::span<const double> weights) {
  const std::size_t n = values.size();
  if (n < 100) throw std::invalid_argument("autocorrelation_time: need >= 100 samples");
  if (!weights.empty() && weights.size() != n)
    throw std::invalid_argument("autocorrelation_time: weights length mismatch");

  double mean;
  if (weights.empty()) {
    double s = 0.0;
    for (double v : values) s += v;
    mean = s / static_cast<double>(n);
  } else {
    double s = 0.0, w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += weights[i] * values[i];
      w += weights[i];
    }
    mean = s / w;
  }

  // Biased (1/n) autocovariance estimates, computed lazily by lag.
  auto autocov = [&](std::size_t t) {
    double s = 0.0;
    for (std::size_t i = 0; i + t < n; ++i)
      s += (values[i] - mean) * (values[i + t] - mean);
    return s / static_cast<double>(n);
  };

  const double a0 = autocov(0);
  if (a0 <= 0.0)
    throw std::invalid_argument("autocorrelation_time: degenerate (zero variance) chain");

  double tau = 0.5;
  for (std::size_t t = 1; t + 1 < n; t += 2) {
    const double pair = autocov(t) + autocov(t + 1);
    if (pair < 0.0) break;  // initial-positive-sequence truncation
    tau += pair / a0;
  }
  return tau;
}

MomentErrors covariance_error(std::span<const double> samples, std::size_t dim,
                              std::span<const double> true_cov) {
  if (dim == 0) throw std::invalid_argument("covariance_error: dim must be positive");
  const std::size_t count = samples.size() / dim;
  if (count < 2) throw std::invalid_argument("covariance_error: need >= 2 samples");
  if (true_cov.size() != dim * dim)
    throw std::invalid_argument("covariance_error: reference shape mismatch");

  std::vector<double> mean(dim, 0.0);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < dim; ++j) mean[j] += samples[i * dim + j];
  for (double& m : mean) m /= static_cast<double>(count);

  std::vector<double> cov(dim * dim, 0.0);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t r = 0; r < dim; ++r) {
      const double dr = samples[i * dim + r] - mean[r];
      for (std::size_t c = 0; c < dim; ++c)
        cov[r * dim + c] += dr * (samples[i * dim + c] - mean[c]);
    }
  for (double& v : cov) v /= static_cast<double>(count - 1);

  MomentErrors err;
  for (std::size_t j = 0; j < dim * dim; ++j) {
    const double diff = cov[j] - true_cov[j];
    err.mse += diff * diff;
    err.mean_abs += std::abs(diff);
  }
  err.mse /= static_cast<double>(dim * dim);
  err.mean_abs /= static_cast<double>(dim * dim);
  return err;
}

MomentErrors mean_error(std::span<const double> samples, std::size_t dim,
                        std::span<const double> true_mean) {
  if (dim == 0) throw std::invalid_argument("mean_error: dim must be positive");
  const std::size_t count = samples.size() / dim;
  if (count == 0) throw std::invalid_argument("mean_error: need >= 1 sample");
  if (true_mean.size() != dim)
    throw std::invalid_argument("mean_error: reference shape mismatch");
  std::vector<double> mean(dim, 0.0);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < dim; ++j) mean[j] += samples[i * dim + j];
  MomentErrors err;
  for (std::size_t j = 0; j < dim; ++j) {
    const double diff = mean[j] / static_cast<double>(count) - true_mean[j];
    err.mse += diff * diff;
    err.mean_abs += std::abs(diff);
  }
  err.mse /= static_cast<double>(dim);
  err.mean_abs /= static_cast<double>(dim);
  return err;
}

namespace {

std::vector<double> subsample(std::span<const double> pts, std::size_t count,
                              std::size_t dim, std::size_t keep, RngStream& rng) {
  auto idx = rng.sample_without_replacement(count, keep);
  std::sort(idx.begin(), idx.end());
  std::vector<double> out;
  out.reserve(keep * dim);
  for (std::size_t i : idx)
    out.insert(out.end(), pts.begin() + i * dim, pts.begin() + (i + 1) * dim);
  return out;
}

}  // namespace

double wasserstein2(std::span<const double> a, std::size_t na,
                    std::span<const double> b, std::size_t nb, std::size_t dim,
                    std::size_t max_points, std::uint64_t seed,
                    std::size_t* used_points) {
  if (na == 0 || nb == 0) throw std::invalid_argument("wasserstein2: empty point set");
  if (a.size() != na * dim || b.size() != nb * dim)
    throw std::invalid_argument("wasserstein2: dimension mismatch");
  if (max_points == 0) throw std::invalid_argument("wasserstein2: max_points must be positive");

  const std::size_t m = std::min({na, nb, max_points});
  RngStream rng(substream_seed(seed, 0x77325ULL));
  std::vector<double> pa = na > m ? subsample(a, na, dim, m, rng)
                                  : std::vector<double>(a.begin(), a.end());
  std::vector<double> pb = nb > m ? subsample(b, nb, dim, m, rng)
                                  : std::vector<double>(b.begin(), b.end());
  if (used_points) *used_points = m;

  std::vector<double> cost(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double c = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = pa[i * dim + k] - pb[j * dim + k];
        c += diff * diff;
      }
      cost[i * m + j] = c;
    }
  const double total = detail::solve_assignment(cost, m);
  return std::sqrt(std::max(total, 0.0) / static_cast<double>(m));
}

double KdeGrid::cell_mass() const {
  const double dx = (spec.xmax - spec.xmin) / static_cast<double>(spec.nx - 1);
  const double dy = (spec.ymax - spec.ymin) / static_cast<double>(spec.ny - 1);
  double s = 0.0;
  for (double v : density) s += v;
  return s * dx * dy;
}

KdeGrid kde_grid(std::span<const double> samples, std::size_t count,
                 double bandwidth, const KdeGridSpec& spec) {
  if (bandwidth <= 0.0) throw std::invalid_argument("kde_grid: bandwidth must be positive");
  if (count == 0 || samples.size() != 2 * count)
    throw std::invalid_argument("kde_grid: need 2D samples");
  if (spec.nx < 2 || spec.ny < 2) throw std::invalid_argument("kde_grid: grid too small");

  KdeGrid grid;
  grid.spec = spec;
  grid.density.assign(spec.nx * spec.ny, 0.0);
  const double dx = (spec.xmax - spec.xmin) / static_cast<double>(spec.nx - 1);
  const double dy = (spec.ymax - spec.ymin) / static_cast<double>(spec.ny - 1);
  const double inv_h2 = 1.0 / (bandwidth * bandwidth);
  const double norm = 1.0 / (2.0 * std::numbers::pi * bandwidth * bandwidth *
                             static_cast<double>(count));
  // Kernels truncated at 8 bandwidths; beyond that the weight is < 1e-13.
  const double cut = 8.0 * bandwidth;
  for (std::size_t s = 0; s < count; ++s) {
    const double px = samples[2 * s];
    const double py = samples[2 * s + 1];
    const auto ix0 = static_cast<std::ptrdiff_t>(std::floor((px - cut - spec.xmin) / dx));
    const auto ix1 = static_cast<std::ptrdiff_t>(std::ceil((px + cut - spec.xmin) / dx));
    const auto iy0 = static_cast<std::ptrdiff_t>(std::floor((py - cut - spec.ymin) / dy));
    const auto iy1 = static_cast<std::ptrdiff_t>(std::ceil((py + cut - spec.ymin) / dy));
    for (std::ptrdiff_t iy = std::max<std::ptrdiff_t>(iy0, 0);
         iy <= std::min<std::ptrdiff_t>(iy1, spec.ny - 1); ++iy) {
      const double gy = spec.ymin + static_cast<double>(iy) * dy;
      const double ry = (gy - py) * (gy - py);
      for (std::ptrdiff_t ix = std::max<std::ptrdiff_t>(ix0, 0);
           ix <= std::min<std::ptrdiff_t>(ix1, spec.nx - 1); ++ix) {
        const double gx = spec.xmin + static_cast<double>(ix) * dx;
        const double r2 = (gx - px) * (gx - px) + ry;
        grid.density[static_cast<std::size_t>(iy) * spec.nx + static_cast<std::size_t>(ix)] +=
            norm * std::exp(-0.5 * r2 * inv_h2);
      }
    }
  }
  return grid;
}

double scott_bandwidth(std::span<const double> samples, std::size_t count) {
  if (count < 2 || samples.size() != 2 * count)
    throw std::invalid_argument("scott_bandwidth: need >= 2 2D samples");
  double sd_sum = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    double m = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < count; ++i) m += samples[2 * i + j];
    m /= static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double diff = samples[2 * i + j] - m;
      m2 += diff * diff;
    }
    sd_sum += std::sqrt(m2 / static_cast<double>(count - 1));
  }
  return 0.5 * sd_sum * std::pow(static_cast<double>(count), -1.0 / 6.0);
}

KdeGridSpec kde_grid_cover(std::span<const double> samples, std::size_t count,
                           double bandwidth, std::size_t nx, std::size_t ny,
                           double pad) {
  KdeGridSpec spec;
  spec.nx = nx;
  spec.ny = ny;
  spec.xmin = spec.ymin = std::numeric_limits<double>::infinity();
  spec.xmax = spec.ymax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    spec.xmin = std::min(spec.xmin, samples[2 * i]);
    spec.xmax = std::max(spec.xmax, samples[2 * i]);
    spec.ymin = std::min(spec.ymin, samples[2 * i + 1]);
    spec.ymax = std::max(spec.ymax, samples[2 * i + 1]);
  }
  spec.xmin -= pad * bandwidth;
  spec.xmax += pad * bandwidth;
  spec.ymin -= pad * bandwidth;
  spec.ymax += pad * bandwidth;
  return spec;
}

double gradient_variance_profile(const TargetModel& model,
                                 std::span<const double> path, std::size_t points,
                                 const LaplacianOperator* op, std::size_t batch_size,
                                 std::size_t repeats, std::uint64_t seed) {
  const std::size_t d = model.dim();
  const std::size_t n = model.components();
  if (points == 0 || path.size() != points * d)
    throw std::invalid_argument("gradient_variance_profile: bad path shape");
  if (repeats < 2) throw std::invalid_argument("gradient_variance_profile: repeats must be >= 2");
  if (batch_size == 0 || batch_size > n)
    throw std::invalid_argument("gradient_variance_profile: batch size must lie in [1, n]");

  RngStream rng(substream_seed(seed, 0x6e01fULL));
  double max_var = 0.0;
  std::vector<double> mean_grad(d), sq_dev(d);
  for (std::size_t p = 0; p < points; ++p) {
    const std::span<const double> x = path.subspan(p * d, d);
    model.full_grad(x, mean_grad);
    std::vector<double> mg = op ? op->apply_inverse(mean_grad) : mean_grad;
    std::fill(sq_dev.begin(), sq_dev.end(), 0.0);
    for (std::size_t r = 0; r < repeats; ++r) {
      const auto batch = rng.sample_without_replacement(n, batch_size);
      const auto g = stochastic_gradient(model, x, batch, op);
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = g[j] - mg[j];
        sq_dev[j] += diff * diff;
      }
    }
    for (std::size_t j = 0; j < d; ++j)
      max_var = std::max(max_var, sq_dev[j] / static_cast<double>(repeats));
  }
  return max_var;
}

std::pair<double, double> nll_accuracy(const BlrTarget& data, std::span<const double> x) {
  const std::size_t n = data.components();
  double nll = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    nll += log1p_exp(-data.margin(i, x));
    const double score = data.dot(i, x);
    const int pred = score > 0.0 ? 1 : (score < 0.0 ? -1 : 0);  // ties are wrong
    if (pred == data.rows()[i].label) ++correct;
  }
  return {nll / static_cast<double>(n),
          static_cast<double>(correct) / static_cast<double>(n)};
}

}  // namespace lssgld
