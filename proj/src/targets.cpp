#include "lssgld/targets.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lssgld/rng.hpp"

namespace lssgld {

double log1p_exp(double z) {
  if (z > 30.0) return z;  // exp(-z) below double noise floor
  if (z < -30.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

double logistic(double z) {  // 1 / (1 + exp(-z))
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void TargetModel::full_grad(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = components();
  const std::size_t d = dim();
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> g(d);
  for (std::size_t i = 0; i < n; ++i) {
    component_grad(i, x, g);
    for (std::size_t j = 0; j < d; ++j) out[j] += g[j];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) out[j] *= inv_n;
}

double TargetModel::log_density_unnormalized(std::span<const double>) const {
  throw std::logic_error("target does not expose a log-density");
}

// ---------------------------------------------------------------- Gaussian

GaussianTarget::GaussianTarget(std::vector<double> mean,
                               std::vector<double> covariance_row_major,
                               std::size_t n_components)
    : mean_(std::move(mean)), cov_(std::move(covariance_row_major)), n_(n_components) {
  const std::size_t d = mean_.size();
  if (d == 0 || cov_.size() != d * d)
    throw std::invalid_argument("GaussianTarget: covariance shape mismatch");
  if (n_ == 0) throw std::invalid_argument("GaussianTarget: need at least one component");
  Eigen::Map<const Eigen::MatrixXd> cov(cov_.data(), d, d);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("GaussianTarget: covariance is not positive definite");
  Eigen::MatrixXd prec = llt.solve(Eigen::MatrixXd::Identity(d, d));
  precision_.assign(prec.data(), prec.data() + d * d);
}

void GaussianTarget::component_grad(std::size_t i, std::span<const double> x,
                                    std::span<double> out) const {
  if (i >= n_) throw std::out_of_range("GaussianTarget: component index");
  full_grad(x, out);
}

void GaussianTarget::full_grad(std::span<const double> x, std::span<double> out) const {
  const std::size_t d = mean_.size();
  if (x.size() != d || out.size() != d)
    throw std::invalid_argument("GaussianTarget: dimension mismatch");
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += precision_[r * d + c] * (x[c] - mean_[c]);
    out[r] = s;
  }
}

double GaussianTarget::log_density_unnormalized(std::span<const double> x) const {
  const std::size_t d = mean_.size();
  double q = 0.0;
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      q += (x[r] - mean_[r]) * precision_[r * d + c] * (x[c] - mean_[c]);
  return -0.5 * q;
}

// ----------------------------------------------------------- mixture pair

MixturePairTarget::MixturePairTarget(std::vector<std::pair<double, double>> centers)
    : centers_(std::move(centers)) {
  if (centers_.empty()) throw std::invalid_argument("MixturePairTarget: no centers");
}

void MixturePairTarget::component_grad(std::size_t i, std::span<const double> x,
                                       std::span<double> out) const {
  if (i >= centers_.size()) throw std::out_of_range("MixturePairTarget: component index");
  if (x.size() != 2 || out.size() != 2)
    throw std::invalid_argument("MixturePairTarget: dimension mismatch");
  const auto [ax, ay] = centers_[i];
  const double z = 2.0 * (x[0] * ax + x[1] * ay);
  // 2 / (1 + 2 e^z), evaluated without overflowing the exponential. This is
  // the exact derivative of component_logf; it matches the commonly printed
  // 2 / (2 + e^z) variant at z = 0 and in the z -> +inf limit but, unlike
  // it, keeps the gradient consistent with the density the MH reference
  // evaluates (the variant misplaces the stationary point of the lighter
  // mixture mode).
  double w;
  if (z > 700.0) {
    w = 0.0;
  } else if (z < -700.0) {
    w = 2.0;
  } else {
    w = 2.0 / (1.0 + 2.0 * std::exp(z));
  }
  out[0] = x[0] - ax + w * ax;
  out[1] = x[1] - ay + w * ay;
}

double MixturePairTarget::component_logf(std::size_t i, std::span<const double> x) const {
  if (i >= centers_.size()) throw std::out_of_range("MixturePairTarget: component index");
  const auto [ax, ay] = centers_[i];
  const double dx = x[0] - ax;
  const double dy = x[1] - ay;
  const double z = 2.0 * (ax * x[0] + ay * x[1]);
  // log(2/3 + (1/3) e^{-z}), stabilized for either sign of z.
  double logmix;
  if (z >= 0.0) {
    logmix = std::log((2.0 + std::exp(-z)) / 3.0);
  } else {
    logmix = -z + std::log((2.0 * std::exp(z) + 1.0) / 3.0);
  }
  return 0.5 * (dx * dx + dy * dy) - logmix;
}

double MixturePairTarget::log_density_unnormalized(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < centers_.size(); ++i) s += component_logf(i, x);
  return -s / static_cast<double>(centers_.size());
}

std::vector<std::pair<double, double>> sample_mixture_centers(std::uint64_t seed,
                                                              std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample_mixture_centers: n must be positive");
  RngStream rng(seed);
  const double sd = std::sqrt(2.0);
  std::vector<std::pair<double, double>> centers(n);
  for (auto& [cx, cy] : centers) {
    cx = 2.0 + sd * rng.gaussian();
    cy = 2.0 + sd * rng.gaussian();
  }
  return centers;
}

// -------------------------------------------------------------------- BLR

BlrTarget::BlrTarget(std::vector<Row> rows, std::size_t dim, double prior_lambda,
                     double prior_theta, double epsilon_norm)
    : rows_(std::move(rows)), d_(dim), lambda_(prior_lambda), theta_(prior_theta),
      eps_(epsilon_norm) {
  if (rows_.empty()) throw std::invalid_argument("BlrTarget: empty dataset");
  if (d_ == 0) throw std::invalid_argument("BlrTarget: dimension must be positive");
  for (const Row& r : rows_) {
    if (r.label != 1 && r.label != -1)
      throw std::invalid_argument("BlrTarget: labels must be +1 or -1");
    for (const auto& [idx, val] : r.features) {
      (void)val;
      if (idx >= d_) throw std::invalid_argument("BlrTarget: feature index out of range");
    }
  }
}

double BlrTarget::dot(std::size_t i, std::span<const double> x) const {
  double s = 0.0;
  for (const auto& [idx, val] : rows_[i].features) s += val * x[idx];
  return s;
}

double BlrTarget::margin(std::size_t i, std::span<const double> x) const {
  return static_cast<double>(rows_[i].label) * dot(i, x);
}

void BlrTarget::component_grad(std::size_t i, std::span<const double> x,
                               std::span<double> out) const {
  if (i >= rows_.size()) throw std::out_of_range("BlrTarget: component index");
  if (x.size() != d_ || out.size() != d_)
    throw std::invalid_argument("BlrTarget: dimension mismatch");
  double norm_sq = 0.0;
  for (double v : x) norm_sq += v * v;
  const double norm = std::sqrt(norm_sq);
  const double prior_log = lambda_ / std::max(norm_sq, eps_ * eps_);
  const double prior_exp = theta_ / std::max(norm, eps_);
  for (std::size_t j = 0; j < d_; ++j) out[j] = (prior_log + prior_exp) * x[j];

  const double y = static_cast<double>(rows_[i].label);
  const double m = margin(i, x);
  const double n = static_cast<double>(rows_.size());
  const double coeff = -n * y * logistic(-m);  // d/dm of n log(1+e^{-m})
  for (const auto& [idx, val] : rows_[i].features) out[idx] += coeff * val;
}

double BlrTarget::component_logf(std::size_t i, std::span<const double> x) const {
  if (i >= rows_.size()) throw std::out_of_range("BlrTarget: component index");
  double norm_sq = 0.0;
  for (double v : x) norm_sq += v * v;
  const double norm = std::sqrt(norm_sq);
  const double n = static_cast<double>(rows_.size());
  return n * log1p_exp(-margin(i, x)) + lambda_ * std::log(std::max(norm, eps_)) +
         theta_ * norm;
}

BlrTarget load_libsvm(const std::string& path, std::size_t declared_dim,
                      double prior_lambda, double prior_theta) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_libsvm: cannot open " + path);
  std::vector<BlrTarget::Row> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double raw_label;
    if (!(ls >> raw_label))
      throw std::runtime_error("load_libsvm: bad label at line " + std::to_string(lineno));
    BlrTarget::Row row;
    row.label = (raw_label == 1.0) ? 1 : -1;
    std::string tok;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("load_libsvm: malformed feature at line " +
                                 std::to_string(lineno));
      std::size_t idx;
      double val;
      try {
        idx = std::stoul(tok.substr(0, colon));
        val = std::stod(tok.substr(colon + 1));
      } catch (const std::exception&) {
        throw std::runtime_error("load_libsvm: malformed feature at line " +
                                 std::to_string(lineno));
      }
      if (idx == 0)
        throw std::runtime_error("load_libsvm: indices are 1-based, got 0 at line " +
                                 std::to_string(lineno));
      max_index = std::max(max_index, idx);
      row.features.emplace_back(idx - 1, val);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("load_libsvm: empty file " + path);
  const std::size_t d = declared_dim > 0 ? declared_dim : max_index;
  if (declared_dim > 0 && max_index > declared_dim)
    throw std::runtime_error("load_libsvm: feature index exceeds declared dimension");
  return BlrTarget(std::move(rows), d, prior_lambda, prior_theta);
}

BlrTarget make_synthetic_logistic(std::size_t n, std::size_t dim, std::uint64_t seed,
                                  double prior_theta) {
  RngStream rng(seed);
  std::vector<double> truth(dim);
  for (double& w : truth) w = rng.gaussian();
  const std::size_t active = std::max<std::size_t>(1, dim / 9);  // a3a-like sparsity
  std::vector<BlrTarget::Row> rows(n);
  for (auto& row : rows) {
    auto idx = rng.sample_without_replacement(dim, active);
    std::sort(idx.begin(), idx.end());
    double score = 0.0;
    for (std::size_t j : idx) {
      row.features.emplace_back(j, 1.0);
      score += truth[j];
    }
    row.label = rng.uniform() < logistic(score) ? 1 : -1;
  }
  return BlrTarget(std::move(rows), dim, 1.0, prior_theta);
}

std::vector<double> stochastic_gradient(const TargetModel& model,
                                        std::span<const double> x,
                                        std::span<const std::size_t> batch,
                                        const LaplacianOperator* op) {
  if (batch.empty()) throw std::invalid_argument("stochastic_gradient: empty batch");
  const std::size_t d = model.dim();
  std::vector<double> g(d, 0.0), gi(d);
  for (std::size_t i : batch) {
    model.component_grad(i, x, gi);
    for (std::size_t j = 0; j < d; ++j) g[j] += gi[j];
  }
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (double& v : g) v *= inv_b;
  if (op) return op->apply_inverse(g);
  return g;
}

}  // namespace lssgld
