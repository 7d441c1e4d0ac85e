#include "lssgld/smoothing_operator.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace lssgld {

namespace {
constexpr double kImagResidueTol = 1e-10;
}

LaplacianOperator::LaplacianOperator(std::size_t d, double sigma)
    : d_(d), sigma_(sigma) {
  if (d == 0) throw std::invalid_argument("LaplacianOperator: dimension must be positive");
  if (sigma < 0.0) throw std::invalid_argument("LaplacianOperator: sigma must be nonnegative");
  spectrum_.resize(d);
  inv_spectrum_.resize(d);
  inv_sqrt_spectrum_.resize(d);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t j = 0; j < d; ++j) {
    const double lam =
        1.0 + 2.0 * sigma - 2.0 * sigma * std::cos(two_pi * static_cast<double>(j) / static_cast<double>(d));
    spectrum_[j] = lam;
    inv_spectrum_[j] = 1.0 / lam;
    inv_sqrt_spectrum_[j] = 1.0 / std::sqrt(lam);
  }
  spectrum_[0] = 1.0;  // exact: the cosine term cancels at j = 0
  inv_spectrum_[0] = 1.0;
  inv_sqrt_spectrum_[0] = 1.0;
  if (sigma > 0.0) dft_ = std::make_unique<detail::Dft>(d);
}

std::vector<double> LaplacianOperator::apply_scaled(
    std::span<const double> v, const std::vector<double>& scale) const {
  if (v.size() != d_)
    throw std::invalid_argument("LaplacianOperator: input length does not match dimension");
  if (sigma_ == 0.0) return {v.begin(), v.end()};

  std::vector<std::complex<double>> time(d_), freq(d_);
  double norm_sq = 0.0;
  for (std::size_t j = 0; j < d_; ++j) {
    time[j] = v[j];
    norm_sq += v[j] * v[j];
  }
  dft_->forward(time.data(), freq.data());
  for (std::size_t j = 0; j < d_; ++j) freq[j] *= scale[j];
  dft_->backward(freq.data(), time.data());

  const double inv_d = 1.0 / static_cast<double>(d_);
  std::vector<double> out(d_);
  double max_imag = 0.0;
  for (std::size_t j = 0; j < d_; ++j) {
    out[j] = time[j].real() * inv_d;
    max_imag = std::max(max_imag, std::abs(time[j].imag()) * inv_d);
  }
  // The spectrum is real and symmetric, so a real input must come back
  // real to round-off. Anything bigger means a broken transform backend.
  if (max_imag > kImagResidueTol * std::sqrt(norm_sq))
    throw std::runtime_error("LaplacianOperator: non-real transform output");
  return out;
}

std::vector<double> LaplacianOperator::apply_inverse(std::span<const double> v) const {
  return apply_scaled(v, inv_spectrum_);
}

std::vector<double> LaplacianOperator::apply_inverse_sqrt(std::span<const double> v) const {
  return apply_scaled(v, inv_sqrt_spectrum_);
}

double LaplacianOperator::gamma2() const {
  double s = 0.0;
  for (double x : inv_spectrum_) s += x;
  return s / static_cast<double>(d_);
}

double LaplacianOperator::inv_spectrum_sq_mean() const {
  double s = 0.0;
  for (double x : inv_spectrum_) s += x * x;
  return s / static_cast<double>(d_);
}

double LaplacianOperator::spectral_norm() const {
  double m = 0.0;
  for (double lam : spectrum_) m = std::max(m, lam);
  return m;
}

std::vector<double> LaplacianOperator::dense_materialize() const {
  if (d_ > 4096)
    throw std::invalid_argument("dense_materialize: refusing d > 4096");
  std::vector<double> first_row(d_, 0.0);
  first_row[0] = 1.0 + 2.0 * sigma_;
  if (d_ > 1) {
    first_row[1] -= sigma_;
    first_row[d_ - 1] -= sigma_;  // d = 2 aliases both off-diagonals here
  } else {
    first_row[0] = 1.0;
  }
  std::vector<double> mat(d_ * d_);
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t j = 0; j < d_; ++j)
      mat[i * d_ + j] = first_row[(j + d_ - i) % d_];
  return mat;
}

}  // namespace lssgld
