#ifndef LSSGLD_SMOOTHING_OPERATOR_HPP_
#define LSSGLD_SMOOTHING_OPERATOR_HPP_

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lssgld/fft.hpp"

namespace lssgld {

// Circulant smoothing operator A = I - sigma * L with L the periodic 1D
// discrete Laplacian (first row of A: 1+2*sigma, -sigma, 0, ..., 0, -sigma).
// Eigenvalues are lambda_j = 1 + 2*sigma - 2*sigma*cos(2*pi*j/d); inverse
// and inverse-square-root applications run in O(d log d) via the DFT.
//
// An instance is immutable after construction and safe to share across
// threads; apply methods use per-call scratch only.
class LaplacianOperator {
 public:
  LaplacianOperator(std::size_t d, double sigma);

  std::size_t dim() const { return d_; }
  double sigma() const { return sigma_; }
  const std::vector<double>& spectrum() const { return spectrum_; }

  // Solves A * u = v. sigma == 0 returns v bit-for-bit.
  std::vector<double> apply_inverse(std::span<const double> v) const;

  // Applies A^{-1/2}; composing it twice equals apply_inverse.
  std::vector<double> apply_inverse_sqrt(std::span<const double> v) const;

  // d^{-1} sum_j lambda_j^{-1}, in (0, 1]. The spectral average appearing
  // in the discretization-error bounds.
  double gamma2() const;

  // d^{-1} sum_j lambda_j^{-2}. Governs E||A^{-1} eps||^2 for standard
  // normal eps and is the quantity the reference gamma table lists.
  double inv_spectrum_sq_mean() const;

  // max_j lambda_j (= 1 + 4*sigma for even d).
  double spectral_norm() const;

  // Full d x d matrix, row-major. Test/oracle helper; refuses d > 4096.
  std::vector<double> dense_materialize() const;

 private:
  // Frequency-domain multiply by `scale`, elementwise.
  std::vector<double> apply_scaled(std::span<const double> v,
                                   const std::vector<double>& scale) const;

  std::size_t d_;
  double sigma_;
  std::vector<double> spectrum_;
  std::vector<double> inv_spectrum_;
  std::vector<double> inv_sqrt_spectrum_;
  std::unique_ptr<detail::Dft> dft_;
};

}  // namespace lssgld

#endif  // LSSGLD_SMOOTHING_OPERATOR_HPP_
