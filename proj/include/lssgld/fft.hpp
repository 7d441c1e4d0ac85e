#ifndef LSSGLD_FFT_HPP_
#define LSSGLD_FFT_HPP_

#include <complex>
#include <cstddef>
#include <vector>

namespace lssgld::detail {

// Thin wrapper around a complex DFT backend of fixed length n.
// Supports arbitrary n (mixed radix). Plans are created once at
// construction; execution is const and safe to call concurrently with
// per-call buffers.
class Dft {
 public:
  explicit Dft(std::size_t n);
  ~Dft();

  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  std::size_t size() const { return n_; }

  // Unnormalized forward transform, in and out of length n.
  void forward(const std::complex<double>* in, std::complex<double>* out) const;
  // Unnormalized backward transform; caller divides by n.
  void backward(const std::complex<double>* in, std::complex<double>* out) const;

 private:
  std::size_t n_;
  void* fwd_;  // fftw_plan
  void* bwd_;
};

}  // namespace lssgld::detail

#endif  // LSSGLD_FFT_HPP_
