#include "lssgld/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace lssgld::detail {

namespace {
// fftw planning is not thread-safe; execution is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Dft::Dft(std::size_t n) : n_(n), fwd_(nullptr), bwd_(nullptr) {
  if (n == 0) throw std::invalid_argument("Dft: length must be positive");
  std::vector<std::complex<double>> scratch_in(n), scratch_out(n);
  auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
  auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
  std::lock_guard<std::mutex> lock(plan_mutex());
  // FFTW_UNALIGNED so plans work with plain heap buffers at execute time.
  fwd_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_BACKWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!fwd_ || !bwd_) throw std::runtime_error("Dft: planning failed");
}

Dft::~Dft() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Dft::forward(const std::complex<double>* in,
                  std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(fwd_),
                   reinterpret_cast<fftw_complex*>(
                       const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void Dft::backward(const std::complex<double>* in,
                   std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(bwd_),
                   reinterpret_cast<fftw_complex*>(
                       const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace lssgld::detail
