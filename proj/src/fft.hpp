#pragma once

#include <fftw3.h>

#include <complex>
#include <span>

namespace fbq::detail {

/// Per-thread aligned scratch plus the shared FFTW plans for one grid size.
/// Plans are created once under a lock; execution uses the new-array API so
/// any number of threads may transform concurrently.
class FftWorkspace {
 public:
  static FftWorkspace& for_size(int n);

  FftWorkspace(const FftWorkspace&) = delete;
  FftWorkspace& operator=(const FftWorkspace&) = delete;
  ~FftWorkspace();

  std::span<double> real() { return {real_, static_cast<std::size_t>(n_) * n_}; }
  std::span<std::complex<double>> spectral() {
    return {reinterpret_cast<std::complex<double>*>(spec_),
            static_cast<std::size_t>(n_) * (n_ / 2 + 1)};
  }

  /// real() -> spectral(), unnormalized.
  void forward();
  /// spectral() -> real(); destroys spectral().
  void backward();

  explicit FftWorkspace(int n);

 private:
  int n_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan forward_;
  fftw_plan backward_;
};

}  // namespace fbq::detail
