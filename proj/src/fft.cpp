#include "fft.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <new>

namespace fbq::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftWorkspace& FftWorkspace::for_size(int n) {
  thread_local std::map<int, std::unique_ptr<FftWorkspace>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftWorkspace>(n);
  return *slot;
}

FftWorkspace::FftWorkspace(int n) : n_(n) {
  const std::size_t nreal = static_cast<std::size_t>(n) * n;
  const std::size_t nspec = static_cast<std::size_t>(n) * (n / 2 + 1);
  real_ = fftw_alloc_real(nreal);
  spec_ = fftw_alloc_complex(nspec);
  if (real_ == nullptr || spec_ == nullptr) throw std::bad_alloc();
  // FFTW_ESTIMATE keeps the chosen algorithm, and hence the bits, identical
  // from run to run.
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_dft_r2c_2d(n, n, real_, spec_, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_c2r_2d(n, n, spec_, real_, FFTW_ESTIMATE);
}

FftWorkspace::~FftWorkspace() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(forward_);
  fftw_destroy_plan(backward_);
  fftw_free(real_);
  fftw_free(spec_);
}

void FftWorkspace::forward() { fftw_execute_dft_r2c(forward_, real_, spec_); }

void FftWorkspace::backward() { fftw_execute_dft_c2r(backward_, spec_, real_); }

}  // namespace fbq::detail
