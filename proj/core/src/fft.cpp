#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace kgs::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

const FftPlans& FftPlans::get(int n) {
  // The mutex must outlive the cache, so it is constructed first.
  std::mutex& mutex = planner_mutex();
  static std::map<int, std::unique_ptr<FftPlans>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::unique_ptr<FftPlans>(new FftPlans(n))).first;
  return *it->second;
}

FftPlans::FftPlans(int n) : n_(n) {
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  auto* buf = fftw_alloc_complex(total);
  auto* half = fftw_alloc_complex(half_size());
  auto* real = fftw_alloc_real(total);
  fwd_ = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_FORWARD, flags);
  bwd_ = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_BACKWARD, flags);
  r2c_ = fftw_plan_dft_r2c_3d(n, n, n, real, half, flags);
  c2r_ = fftw_plan_dft_c2r_3d(n, n, n, half, real, flags);
  fftw_free(buf);
  fftw_free(half);
  fftw_free(real);
}

FftPlans::~FftPlans() {
  std::lock_guard lock(planner_mutex());
  for (void* p : {fwd_, bwd_, r2c_, c2r_}) fftw_destroy_plan(static_cast<fftw_plan>(p));
}

std::size_t FftPlans::half_size() const noexcept {
  return static_cast<std::size_t>(n_) * n_ * (n_ / 2 + 1);
}

void FftPlans::forward(std::complex<double>* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void FftPlans::backward(std::complex<double>* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
}

void FftPlans::r2c(double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), in, reinterpret_cast<fftw_complex*>(out));
}

void FftPlans::c2r(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace kgs::detail
