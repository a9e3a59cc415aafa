#pragma once

#include <complex>

namespace kgs::detail {

/// Unnormalized FFTW plans for one cube size, shared process-wide.
///
/// Plans are created with FFTW_ESTIMATE so the chosen algorithm (and the
/// rounding pattern) does not depend on timing. Execution through the
/// new-array interface is thread-safe; creation is serialized internally.
class FftPlans {
 public:
  static const FftPlans& get(int n);

  ~FftPlans();
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  int n() const noexcept { return n_; }
  std::size_t half_size() const noexcept;

  /// In place, sum_j exp(-2 pi i m j / n) x_j.
  void forward(std::complex<double>* data) const;
  /// In place, sum_m exp(+2 pi i m j / n) x_m.
  void backward(std::complex<double>* data) const;
  /// Real to half-complex, output n * n * (n/2 + 1).
  void r2c(double* in, std::complex<double>* out) const;
  /// Half-complex to real; overwrites `in`.
  void c2r(std::complex<double>* in, double* out) const;

 private:
  explicit FftPlans(int n);

  int n_;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
  void* r2c_ = nullptr;
  void* c2r_ = nullptr;
};

/// Signed wave number index for FFT ordering, Nyquist mapped to -n/2.
inline int fft_wavenumber(int i, int n) noexcept { return i < n / 2 ? i : i - n; }

}  // namespace kgs::detail
