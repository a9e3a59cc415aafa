#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "kgs/error.hpp"

namespace kgs {

using cplx = std::complex<double>;

/// Periodic cubic box of side L sampled with N points per axis.
///
/// Position lattice: x_j = h (j - N/2), j = 0..N-1, with h = L/N.
/// Frequency lattice: k_m = dk (m - N/2), with dk = 2 pi / L. The Nyquist
/// plane sits at index 0 (k = -N dk / 2). Both lattices contain the origin
/// at index N/2 along each axis. Flat indices are row-major (i0 slowest).
class GridSpec {
 public:
  GridSpec() = default;

  /// Throws InvalidArgument for odd or too small N, or non-positive L.
  static GridSpec make(int n_per_axis, double box_length);

  int n() const noexcept { return n_; }
  double box_length() const noexcept { return box_length_; }
  double spacing() const noexcept { return spacing_; }
  double freq_spacing() const noexcept { return freq_spacing_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_ * n_; }

  /// h^3, the position-space quadrature weight.
  double cell_volume() const noexcept { return spacing_ * spacing_ * spacing_; }
  /// dk^3, the frequency-space quadrature weight.
  double freq_cell_volume() const noexcept { return freq_spacing_ * freq_spacing_ * freq_spacing_; }

  double coord(int j) const noexcept { return spacing_ * (j - n_ / 2); }
  double freq(int m) const noexcept { return freq_spacing_ * (m - n_ / 2); }

  std::array<int, 3> unflatten(std::size_t idx) const noexcept {
    const auto n = static_cast<std::size_t>(n_);
    return {static_cast<int>(idx / (n * n)), static_cast<int>((idx / n) % n),
            static_cast<int>(idx % n)};
  }
  std::size_t flatten(int i0, int i1, int i2) const noexcept {
    const auto n = static_cast<std::size_t>(n_);
    return (static_cast<std::size_t>(i0) * n + static_cast<std::size_t>(i1)) * n +
           static_cast<std::size_t>(i2);
  }

  std::array<double, 3> position(std::size_t idx) const noexcept;
  std::array<double, 3> wavevector(std::size_t idx) const noexcept;
  double k_norm(std::size_t idx) const noexcept;
  double x_norm(std::size_t idx) const noexcept;

  /// Flat index of the lattice origin (same in both representations).
  std::size_t origin_index() const noexcept { return flatten(n_ / 2, n_ / 2, n_ / 2); }
  /// Largest |k| on the lattice (the corner of the frequency cube).
  double k_max() const noexcept;
  /// Per-axis Nyquist magnitude pi / h.
  double k_nyquist() const noexcept { return freq_spacing_ * (n_ / 2); }

  friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
    return a.n_ == b.n_ && a.box_length_ == b.box_length_;
  }

 private:
  int n_ = 0;
  double box_length_ = 0.0;
  double spacing_ = 0.0;
  double freq_spacing_ = 0.0;
};

inline GridSpec make_grid(int n_per_axis, double box_length) {
  return GridSpec::make(n_per_axis, box_length);
}

struct PositionDomain {};
struct FrequencyDomain {};

/// Complex samples of a function on one of the two lattices of a grid.
template <class Domain>
class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid) : grid_(grid), samples_(grid.size()) {}
  Field(const GridSpec& grid, std::vector<cplx> samples) : grid_(grid), samples_(std::move(samples)) {
    if (samples_.size() != grid_.size()) throw InvalidArgument("field sample count does not match grid");
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::span<cplx> samples() noexcept { return samples_; }
  std::span<const cplx> samples() const noexcept { return samples_; }
  cplx* data() noexcept { return samples_.data(); }
  const cplx* data() const noexcept { return samples_.data(); }

  cplx& operator[](std::size_t i) noexcept { return samples_[i]; }
  const cplx& operator[](std::size_t i) const noexcept { return samples_[i]; }

  Field& operator+=(const Field& o) {
    check_same(o);
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += o.samples_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= o.samples_[i];
    return *this;
  }
  Field& operator*=(cplx a) noexcept {
    for (auto& s : samples_) s *= a;
    return *this;
  }
  /// this += a * o
  Field& axpy(cplx a, const Field& o) {
    check_same(o);
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += a * o.samples_[i];
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(cplx s, Field a) { return a *= s; }
  friend Field operator*(Field a, cplx s) { return a *= s; }

  void check_same(const Field& o) const {
    if (!(grid_ == o.grid_)) throw InvalidArgument("fields live on different grids");
  }

 private:
  GridSpec grid_;
  std::vector<cplx> samples_;
};

/// Samples on the position lattice (u, densities, potentials). Values are complex.
using RealField = Field<PositionDomain>;
/// Samples on the frequency lattice (f, rho-hat, W, v, omega).
using SpectralField = Field<FrequencyDomain>;

/// F(f)(k) = h^3 sum_x exp(-i k.x) f(x).
SpectralField forward_transform(const RealField& f);
/// Fbar(g)(x) = dk^3 sum_k exp(i k.x) g(k). Fbar(F(f)) = (2 pi)^3 f.
RealField bar_transform(const SpectralField& g);

/// h^3 sum conj(f) g.
cplx inner_product(const RealField& f, const RealField& g);
double l2_norm(const RealField& f);
/// ||u||^2 in the homogeneous H^1 seminorm, evaluated spectrally.
double h1dot_seminorm(const RealField& u);
/// dk^3 sum g.
cplx spectral_integral(const SpectralField& g);
/// Spectral derivatives d/dx_a u for a = 0, 1, 2.
std::array<RealField, 3> gradient(const RealField& u);

/// Sample a function of position on the lattice.
template <class Fn>
RealField sample_position(const GridSpec& grid, Fn&& fn) {
  RealField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.position(i));
  return out;
}

/// Sample a function of the wave vector on the lattice.
template <class Fn>
SpectralField sample_frequency(const GridSpec& grid, Fn&& fn) {
  SpectralField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.wavevector(i));
  return out;
}

/// u / ||u||_{L^2}. Throws on a zero field.
RealField normalized(const RealField& u);

}  // namespace kgs
