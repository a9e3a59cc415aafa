#include "kgs/grid.hpp"

#include <cmath>
#include <numbers>

#include "fft.hpp"

namespace kgs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(-i k_m x_j) in centered indices equals the plain DFT kernel times
// (-1)^(j + m) per axis and an overall (-1)^(n/2).
void modulate(const GridSpec& grid, std::span<cplx> data, double scale) {
  const int n = grid.n();
  const double global = ((n / 2) % 2 == 0) ? 1.0 : -1.0;
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    const auto [a, b, c] = grid.unflatten(idx);
    const double s = ((a + b + c) % 2 == 0) ? 1.0 : -1.0;
    data[idx] *= s * scale * global;
  }
}

void checkerboard(const GridSpec& grid, std::span<cplx> data) {
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    const auto [a, b, c] = grid.unflatten(idx);
    if ((a + b + c) % 2 != 0) data[idx] = -data[idx];
  }
}

}  // namespace

GridSpec GridSpec::make(int n_per_axis, double box_length) {
  if (n_per_axis % 2 != 0) throw InvalidArgument("n_per_axis must be even");
  if (n_per_axis < 8) throw InvalidArgument("n_per_axis must be at least 8");
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw InvalidArgument("box_length must be positive");
  GridSpec g;
  g.n_ = n_per_axis;
  g.box_length_ = box_length;
  g.spacing_ = box_length / n_per_axis;
  g.freq_spacing_ = kTwoPi / box_length;
  return g;
}

std::array<double, 3> GridSpec::position(std::size_t idx) const noexcept {
  const auto [a, b, c] = unflatten(idx);
  return {coord(a), coord(b), coord(c)};
}

std::array<double, 3> GridSpec::wavevector(std::size_t idx) const noexcept {
  const auto [a, b, c] = unflatten(idx);
  return {freq(a), freq(b), freq(c)};
}

double GridSpec::k_norm(std::size_t idx) const noexcept {
  const auto k = wavevector(idx);
  return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
}

double GridSpec::x_norm(std::size_t idx) const noexcept {
  const auto x = position(idx);
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

double GridSpec::k_max() const noexcept { return std::sqrt(3.0) * k_nyquist(); }

SpectralField forward_transform(const RealField& f) {
  const GridSpec& grid = f.grid();
  std::vector<cplx> data(f.samples().begin(), f.samples().end());
  checkerboard(grid, data);
  detail::FftPlans::get(grid.n()).forward(data.data());
  modulate(grid, data, grid.cell_volume());
  return SpectralField(grid, std::move(data));
}

RealField bar_transform(const SpectralField& g) {
  const GridSpec& grid = g.grid();
  std::vector<cplx> data(g.samples().begin(), g.samples().end());
  checkerboard(grid, data);
  detail::FftPlans::get(grid.n()).backward(data.data());
  modulate(grid, data, grid.freq_cell_volume());
  return RealField(grid, std::move(data));
}

cplx inner_product(const RealField& f, const RealField& g) {
  f.check_same(g);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += std::conj(f[i]) * g[i];
  return acc * f.grid().cell_volume();
}

double l2_norm(const RealField& f) { return std::sqrt(std::max(0.0, inner_product(f, f).real())); }

double h1dot_seminorm(const RealField& u) {
  const GridSpec& grid = u.grid();
  const SpectralField uh = forward_transform(u);
  double acc = 0.0;
  for (std::size_t i = 0; i < uh.size(); ++i) {
    const double k = grid.k_norm(i);
    acc += k * k * std::norm(uh[i]);
  }
  return acc * grid.freq_cell_volume() / std::pow(kTwoPi, 3);
}

cplx spectral_integral(const SpectralField& g) {
  cplx acc = 0.0;
  for (const cplx& s : g.samples()) acc += s;
  return acc * g.grid().freq_cell_volume();
}

std::array<RealField, 3> gradient(const RealField& u) {
  const GridSpec& grid = u.grid();
  const SpectralField uh = forward_transform(u);
  const double inv = 1.0 / std::pow(kTwoPi, 3);
  std::array<RealField, 3> out;
  for (int a = 0; a < 3; ++a) {
    SpectralField d(grid);
    for (std::size_t i = 0; i < uh.size(); ++i) d[i] = cplx(0.0, grid.wavevector(i)[a]) * uh[i];
    out[a] = bar_transform(d);
    out[a] *= inv;
  }
  return out;
}

RealField normalized(const RealField& u) {
  const double n = l2_norm(u);
  if (!(n > 0.0)) throw InvalidArgument("cannot normalize a zero field");
  return (1.0 / n) * u;
}

}  // namespace kgs
