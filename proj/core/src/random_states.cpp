#include "kgs/random_states.hpp"

#include <cmath>

namespace kgs {

cplx BumpState::operator()(const std::array<double, 3>& x) const noexcept {
  cplx acc = 0.0;
  for (const auto& b : bumps) {
    const double dx = x[0] - b.center[0], dy = x[1] - b.center[1], dz = x[2] - b.center[2];
    acc += b.amplitude * std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * b.width * b.width));
  }
  return acc;
}

RealField BumpState::sample(const GridSpec& grid) const { return sample_position(grid, *this); }

BumpState random_bump_state(std::mt19937_64& rng, double box_length) {
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_real_distribution<double> log_width(std::log(0.3), std::log(2.0));
  std::uniform_real_distribution<double> pos(-0.25 * box_length, 0.25 * box_length);
  std::normal_distribution<double> amp;
  BumpState s;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    GaussianBump b;
    for (double& c : b.center) c = pos(rng);
    b.width = std::exp(log_width(rng));
    const double re = amp(rng);
    b.amplitude = cplx(re, amp(rng));
    s.bumps.push_back(b);
  }
  return s;
}

RealField random_normalized_state(const GridSpec& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return normalized(random_bump_state(rng, grid.box_length()).sample(grid));
}

SpectralField random_spectral_field(const GridSpec& grid, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd;
  SpectralField f(grid);
  for (auto& z : f.samples()) {
    const double re = nd(rng);
    z = scale * cplx(re, nd(rng));
  }
  return f;
}

}  // namespace kgs
