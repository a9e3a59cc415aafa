#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "kgs/grid.hpp"

namespace kgs {

struct GaussianBump {
  std::array<double, 3> center{};
  double width = 1.0;
  cplx amplitude = 1.0;
};

/// Analytic superposition of Gaussian bumps. It can be sampled on any grid,
/// which is what the refinement comparisons rely on.
struct BumpState {
  std::vector<GaussianBump> bumps;

  cplx operator()(const std::array<double, 3>& x) const noexcept;
  RealField sample(const GridSpec& grid) const;
};

/// 1 to 5 bumps, widths log-uniform in [0.3, 2], centers uniform in the inner
/// half box [-L/4, L/4]^3, complex normal amplitudes.
BumpState random_bump_state(std::mt19937_64& rng, double box_length);

/// A normalized sample of random_bump_state.
RealField random_normalized_state(const GridSpec& grid, std::uint64_t seed);

/// Independent complex normal samples at every frequency-lattice point.
SpectralField random_spectral_field(const GridSpec& grid, std::mt19937_64& rng, double scale = 1.0);

}  // namespace kgs
