#pragma once

#include <array>
#include <functional>

#include "kgs/grid.hpp"

namespace kgs {

/// Z(p) = sum over nonzero m in Z^3 of |m|^-p, analytically continued in p.
/// Pole at p = 3. Z(0) = -1.
double epstein_zeta(double p);

/// Mean of |x|^q over the unit cube centered at the origin (q > -3).
double cube_power_mean(double q);

/// Leading small-|k| behaviour f(k) ~ coefficient |k|^exponent + regular.
///
/// `regular` is the constant left over after subtracting the singular term
/// (only nonzero when a |k|^(exponent+2) correction lands on |k|^0).
/// A vanishing function is represented by coefficient 0.
struct PowerLaw {
  double coefficient = 0.0;
  double exponent = 0.0;
  double regular = 0.0;

  bool vanishes() const noexcept { return coefficient == 0.0 && regular == 0.0; }
  bool integrable() const noexcept { return coefficient == 0.0 || exponent > -3.0; }
  bool singular() const noexcept { return coefficient != 0.0 && exponent < 0.0; }
};

enum class KZeroPolicy {
  /// Trapezoid rule with the lattice-sum correction for the |k|^q singularity.
  lattice_corrected,
  /// Mean of the function over the origin cell.
  cell_average,
};

/// Weight to place at k = 0 so that dk^3 sum over the lattice reproduces the
/// integral of f(k) phi(k) for smooth phi, given the local form of f.
/// Returns +inf for a non-integrable singularity.
double origin_weight(const PowerLaw& law, double freq_spacing, KZeroPolicy policy);

/// Mean of f over the cube of side dk centered at 0. Quadrature nodes avoid
/// the origin; `singular_exponent` (> -3) shapes the radial substitution.
double k_zero_cell_average(const std::function<double(const std::array<double, 3>&)>& f,
                           const GridSpec& grid, double singular_exponent = 0.0);

/// Discrete weak L^p quasi-norm: max_j g*_j (j dk^3)^(1/p) over the decreasing
/// rearrangement of |g|.
double weak_lorentz_norm(const SpectralField& g, double p);

}  // namespace kgs
