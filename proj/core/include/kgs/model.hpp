#pragma once

#include <array>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "kgs/grid.hpp"
#include "kgs/lattice_sums.hpp"

namespace kgs {

enum class PotentialKind { harmonic, gaussian_well, soft_coulomb };

/// Electronic potential V(x).
///   harmonic:       omega0^2 |x|^2
///   gaussian_well:  -depth exp(-|x|^2 / (2 width^2))
///   soft_coulomb:   -charge / sqrt(|x|^2 + softening^2)
struct PotentialSpec {
  PotentialKind kind = PotentialKind::harmonic;
  double omega0 = 1.0;
  double depth = 1.0;
  double width = 1.0;
  double charge = 1.0;
  double softening = 0.1;

  static PotentialSpec harmonic(double omega0 = 1.0);
  static PotentialSpec gaussian_well(double depth, double width);
  static PotentialSpec soft_coulomb(double charge, double softening);

  void validate() const;
  bool confining() const noexcept { return kind == PotentialKind::harmonic; }
  double operator()(const std::array<double, 3>& x) const noexcept;
};

enum class DispersionKind { relativistic, constant_one, acoustic };

/// omega(k): sqrt(k^2 + m^2), 1, or c min(|k|, cap).
struct DispersionSpec {
  DispersionKind kind = DispersionKind::constant_one;
  double mass = 0.0;
  double slope = 1.0;

  static DispersionSpec relativistic(double mass);
  static DispersionSpec constant_one();
  static DispersionSpec acoustic(double slope);

  void validate() const;
  double operator()(double k, double cap) const noexcept;
  /// omega ~ a |k|^p near k = 0.
  PowerLaw near_zero() const noexcept;
};

enum class CouplingKind { nelson, polaron, phonon };
enum class IrRegularizer { smooth, sharp };

/// v(k):
///   nelson: omega^(-1/2) chi_kappa, chi_kappa = |k|/sqrt(k^2+kappa^2) (smooth)
///           or 1_{|k| >= kappa} (sharp); kappa = 0 means chi = 1
///   polaron: 1/|k|
///   phonon:  |k|^(1/2), ultraviolet control left to the cutoff
struct CouplingSpec {
  CouplingKind kind = CouplingKind::polaron;
  double kappa = 0.0;
  IrRegularizer regularizer = IrRegularizer::smooth;

  static CouplingSpec nelson(double kappa = 0.0, IrRegularizer reg = IrRegularizer::smooth);
  static CouplingSpec polaron();
  static CouplingSpec phonon();

  void validate() const;
  double chi(double k) const noexcept;
  /// v at k != 0 given omega(k).
  double operator()(double k, double omega) const noexcept;
};

struct ModelSpec {
  PotentialSpec potential;
  DispersionSpec dispersion;
  CouplingSpec coupling;
  double g = 0.0;
  double uv_cutoff = std::numeric_limits<double>::infinity();
  double split_radius = 1.0;
  KZeroPolicy k_zero = KZeroPolicy::lattice_corrected;

  void validate() const;
  /// Local form of v^2/omega (W at g = 1) near k = 0.
  PowerLaw kernel_near_zero() const;
  /// Local form of v^2/omega^2 near k = 0.
  PowerLaw field_l2_near_zero() const;
};

/// W = g^2 v^2 / omega on the frequency lattice, zero beyond the cutoff.
struct KernelW {
  SpectralField samples;
  double k0_value = 0.0;
  double split_radius = 1.0;
  double uv_cutoff = std::numeric_limits<double>::infinity();

  const GridSpec& grid() const noexcept { return samples.grid(); }
};

/// Per-mode omega and unit-coupling v, with effective origin values chosen so
/// that omega |f_u|^2 = W |rho-hat|^2 holds at every lattice point.
struct FieldModes {
  SpectralField omega;
  SpectralField v;
  /// Origin weight of v^2/omega^2 (L^2 norm of f); 0 when flagged divergent.
  double l2_origin_weight = 0.0;
  bool l2_origin_divergent = false;
};

RealField sample_potential(const PotentialSpec& spec, const GridSpec& grid);
KernelW build_kernel(const ModelSpec& model, const GridSpec& grid);
FieldModes build_field_modes(const ModelSpec& model, const GridSpec& grid);
/// Same kernel restricted to a set of lattice points (others set to zero).
KernelW restrict_kernel(const KernelW& w, const std::vector<std::size_t>& modes);

struct Decomposition {
  double w1_l1_norm = 0.0;
  double w2_weak3_norm = 0.0;
};
Decomposition decompose_W(const KernelW& w);
/// W restricted to |k| <= split and the remainder.
std::pair<SpectralField, SpectralField> split_W(const KernelW& w);

struct IrCriterion {
  double low_band = 0.0;
  double high_band = 0.0;
  /// The origin cell of the low band is not integrable (grid-divergent).
  bool low_band_divergent = false;
};
IrCriterion ir_l2_criterion(const ModelSpec& model, const GridSpec& grid);

std::string to_string(PotentialKind k);
std::string to_string(DispersionKind k);
std::string to_string(CouplingKind k);
std::string to_string(IrRegularizer k);
std::string to_string(KZeroPolicy k);

}  // namespace kgs
