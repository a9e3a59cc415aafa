#pragma once

#include "kgs/electronic.hpp"
#include "kgs/grid.hpp"
#include "kgs/model.hpp"

namespace kgs {

struct EnergyBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double field = 0.0;
  double interaction = 0.0;
  double total = 0.0;
};

struct EulerLagrangeReport {
  double lambda = 0.0;
  double residual_l2 = 0.0;
  /// <u, V_H u>, equal to the interaction term.
  double interaction_value = 0.0;
};

/// F(|u|^2).
SpectralField density_hat(const RealField& u);

/// dk^3 sum W |rho-hat|^2.
double interaction_term(const RealField& u, const KernelW& w);
double interaction_from_density(const SpectralField& rho_hat, const KernelW& w);

/// J(u) = <u, H_V u> - dk^3 sum W |rho-hat|^2. Rejects ||u|| != 1 (1e-8).
EnergyBreakdown hartree_energy(const RealField& u, const ElectronicOperator& op, const KernelW& w);

/// V_H = Re Fbar(W rho-hat), so that <u, V_H u> equals the interaction term.
RealField hartree_potential(const RealField& u, const KernelW& w);
RealField hartree_potential_from_density(const SpectralField& rho_hat, const KernelW& w);

/// lambda = <u, (H_V - 2 V_H) u>, residual = ||(H_V - 2 V_H) u - lambda u||.
EulerLagrangeReport euler_lagrange(const RealField& u, const ElectronicOperator& op, const KernelW& w);

/// 2 [(H_V - 2 V_H) u - lambda u], tangent to the unit sphere at u.
RealField sphere_gradient(const RealField& u, const ElectronicOperator& op, const KernelW& w);

/// Everything the minimizers need from one state, with shared transforms.
struct HartreeEval {
  SpectralField rho_hat;
  RealField vh;
  RealField hv_u;
  double hv_expectation = 0.0;
  double interaction = 0.0;
  double energy = 0.0;
  double lambda = 0.0;
  /// (H_V - 2 V_H) u - lambda u
  RealField el_residual;
  double residual_l2 = 0.0;
};
HartreeEval evaluate_hartree(const RealField& u, const ElectronicOperator& op, const KernelW& w);

struct FieldState {
  SpectralField f;
  /// dk^3 sum omega |f|^2
  double zomega_norm2 = 0.0;
  /// dk^3 sum |f|^2 with the origin cell treated by its local form.
  double l2_norm2 = 0.0;
  /// The origin cell of ||f||^2 diverges; l2_norm2 omits it.
  bool l2_origin_divergent = false;
  /// Modes with omega <= 0 and v != 0, set to zero.
  int flagged_modes = 0;
};

/// f_u = -g v rho-hat / omega.
FieldState field_from_state(const RealField& u, const FieldModes& modes, double g);

/// dk^3 sum omega |f|^2.
double field_energy(const SpectralField& f, const FieldModes& modes);

/// <u,H_V u> + dk^3 sum omega |f|^2 + 2 g Re dk^3 sum v f conj(rho-hat).
EnergyBreakdown kgs_energy(const RealField& u, const SpectralField& f, const ElectronicOperator& op,
                           const FieldModes& modes, double g);

}  // namespace kgs
