#include "kgs/hartree.hpp"

#include <cmath>

namespace kgs {

namespace {

void require_normalized(const RealField& u) {
  const double n2 = inner_product(u, u).real();
  if (std::abs(n2 - 1.0) > 1e-8) throw InvalidArgument("state must be L2-normalized");
}

void require_same(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw InvalidArgument("state and kernel live on different grids");
}

}  // namespace

SpectralField density_hat(const RealField& u) {
  RealField rho(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) rho[i] = std::norm(u[i]);
  return forward_transform(rho);
}

double interaction_from_density(const SpectralField& rho_hat, const KernelW& w) {
  require_same(rho_hat.grid(), w.grid());
  double acc = 0.0;
  for (std::size_t i = 0; i < rho_hat.size(); ++i) acc += w.samples[i].real() * std::norm(rho_hat[i]);
  return acc * rho_hat.grid().freq_cell_volume();
}

double interaction_term(const RealField& u, const KernelW& w) { return interaction_from_density(density_hat(u), w); }

RealField hartree_potential_from_density(const SpectralField& rho_hat, const KernelW& w) {
  require_same(rho_hat.grid(), w.grid());
  SpectralField prod(rho_hat.grid());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = w.samples[i].real() * rho_hat[i];
  RealField vh = bar_transform(prod);
  for (auto& z : vh.samples()) z = z.real();
  return vh;
}

RealField hartree_potential(const RealField& u, const KernelW& w) {
  return hartree_potential_from_density(density_hat(u), w);
}

EnergyBreakdown hartree_energy(const RealField& u, const ElectronicOperator& op, const KernelW& w) {
  require_normalized(u);
  EnergyBreakdown e;
  e.kinetic = inner_product(u, op.kinetic(u)).real();
  double pot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) pot += op.potential()[i].real() * std::norm(u[i]);
  e.potential = pot * u.grid().cell_volume();
  e.interaction = -interaction_term(u, w);
  e.total = e.kinetic + e.potential + e.field + e.interaction;
  return e;
}

HartreeEval evaluate_hartree(const RealField& u, const ElectronicOperator& op, const KernelW& w) {
  require_same(u.grid(), w.grid());
  HartreeEval ev;
  ev.rho_hat = density_hat(u);
  ev.interaction = interaction_from_density(ev.rho_hat, w);
  ev.vh = hartree_potential_from_density(ev.rho_hat, w);
  ev.hv_u = op.apply(u);
  ev.hv_expectation = inner_product(u, ev.hv_u).real();
  ev.energy = ev.hv_expectation - ev.interaction;
  ev.lambda = ev.hv_expectation - 2.0 * ev.interaction;
  ev.el_residual = RealField(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i)
    ev.el_residual[i] = ev.hv_u[i] - 2.0 * ev.vh[i].real() * u[i] - ev.lambda * u[i];
  ev.residual_l2 = l2_norm(ev.el_residual);
  return ev;
}

EulerLagrangeReport euler_lagrange(const RealField& u, const ElectronicOperator& op, const KernelW& w) {
  require_normalized(u);
  const HartreeEval ev = evaluate_hartree(u, op, w);
  return {ev.lambda, ev.residual_l2, ev.interaction};
}

RealField sphere_gradient(const RealField& u, const ElectronicOperator& op, const KernelW& w) {
  require_normalized(u);
  HartreeEval ev = evaluate_hartree(u, op, w);
  ev.el_residual *= 2.0;
  return ev.el_residual;
}

FieldState field_from_state(const RealField& u, const FieldModes& modes, double g) {
  const GridSpec& grid = u.grid();
  require_same(grid, modes.omega.grid());
  const SpectralField rho_hat = density_hat(u);
  FieldState out;
  out.f = SpectralField(grid);
  double zomega = 0.0, l2 = 0.0;
  const std::size_t origin = grid.origin_index();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double om = modes.omega[i].real();
    const double v = modes.v[i].real();
    if (!(om > 0.0)) {
      if (v != 0.0) ++out.flagged_modes;
      continue;
    }
    out.f[i] = -g * v * rho_hat[i] / om;
    zomega += om * std::norm(out.f[i]);
    if (i != origin) l2 += std::norm(out.f[i]);
  }
  l2 += g * g * modes.l2_origin_weight * std::norm(rho_hat[origin]);
  out.l2_origin_divergent = modes.l2_origin_divergent;
  out.zomega_norm2 = zomega * grid.freq_cell_volume();
  out.l2_norm2 = l2 * grid.freq_cell_volume();
  return out;
}

double field_energy(const SpectralField& f, const FieldModes& modes) {
  require_same(f.grid(), modes.omega.grid());
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += modes.omega[i].real() * std::norm(f[i]);
  return acc * f.grid().freq_cell_volume();
}

EnergyBreakdown kgs_energy(const RealField& u, const SpectralField& f, const ElectronicOperator& op,
                           const FieldModes& modes, double g) {
  require_normalized(u);
  require_same(u.grid(), f.grid());
  EnergyBreakdown e = hartree_energy(u, op, KernelW{SpectralField(u.grid())});
  e.interaction = 0.0;
  e.field = field_energy(f, modes);
  const SpectralField rho_hat = density_hat(u);
  cplx cross = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) cross += modes.v[i].real() * f[i] * std::conj(rho_hat[i]);
  e.interaction = 2.0 * g * cross.real() * u.grid().freq_cell_volume();
  e.total = e.kinetic + e.potential + e.field + e.interaction;
  return e;
}

}  // namespace kgs
