#include "kgs/model.hpp"

#include <cmath>

namespace kgs {

PotentialSpec PotentialSpec::harmonic(double omega0) {
  PotentialSpec s;
  s.kind = PotentialKind::harmonic;
  s.omega0 = omega0;
  return s;
}

PotentialSpec PotentialSpec::gaussian_well(double depth, double width) {
  PotentialSpec s;
  s.kind = PotentialKind::gaussian_well;
  s.depth = depth;
  s.width = width;
  return s;
}

PotentialSpec PotentialSpec::soft_coulomb(double charge, double softening) {
  PotentialSpec s;
  s.kind = PotentialKind::soft_coulomb;
  s.charge = charge;
  s.softening = softening;
  return s;
}

void PotentialSpec::validate() const {
  switch (kind) {
    case PotentialKind::harmonic:
      if (!(omega0 > 0.0)) throw InvalidArgument("potential.omega0 must be positive");
      break;
    case PotentialKind::gaussian_well:
      if (!(depth > 0.0)) throw InvalidArgument("potential.depth must be positive");
      if (!(width > 0.0)) throw InvalidArgument("potential.width must be positive");
      break;
    case PotentialKind::soft_coulomb:
      if (!(charge > 0.0)) throw InvalidArgument("potential.charge must be positive");
      if (!(softening > 0.0))
        throw InvalidArgument("potential.softening must be positive (the unsoftened Coulomb term is singular on the grid)");
      break;
  }
}

double PotentialSpec::operator()(const std::array<double, 3>& x) const noexcept {
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  switch (kind) {
    case PotentialKind::harmonic:
      return omega0 * omega0 * r2;
    case PotentialKind::gaussian_well:
      return -depth * std::exp(-r2 / (2.0 * width * width));
    case PotentialKind::soft_coulomb:
      return -charge / std::sqrt(r2 + softening * softening);
  }
  return 0.0;
}

DispersionSpec DispersionSpec::relativistic(double mass) {
  DispersionSpec s;
  s.kind = DispersionKind::relativistic;
  s.mass = mass;
  return s;
}

DispersionSpec DispersionSpec::constant_one() { return DispersionSpec{}; }

DispersionSpec DispersionSpec::acoustic(double slope) {
  DispersionSpec s;
  s.kind = DispersionKind::acoustic;
  s.slope = slope;
  return s;
}

void DispersionSpec::validate() const {
  if (kind == DispersionKind::relativistic && !(mass >= 0.0))
    throw InvalidArgument("dispersion.mass must be non-negative");
  if (kind == DispersionKind::acoustic && !(slope > 0.0))
    throw InvalidArgument("dispersion.slope must be positive (omega would vanish on a band)");
}

double DispersionSpec::operator()(double k, double cap) const noexcept {
  switch (kind) {
    case DispersionKind::relativistic:
      return std::sqrt(k * k + mass * mass);
    case DispersionKind::constant_one:
      return 1.0;
    case DispersionKind::acoustic:
      return slope * std::min(k, cap);
  }
  return 1.0;
}

PowerLaw DispersionSpec::near_zero() const noexcept {
  switch (kind) {
    case DispersionKind::relativistic:
      return mass > 0.0 ? PowerLaw{mass, 0.0, 0.0} : PowerLaw{1.0, 1.0, 0.0};
    case DispersionKind::constant_one:
      return {1.0, 0.0, 0.0};
    case DispersionKind::acoustic:
      return {slope, 1.0, 0.0};
  }
  return {};
}

CouplingSpec CouplingSpec::nelson(double kappa, IrRegularizer reg) {
  CouplingSpec s;
  s.kind = CouplingKind::nelson;
  s.kappa = kappa;
  s.regularizer = reg;
  return s;
}

CouplingSpec CouplingSpec::polaron() { return CouplingSpec{}; }

CouplingSpec CouplingSpec::phonon() {
  CouplingSpec s;
  s.kind = CouplingKind::phonon;
  return s;
}

void CouplingSpec::validate() const {
  if (!(kappa >= 0.0)) throw InvalidArgument("coupling.kappa must be non-negative");
}

double CouplingSpec::chi(double k) const noexcept {
  if (kind != CouplingKind::nelson || kappa == 0.0) return 1.0;
  if (regularizer == IrRegularizer::sharp) return k >= kappa ? 1.0 : 0.0;
  return k / std::sqrt(k * k + kappa * kappa);
}

double CouplingSpec::operator()(double k, double omega) const noexcept {
  switch (kind) {
    case CouplingKind::nelson:
      return chi(k) / std::sqrt(omega);
    case CouplingKind::polaron:
      return 1.0 / k;
    case CouplingKind::phonon:
      return std::sqrt(k);
  }
  return 0.0;
}

void ModelSpec::validate() const {
  potential.validate();
  dispersion.validate();
  coupling.validate();
  if (!std::isfinite(g)) throw InvalidArgument("g must be finite");
  if (!(uv_cutoff > 0.0)) throw InvalidArgument("uv_cutoff must be positive");
  if (!(split_radius > 0.0)) throw InvalidArgument("split_radius must be positive");
}

namespace {

// v^2 ~ c |k|^p near the origin.
PowerLaw coupling_squared_near_zero(const ModelSpec& m) {
  const PowerLaw w = m.dispersion.near_zero();
  switch (m.coupling.kind) {
    case CouplingKind::nelson: {
      PowerLaw chi2{1.0, 0.0, 0.0};
      if (m.coupling.kappa > 0.0) {
        if (m.coupling.regularizer == IrRegularizer::sharp) return {};
        chi2 = {1.0 / (m.coupling.kappa * m.coupling.kappa), 2.0, 0.0};
      }
      return {chi2.coefficient / w.coefficient, chi2.exponent - w.exponent, 0.0};
    }
    case CouplingKind::polaron:
      return {1.0, -2.0, 0.0};
    case CouplingKind::phonon:
      return {1.0, 1.0, 0.0};
  }
  return {};
}

bool polaron_massive(const ModelSpec& m) {
  return m.coupling.kind == CouplingKind::polaron && m.dispersion.kind == DispersionKind::relativistic &&
         m.dispersion.mass > 0.0;
}

}  // namespace

PowerLaw ModelSpec::kernel_near_zero() const {
  const PowerLaw v2 = coupling_squared_near_zero(*this);
  const PowerLaw w = dispersion.near_zero();
  PowerLaw out{v2.coefficient / w.coefficient, v2.exponent - w.exponent, 0.0};
  // 1/(k^2 sqrt(k^2+m^2)) = k^-2/m - 1/(2 m^3) + O(k^2)
  if (polaron_massive(*this)) out.regular = -0.5 / std::pow(dispersion.mass, 3);
  return out;
}

PowerLaw ModelSpec::field_l2_near_zero() const {
  const PowerLaw v2 = coupling_squared_near_zero(*this);
  const PowerLaw w = dispersion.near_zero();
  PowerLaw out{v2.coefficient / (w.coefficient * w.coefficient), v2.exponent - 2.0 * w.exponent, 0.0};
  // 1/(k^2 (k^2+m^2)) = k^-2/m^2 - 1/m^4 + O(k^2)
  if (polaron_massive(*this)) out.regular = -1.0 / std::pow(dispersion.mass, 4);
  return out;
}

RealField sample_potential(const PotentialSpec& spec, const GridSpec& grid) {
  spec.validate();
  return sample_position(grid, [&](const std::array<double, 3>& x) { return cplx(spec(x), 0.0); });
}

FieldModes build_field_modes(const ModelSpec& model, const GridSpec& grid) {
  model.validate();
  const double cap = grid.k_nyquist();
  const double dk = grid.freq_spacing();
  FieldModes modes{SpectralField(grid), SpectralField(grid)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i == grid.origin_index()) continue;
    const double k = grid.k_norm(i);
    const double om = model.dispersion(k, cap);
    modes.omega[i] = om;
    modes.v[i] = k <= model.uv_cutoff ? model.coupling(k, om) : 0.0;
  }

  const PowerLaw kernel = model.kernel_near_zero();
  if (!kernel.integrable())
    throw InvalidArgument("W = v^2/omega is not locally integrable at k = 0 for this model");
  const double w0 = std::max(0.0, origin_weight(kernel, dk, model.k_zero));
  const PowerLaw om_law = model.dispersion.near_zero();
  const double om0 = om_law.exponent == 0.0 ? om_law.coefficient
                                            : origin_weight(om_law, dk, KZeroPolicy::cell_average);
  modes.omega[grid.origin_index()] = om0;
  modes.v[grid.origin_index()] = std::sqrt(w0 * om0);

  const PowerLaw l2 = model.field_l2_near_zero();
  if (l2.integrable()) {
    modes.l2_origin_weight = std::max(0.0, origin_weight(l2, dk, model.k_zero));
  } else {
    modes.l2_origin_divergent = true;
  }
  return modes;
}

KernelW build_kernel(const ModelSpec& model, const GridSpec& grid) {
  const FieldModes modes = build_field_modes(model, grid);
  KernelW w;
  w.samples = SpectralField(grid);
  const double g2 = model.g * model.g;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = modes.v[i].real();
    w.samples[i] = g2 * v * v / modes.omega[i].real();
  }
  w.k0_value = w.samples[grid.origin_index()].real();
  w.split_radius = model.split_radius;
  w.uv_cutoff = model.uv_cutoff;
  return w;
}

KernelW restrict_kernel(const KernelW& w, const std::vector<std::size_t>& modes) {
  KernelW out = w;
  out.samples = SpectralField(w.grid());
  for (std::size_t i : modes) out.samples[i] = w.samples[i];
  out.k0_value = out.samples[w.grid().origin_index()].real();
  return out;
}

std::pair<SpectralField, SpectralField> split_W(const KernelW& w) {
  const GridSpec& grid = w.grid();
  SpectralField w1(grid), w2(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.k_norm(i) <= w.split_radius)
      w1[i] = w.samples[i];
    else
      w2[i] = w.samples[i];
  }
  return {std::move(w1), std::move(w2)};
}

Decomposition decompose_W(const KernelW& w) {
  const auto [w1, w2] = split_W(w);
  return {spectral_integral(w1).real(), weak_lorentz_norm(w2, 3.0)};
}

IrCriterion ir_l2_criterion(const ModelSpec& model, const GridSpec& grid) {
  const FieldModes modes = build_field_modes(model, grid);
  IrCriterion out;
  double low = 0.0, high = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i == grid.origin_index()) continue;
    const double k = grid.k_norm(i);
    const double ratio = modes.v[i].real() / modes.omega[i].real();
    if (k <= 1.0) low += ratio * ratio;
    if (k >= 1.0) high += ratio * ratio / (k * k);
  }
  low += modes.l2_origin_weight;
  out.low_band_divergent = modes.l2_origin_divergent;
  out.low_band = std::sqrt(low * grid.freq_cell_volume());
  out.high_band = std::sqrt(high * grid.freq_cell_volume());
  return out;
}

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::harmonic: return "harmonic";
    case PotentialKind::gaussian_well: return "gaussian_well";
    case PotentialKind::soft_coulomb: return "soft_coulomb";
  }
  return "?";
}

std::string to_string(DispersionKind k) {
  switch (k) {
    case DispersionKind::relativistic: return "relativistic";
    case DispersionKind::constant_one: return "constant_one";
    case DispersionKind::acoustic: return "acoustic";
  }
  return "?";
}

std::string to_string(CouplingKind k) {
  switch (k) {
    case CouplingKind::nelson: return "nelson";
    case CouplingKind::polaron: return "polaron";
    case CouplingKind::phonon: return "phonon";
  }
  return "?";
}

std::string to_string(IrRegularizer k) { return k == IrRegularizer::smooth ? "smooth" : "sharp"; }

std::string to_string(KZeroPolicy k) {
  return k == KZeroPolicy::lattice_corrected ? "lattice_corrected" : "cell_average";
}

}  // namespace kgs
