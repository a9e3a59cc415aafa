#include "kgs/fock.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kgs/studies.hpp"

namespace kgs {

namespace {

std::size_t checked_power(int base, int exp, std::size_t cap) {
  std::size_t d = 1;
  for (int i = 0; i < exp; ++i) {
    d *= static_cast<std::size_t>(base);
    if (d > cap) throw InvalidArgument("Fock dimension exceeds the cap of " + std::to_string(cap));
  }
  return d;
}

// Flat-index stride of mode m (mode 0 slowest).
std::size_t stride(const FockSpec& spec, int mode) {
  std::size_t s = 1;
  for (int m = spec.n_modes - 1; m > mode; --m) s *= static_cast<std::size_t>(spec.n_max + 1);
  return s;
}

int occupation_of(const FockSpec& spec, std::size_t index, int mode) {
  return static_cast<int>((index / stride(spec, mode)) % static_cast<std::size_t>(spec.n_max + 1));
}

void check_modes(const std::vector<cplx>& f, const FockSpec& spec) {
  spec.validate();
  if (static_cast<int>(f.size()) != spec.n_modes) throw InvalidArgument("one amplitude per mode is required");
}

}  // namespace

void FockSpec::validate() const {
  if (n_modes < 1 || n_modes > 3) throw InvalidArgument("n_modes must be 1, 2 or 3");
  if (n_max < 0) throw InvalidArgument("n_max must be nonnegative");
  if (static_cast<int>(omegas.size()) != n_modes) throw InvalidArgument("one omega per mode is required");
  for (double w : omegas)
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("mode frequencies must be positive");
  (void)dimension();
}

std::size_t FockSpec::dimension() const { return checked_power(n_max + 1, n_modes, dimension_cap); }

std::vector<int> FockVector::occupation(std::size_t index) const {
  std::vector<int> n(static_cast<std::size_t>(spec.n_modes));
  for (int m = 0; m < spec.n_modes; ++m) n[static_cast<std::size_t>(m)] = occupation_of(spec, index, m);
  return n;
}

double FockVector::norm() const {
  double s = 0.0;
  for (const cplx& a : amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

double truncation_tail(double norm2, int n_max) {
  // Sum the tail directly from its first term; it converges geometrically
  // once n exceeds norm2.
  double term = std::exp(-norm2);
  for (int n = 1; n <= n_max + 1; ++n) term *= norm2 / n;
  double tail = 0.0;
  for (int n = n_max + 1; n < n_max + 400 && term > 0.0; ++n) {
    tail += term;
    if (term < 1e-300 || (n > norm2 && term < 1e-20 * tail)) break;
    term *= norm2 / (n + 1);
  }
  return tail;
}

FockVector coherent_vector(const std::vector<cplx>& f, const FockSpec& spec) {
  check_modes(f, spec);
  double norm2 = 0.0;
  for (const cplx& z : f) norm2 += std::norm(z);
  if (truncation_tail(norm2, spec.n_max) > 1e-12) {
    int need = spec.n_max;
    while (truncation_tail(norm2, need) > 1e-12) ++need;
    throw InvalidArgument("coherent state truncation tail above 1e-12; n_max >= " + std::to_string(need) +
                          " required");
  }
  // Single-mode amplitudes e^{-|z|^2/2} z^n / sqrt(n!).
  std::vector<std::vector<cplx>> per_mode;
  for (const cplx& z : f) {
    std::vector<cplx> c(static_cast<std::size_t>(spec.n_max + 1));
    c[0] = std::exp(-0.5 * std::norm(z));
    for (int n = 1; n <= spec.n_max; ++n) c[static_cast<std::size_t>(n)] = c[static_cast<std::size_t>(n - 1)] * z / std::sqrt(double(n));
    per_mode.push_back(std::move(c));
  }
  FockVector psi{spec, std::vector<cplx>(spec.dimension())};
  for (std::size_t i = 0; i < psi.amplitudes.size(); ++i) {
    cplx a = 1.0;
    for (int m = 0; m < spec.n_modes; ++m)
      a *= per_mode[static_cast<std::size_t>(m)][static_cast<std::size_t>(occupation_of(spec, i, m))];
    psi.amplitudes[i] = a;
  }
  return psi;
}

FockVector annihilate(const FockVector& psi, int mode) {
  if (mode < 0 || mode >= psi.spec.n_modes) throw InvalidArgument("mode index out of range");
  FockVector out{psi.spec, std::vector<cplx>(psi.amplitudes.size())};
  const std::size_t s = stride(psi.spec, mode);
  for (std::size_t i = 0; i < out.amplitudes.size(); ++i) {
    const int n = occupation_of(psi.spec, i, mode);
    if (n < psi.spec.n_max) out.amplitudes[i] = std::sqrt(double(n + 1)) * psi.amplitudes[i + s];
  }
  return out;
}

FockVector create(const FockVector& psi, int mode) {
  if (mode < 0 || mode >= psi.spec.n_modes) throw InvalidArgument("mode index out of range");
  FockVector out{psi.spec, std::vector<cplx>(psi.amplitudes.size())};
  const std::size_t s = stride(psi.spec, mode);
  for (std::size_t i = 0; i < out.amplitudes.size(); ++i) {
    const int n = occupation_of(psi.spec, i, mode);
    if (n > 0) out.amplitudes[i] = std::sqrt(double(n)) * psi.amplitudes[i - s];
  }
  return out;
}

cplx inner_product(const FockVector& a, const FockVector& b) {
  if (a.amplitudes.size() != b.amplitudes.size()) throw InvalidArgument("Fock vectors of different dimension");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i) s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return s;
}

double expect_number(const std::vector<cplx>& f, const FockSpec& spec) {
  const FockVector psi = coherent_vector(f, spec);
  double e = 0.0;
  for (std::size_t i = 0; i < psi.amplitudes.size(); ++i) {
    double w = 0.0;
    for (int m = 0; m < spec.n_modes; ++m) w += spec.omegas[static_cast<std::size_t>(m)] * occupation_of(spec, i, m);
    e += w * std::norm(psi.amplitudes[i]);
  }
  return e;
}

double expect_field(const std::vector<cplx>& h, const std::vector<cplx>& f, const FockSpec& spec) {
  check_modes(h, spec);
  const FockVector psi = coherent_vector(f, spec);
  FockVector phi{spec, std::vector<cplx>(psi.amplitudes.size())};
  for (int m = 0; m < spec.n_modes; ++m) {
    const cplx hm = h[static_cast<std::size_t>(m)];
    const FockVector a = annihilate(psi, m);
    const FockVector ad = create(psi, m);
    for (std::size_t i = 0; i < phi.amplitudes.size(); ++i)
      phi.amplitudes[i] += std::conj(hm) * a.amplitudes[i] + hm * ad.amplitudes[i];
  }
  return inner_product(psi, phi).real() / std::numbers::sqrt2;
}

std::vector<std::size_t> axis_modes(const GridSpec& grid, int count) {
  if (count < 1 || count > 3) throw InvalidArgument("axis_modes count must be 1, 2 or 3");
  const int c = grid.n() / 2;
  std::vector<std::size_t> out;
  for (int a = 0; a < count; ++a) {
    std::array<int, 3> idx{c, c, c};
    idx[static_cast<std::size_t>(a)] += 1;
    out.push_back(grid.flatten(idx[0], idx[1], idx[2]));
  }
  return out;
}

MiniPauliFierz mini_pauli_fierz(const Problem& problem, const std::vector<std::size_t>& mode_indices, int n_max,
                                double tol, std::size_t dimension_cap) {
  const GridSpec& grid = problem.grid;
  if (grid.n() > 8) throw InvalidArgument("mini Pauli-Fierz model needs n_per_axis <= 8");
  const std::size_t origin = grid.origin_index();
  FockSpec spec;
  spec.n_modes = static_cast<int>(mode_indices.size());
  spec.n_max = n_max;
  spec.dimension_cap = dimension_cap;
  spec.omegas.clear();
  std::vector<double> coupling;
  for (std::size_t j : mode_indices) {
    if (j >= grid.size() || j == origin) throw InvalidArgument("modes must be nonzero lattice wave vectors");
    spec.omegas.push_back(problem.modes.omega[j].real());
    // c_j = g sqrt(dk^3) v_j, read off W = g^2 v^2 / omega so the cutoff applies.
    coupling.push_back(std::sqrt(grid.freq_cell_volume() * problem.kernel.samples[j].real() * spec.omegas.back()));
  }
  spec.validate();
  const std::size_t fock_dim = spec.dimension();
  const std::size_t el_dim = grid.size();
  if (fock_dim > dimension_cap / el_dim) throw InvalidArgument("tensor dimension exceeds the cap");

  // e^{+i k_j x} on the position lattice.
  std::vector<std::vector<cplx>> phase(mode_indices.size());
  for (std::size_t m = 0; m < mode_indices.size(); ++m) {
    const auto k = grid.wavevector(mode_indices[m]);
    phase[m].resize(el_dim);
    for (std::size_t i = 0; i < el_dim; ++i) {
      const auto x = grid.position(i);
      phase[m][i] = std::polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
    }
  }
  std::vector<double> boson_energy(fock_dim);
  for (std::size_t b = 0; b < fock_dim; ++b) {
    double e = 0.0;
    for (int m = 0; m < spec.n_modes; ++m) e += spec.omegas[static_cast<std::size_t>(m)] * occupation_of(spec, b, m);
    boson_energy[b] = e;
  }

  using C = std::complex<double>;
  const auto dim = static_cast<Eigen::Index>(el_dim * fock_dim);
  BlockOperator<C> apply = [&](const Block<C>& in, Block<C>& out) {
    out.resize(in.rows(), in.cols());
    for (Eigen::Index col = 0; col < in.cols(); ++col) {
      const C* x = in.col(col).data();
      C* y = out.col(col).data();
      for (std::size_t b = 0; b < fock_dim; ++b) {
        C* yb = y + b * el_dim;
        const C* xb = x + b * el_dim;
        problem.op.apply_complex(xb, yb);
        for (std::size_t i = 0; i < el_dim; ++i) yb[i] += boson_energy[b] * xb[i];
        for (int m = 0; m < spec.n_modes; ++m) {
          const auto mm = static_cast<std::size_t>(m);
          const int n = occupation_of(spec, b, m);
          const std::size_t s = stride(spec, m);
          // a_m: takes amplitude from occupation n+1; a_m^*: from n-1.
          if (n < spec.n_max) {
            const C* up = x + (b + s) * el_dim;
            const double c = coupling[mm] * std::sqrt(double(n + 1));
            for (std::size_t i = 0; i < el_dim; ++i) yb[i] += c * phase[mm][i] * up[i];
          }
          if (n > 0) {
            const C* down = x + (b - s) * el_dim;
            const double c = coupling[mm] * std::sqrt(double(n));
            for (std::size_t i = 0; i < el_dim; ++i) yb[i] += c * std::conj(phase[mm][i]) * down[i];
          }
        }
      }
    }
  };
  BlockOperator<C> precond = [&](const Block<C>& in, Block<C>& out) {
    out.resize(in.rows(), in.cols());
    for (Eigen::Index col = 0; col < in.cols(); ++col)
      for (std::size_t b = 0; b < fock_dim; ++b)
        problem.op.precondition_complex(in.col(col).data() + b * el_dim, out.col(col).data() + b * el_dim,
                                        1.0 + boson_energy[b]);
  };

  const Eigenpairs spectrum = dense_eigenpairs(problem.op);
  MiniPauliFierz out;
  out.dimension = static_cast<std::size_t>(dim);
  out.mu_v = spectrum.values.front();

  // Start from u_V (x) vacuum.
  Block<C> start = Block<C>::Zero(dim, 1);
  const double scale = std::sqrt(grid.cell_volume());
  for (std::size_t i = 0; i < el_dim; ++i) start(static_cast<Eigen::Index>(i), 0) = spectrum.states.front()[i] * scale;
  LobpcgOptions lo;
  lo.count = 1;
  lo.guard = 3;
  lo.tol = tol;
  const LobpcgResult<C> full = lobpcg<C>(dim, apply, precond, lo, &start);
  out.e_full = full.values(0);
  out.iterations = full.iterations;

  Problem restricted = problem;
  restricted.kernel = restrict_kernel(problem.kernel, mode_indices);
  ElectronicGround ground;
  ground.mu = spectrum.values.front();
  ground.u = spectrum.states.front();
  ground.pairs = spectrum;
  ground.gap = spectrum.gap();
  ground.first_excited_degeneracy = spectrum.first_excited_degeneracy();
  MinimizeOptions mo;
  mo.residual_tol = std::max(1e-10, 10.0 * tol);
  const GroundStateResult quasi = minimize(restricted, ground, mo);
  out.e_quasi = quasi.energy;
  out.quasi_converged = quasi.converged;
  out.t_nc = t_nc_sum(spectrum, static_cast<int>(spectrum.values.size()), problem.modes, ResolventShift::omega,
                      mode_indices);
  return out;
}

}  // namespace kgs
