#pragma once

#include <cstddef>
#include <vector>

#include "kgs/minimize.hpp"

namespace kgs {

/// Truncated bosonic Fock space over 1 to 3 modes, occupations 0..n_max each.
struct FockSpec {
  int n_modes = 1;
  int n_max = 12;
  std::vector<double> omegas{1.0};
  std::size_t dimension_cap = 1000000;

  void validate() const;
  std::size_t dimension() const;
};

/// Amplitudes over occupation multi-indices, row-major with mode 0 slowest.
struct FockVector {
  FockSpec spec;
  std::vector<cplx> amplitudes;

  std::vector<int> occupation(std::size_t index) const;
  double norm() const;
};

/// e^{-|z|^2} sum_{n > n_max} |z|^{2n} / n!, the weight a coherent state of
/// squared norm |z|^2 loses to truncation.
double truncation_tail(double norm2, int n_max);

/// Truncated coherent vector e^{-|f|^2/2} sum f^n / sqrt(n!) per mode.
/// Rejects f whose truncation tail exceeds 1e-12, naming the n_max needed.
FockVector coherent_vector(const std::vector<cplx>& f, const FockSpec& spec);

/// a_m psi.
FockVector annihilate(const FockVector& psi, int mode);
/// a_m^* psi (the top occupation is cut off).
FockVector create(const FockVector& psi, int mode);
cplx inner_product(const FockVector& a, const FockVector& b);

/// <Psi_f, dGamma(omega) Psi_f> from the truncated vector.
double expect_number(const std::vector<cplx>& f, const FockSpec& spec);
/// <Psi_f, Phi(h) Psi_f> with Phi(h) = (a(h) + a^*(h)) / sqrt 2, a(h) = sum conj(h_m) a_m.
double expect_field(const std::vector<cplx>& h, const std::vector<cplx>& f, const FockSpec& spec);

struct MiniPauliFierz {
  double e_full = 0.0;
  double e_quasi = 0.0;
  double mu_v = 0.0;
  /// Excited-state second-order term over the selected modes (full discrete spectrum).
  double t_nc = 0.0;
  std::size_t dimension = 0;
  int iterations = 0;
  bool quasi_converged = false;
};

/// H_V (x) 1 + 1 (x) sum omega_j a_j^* a_j + g sum_j c_j (e^{i k_j x} a_j + e^{-i k_j x} a_j^*)
/// with c_j = sqrt(dk^3) v(k_j), the sqrt 2 Phi(h_x) coupling restricted to the
/// selected lattice modes. e_quasi minimizes the Hartree functional with W
/// restricted to the same modes. The grid must have N <= 8.
MiniPauliFierz mini_pauli_fierz(const Problem& problem, const std::vector<std::size_t>& mode_indices, int n_max,
                                double tol = 1e-10, std::size_t dimension_cap = 1000000);

/// The lattice modes dk e_x, dk e_y, dk e_z (first `count` of them).
std::vector<std::size_t> axis_modes(const GridSpec& grid, int count);

}  // namespace kgs
