#pragma once

#include <cstdint>
#include <vector>

#include "kgs/eigensolver.hpp"
#include "kgs/grid.hpp"
#include "kgs/model.hpp"

namespace kgs {

/// H_V = -Laplacian + V on a periodic grid. V must be real.
class ElectronicOperator {
 public:
  ElectronicOperator() = default;
  ElectronicOperator(const GridSpec& grid, RealField potential);
  static ElectronicOperator from_spec(const PotentialSpec& spec, const GridSpec& grid);

  const GridSpec& grid() const noexcept { return grid_; }
  const RealField& potential() const noexcept { return potential_; }

  RealField apply(const RealField& u) const;
  /// -Laplacian u only.
  RealField kinetic(const RealField& u) const;
  /// Re <u, H_V u>.
  double expectation(const RealField& u) const;

  /// Real vectors of length N^3 (no quadrature scaling): out = (-Lap + V + extra) in.
  void apply_real(const double* in, double* out, const double* extra = nullptr) const;
  /// out = (|k|^2 + shift)^-1 in, real vectors.
  void precondition_real(const double* in, double* out, double shift = 1.0) const;
  /// Complex counterparts.
  void apply_complex(const cplx* in, cplx* out, const double* extra = nullptr) const;
  void precondition_complex(const cplx* in, cplx* out, double shift = 1.0) const;

 private:
  GridSpec grid_;
  RealField potential_;
  std::vector<double> v_real_;
  std::vector<double> k2_full_;  // FFT ordering
  std::vector<double> k2_half_;  // r2c ordering
};

RealField apply_hv(const ElectronicOperator& op, const RealField& u);

struct Eigenpairs {
  std::vector<double> values;
  std::vector<RealField> states;
  std::vector<double> residuals;
  int iterations = 0;

  /// Smallest eigenvalue strictly above E0 + 1e-8 |E0|, minus E0; 0 if none resolved.
  double gap() const;
  /// Multiplicity of that eigenvalue within the computed set (a lower bound
  /// when the set ends inside the level).
  int first_excited_degeneracy() const;
};

/// Lowest `count` eigenpairs with residuals ||H u - E u||_{L^2} <= tol.
/// The ground state is phase-fixed so its largest sample is real positive.
/// Throws ConvergenceError on hitting the iteration cap.
Eigenpairs lowest_eigenpairs(const ElectronicOperator& op, int count, double tol, std::uint64_t seed = 1,
                             const std::vector<double>* extra_potential = nullptr);

/// Same, for H_V + extra with a warm start (used by the SCF iteration).
Eigenpairs lowest_eigenpairs_from(const ElectronicOperator& op, int count, double tol,
                                  const std::vector<RealField>& start, std::uint64_t seed,
                                  const std::vector<double>* extra_potential);

/// Full spectrum of the assembled N^3 x N^3 matrix (small grids only:
/// throws InvalidArgument above max_dim).
Eigenpairs dense_eigenpairs(const ElectronicOperator& op, std::size_t max_dim = 4096);

/// mu_V, u_V and the spectral gap.
struct ElectronicGround {
  double mu = 0.0;
  RealField u;
  double gap = 0.0;
  int first_excited_degeneracy = 0;
  Eigenpairs pairs;
};

/// Lowest `count` (>= 2) eigenpairs summarized. The degeneracy is a lower
/// bound when the first excited level is cut by `count`.
ElectronicGround electronic_ground(const ElectronicOperator& op, double tol, int count = 2,
                                   std::uint64_t seed = 1);

/// Rotates u by a global phase so its largest-magnitude sample is real positive.
RealField phase_fixed(const RealField& u);

/// sqrt(||u||^2 + ||u||_{H1dot}^2 + <u, V_+ u>).
double qv_norm(const RealField& u, const RealField& potential);

struct CoercivityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// lhs = ||u||_{H1dot}^2, rhs = (<u,H_V u> + b ||u||^2) / (1 - a).
CoercivityResult coercivity_check(const ElectronicOperator& op, const RealField& u, double a, double b);

/// For each a, the smallest b that makes the coercivity bound hold on all states.
std::vector<double> minimal_form_bound(const ElectronicOperator& op, const std::vector<RealField>& states,
                                       const std::vector<double>& a_values);

/// eta(r): 1 on r <= 1, cos^2(pi (r-1)/2) on (1,2), 0 beyond.
double eta_profile(double r) noexcept;

/// V_{1,C} = V_+ + 2 C eta(|x|/R)^2.
RealField confining_potential(const RealField& potential, double c, double radius);

struct GapProbe {
  double mu_v = 0.0;
  double mu_v1c = 0.0;
  bool gap_ok = false;
};

GapProbe confining_gap_probe(const PotentialSpec& potential, double c, double radius, const GridSpec& grid,
                             double tol = 1e-9);

}  // namespace kgs
