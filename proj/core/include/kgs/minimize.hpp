#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kgs/electronic.hpp"
#include "kgs/hartree.hpp"
#include "kgs/model.hpp"

namespace kgs {

/// A model discretized on a grid: electronic operator, field modes and W.
struct Problem {
  ModelSpec model;
  GridSpec grid;
  ElectronicOperator op;
  FieldModes modes;
  KernelW kernel;

  static Problem make(const ModelSpec& model, const GridSpec& grid);
  /// Same problem at another coupling constant (W rescaled exactly).
  Problem with_coupling(double g) const;
};

enum class Method { projected_gradient, scf, both_crosscheck };
enum class StartKind { electronic_ground, random, provided };

struct MinimizeOptions {
  Method method = Method::projected_gradient;
  int max_iter = 5000;
  double energy_tol = 1e-12;
  double residual_tol = 1e-8;
  double mixing = 0.5;
  std::uint64_t seed = 1;
  StartKind start = StartKind::electronic_ground;

  void validate() const;
};

struct CrossCheck {
  double energy_difference = 0.0;
  double state_distance = 0.0;
  bool agree = false;
};

struct GroundStateResult {
  RealField u_gs;
  SpectralField f_gs;
  FieldState field;
  double energy = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> energy_trace;
  bool converged = false;
  std::string method;
  /// SCF only: number of automatic mixing halvings and the final mixing.
  int mixing_halvings = 0;
  double final_mixing = 0.0;
  std::optional<CrossCheck> crosscheck;
};

/// Hartree ground state. Never throws on non-convergence: the result carries
/// converged = false and the full energy trace.
GroundStateResult minimize(const Problem& problem, const ElectronicGround& ground, const MinimizeOptions& opts,
                           const RealField* provided_start = nullptr);

/// Multiplies u by a phase so that <u, ref> is real and positive.
RealField phase_aligned(const RealField& u, const RealField& ref);

struct PhiCheck {
  double lhs_rhs_gap = 0.0;
  double phi_norm = 0.0;
  /// Bound on the contribution of eigenstates beyond the basis.
  double tail_estimate = 0.0;
};

/// phi = u - <u_V, u> u_V against sum_{n>=1} <u_n, 2 V_H u> / (E_n - lambda) u_n
/// using the first n_eigenbasis pairs of `basis`. Throws InvalidArgument when
/// lambda exceeds mu_V + gap/2 or sits within 1e-6 gap of an excited level.
PhiCheck phi_fixed_point_check(const GroundStateResult& result, const Problem& problem, const Eigenpairs& basis,
                               int n_eigenbasis);

struct UniquenessReport {
  double max_pairwise_l2 = 0.0;
  std::vector<double> energies;
  double energy_spread = 0.0;
  int excluded = 0;
  std::vector<std::string> notices;
};

/// Minimizes from n_starts seeded random starts and compares the aligned results.
UniquenessReport uniqueness_probe(const Problem& problem, const ElectronicGround& ground,
                                  const MinimizeOptions& opts, int n_starts, std::uint64_t seed, int threads = 1);

struct ExistenceReport {
  double w1_l1 = 0.0;
  double w2_weak3 = 0.0;
  double mu_v1 = 0.0;
  double gap_mu = 0.0;
  double smallness_ratio = 0.0;
};

/// Ingredients of the existence conditions with V_1 = V_+ + 2 C eta_R^2
/// (C = 0 gives V_1 = V_+).
ExistenceReport existence_condition_report(const Problem& problem, double mu_v, double boost_c = 0.0,
                                           double boost_radius = 1.0, double tol = 1e-9);

std::string to_string(Method m);
std::string to_string(StartKind s);

}  // namespace kgs
