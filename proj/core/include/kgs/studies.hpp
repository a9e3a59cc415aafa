#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "kgs/detail/parallel.hpp"
#include "kgs/minimize.hpp"

namespace kgs {

/// One row of a sweep. Squared norms are stored squared, as named.
struct StudyRecord {
  double sweep_parameter = 0.0;
  double energy = 0.0;
  double mu_v = 0.0;
  double i2_coherent = 0.0;
  double t_nc = 0.0;
  /// E_V(g) - mu_V + g^2 I_2 (small-g sweep).
  double remainder = 0.0;
  double f_l2_norm_sq = 0.0;
  bool f_l2_origin_divergent = false;
  double f_zomega_norm_sq = 0.0;
  double u_qv_distance = 0.0;
  double f_zomega_distance = 0.0;
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Box length and points per axis of the run (IR study).
  double box_length = 0.0;
  int n_per_axis = 0;
};

struct SweepOptions {
  MinimizeOptions minimize;
  double eigen_tol = 1e-10;
  int threads = 1;
};

struct SmallGSweep {
  std::vector<StudyRecord> records;
  double mu_v = 0.0;
  double i2 = 0.0;
  /// Least-squares slope of log|r| against log g; NaN when a run failed.
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  /// max |r(g)| / g^4 over the list.
  double remainder_constant = 0.0;
  bool all_converged = false;
  std::vector<std::string> notices;
};

/// E_V(g) by minimization for each g, I_2 = interaction of u_V at g = 1 and
/// the remainder fit. g_list must be sorted, positive.
SmallGSweep small_g_sweep(const ModelSpec& model, const std::vector<double>& g_list, const GridSpec& grid,
                          const SweepOptions& opts);

struct UvSweep {
  std::vector<StudyRecord> records;
  bool all_converged = false;
  /// E non-increasing in Lambda within 10 energy_tol.
  bool energies_monotone = false;
  /// Q_V distances non-increasing in Lambda.
  bool distances_monotone = false;
  std::vector<std::string> notices;
};

/// E_{V,Lambda} and distances to the Lambda = k_max reference. The list must be
/// ascending and end at the grid's largest |k|.
UvSweep uv_sweep(const ModelSpec& model, const std::vector<double>& lambda_list, const GridSpec& grid,
                 const SweepOptions& opts);

struct IrStudy {
  std::vector<StudyRecord> records;
  /// Increments of ||f_gs||^2 between consecutive boxes.
  std::vector<double> increments;
  /// 4 pi ln(L_{i+1} / L_i) g^2 |rho-hat(0)|^2 for each increment.
  std::vector<double> predicted_increments;
  bool all_converged = false;
  std::vector<std::string> notices;
};

/// ||f_gs||^2 on boxes of the given lengths at fixed spacing (each L / spacing
/// must be an even integer >= 8).
IrStudy ir_study(const ModelSpec& model, const std::vector<double>& box_lengths, double spacing,
                 const SweepOptions& opts);

enum class ResolventShift { omega, k_norm };

/// dk^3 sum_k v(k)^2 sum_{n=1}^{n_basis-1} |<u_n, e^{-ikx} u_0>|^2 / (E_n - E_0 + s(k)),
/// with s = omega or |k|. `mode_indices` restricts the k sum (empty: all nonzero k).
double t_nc_sum(const Eigenpairs& basis, int n_basis, const FieldModes& modes, ResolventShift shift,
                const std::vector<std::size_t>& mode_indices = {});

struct SecondOrderSplit {
  double i2 = 0.0;
  double t_nc = 0.0;
  /// Same sum with |k| in place of omega in the resolvent.
  double t_nc_k_norm = 0.0;
  double g = 0.0;
  /// g^2 (i2 + t_nc): predicted mu_V - inf sigma(H).
  double predicted_full_shift = 0.0;
  int n_eigenbasis = 0;
};

/// Coherent/non-coherent second-order split from an eigenbasis. Refuses a
/// basis whose first n_eigenbasis residuals exceed max_residual.
SecondOrderSplit second_order_split(const Problem& problem, const Eigenpairs& basis, int n_eigenbasis,
                                    double max_residual = 1e-8);

struct RatioStats {
  double max = 0.0;
  double p95 = 0.0;
};

struct InequalityProbe {
  /// sup|Fbar(W1 F(u1 u2))| / (||W1||_1 ||u1|| ||u2||)
  RatioStats convolution_l1;
  /// sup|Fbar(W2 F(u1 u2))| / (||W2||_{3,inf} ||u1||_H1dot ||u2||_H1dot)
  RatioStats convolution_weak;
  /// ||Fbar(W2 F(u1 u2)) u3|| / (||W2||_{3,inf} ||u1|| ||u2||_H1dot ||u3||_H1dot)
  RatioStats convolution_weak_product;
  /// ||u||_H1dot^2 / (<u,H_V u> + b ||u||^2) with b = sup V_-
  RatioStats coercivity;
  int trials = 0;
};

/// Per-trial ratios of the convolution inequalities for one random draw.
struct InequalityRatios {
  double convolution_l1 = 0.0;
  double convolution_weak = 0.0;
  double convolution_weak_product = 0.0;
  double coercivity = 0.0;
};

InequalityRatios inequality_ratios(const KernelW& w, const ElectronicOperator& op, const RealField& u1,
                                   const RealField& u2, const RealField& u3);

/// Ratios over n_trials seeded random bump triples sampled on the kernel's grid.
/// The draws depend only on (seed, box length), so two grids of the same box
/// see the same analytic functions.
InequalityProbe inequality_probe(const KernelW& w, const ElectronicOperator& op, int n_trials,
                                 std::uint64_t seed, int threads = 1);

std::string to_string(ResolventShift s);

}  // namespace kgs

