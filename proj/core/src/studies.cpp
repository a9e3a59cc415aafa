#include "kgs/studies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "kgs/random_states.hpp"

namespace kgs {

namespace {

StudyRecord record_from(double parameter, const GroundStateResult& r, double mu_v) {
  StudyRecord rec;
  rec.sweep_parameter = parameter;
  rec.energy = r.energy;
  rec.mu_v = mu_v;
  rec.f_l2_norm_sq = r.field.l2_norm2;
  rec.f_l2_origin_divergent = r.field.l2_origin_divergent;
  rec.f_zomega_norm_sq = r.field.zomega_norm2;
  rec.lambda = r.lambda;
  rec.residual = r.residual;
  rec.iterations = r.iterations;
  rec.converged = r.converged;
  rec.box_length = r.u_gs.grid().box_length();
  rec.n_per_axis = r.u_gs.grid().n();
  return rec;
}

RatioStats stats(std::vector<double> v) {
  RatioStats s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.max = v.back();
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size())));
  s.p95 = v[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

SmallGSweep small_g_sweep(const ModelSpec& model, const std::vector<double>& g_list, const GridSpec& grid,
                          const SweepOptions& opts) {
  if (g_list.empty()) throw InvalidArgument("g_list must not be empty");
  for (std::size_t i = 0; i < g_list.size(); ++i) {
    if (!(g_list[i] > 0.0)) throw InvalidArgument("g_list entries must be positive");
    if (i > 0 && !(g_list[i] > g_list[i - 1])) throw InvalidArgument("g_list must be strictly ascending");
  }
  ModelSpec unit = model;
  unit.g = 1.0;
  const Problem base = Problem::make(unit, grid);
  const ElectronicGround ground = electronic_ground(base.op, opts.eigen_tol);

  SmallGSweep out;
  out.mu_v = ground.mu;
  out.i2 = interaction_term(ground.u, base.kernel);
  out.records.resize(g_list.size());
  parallel_for(static_cast<int>(g_list.size()), opts.threads, [&](int i) {
    const double g = g_list[static_cast<std::size_t>(i)];
    const GroundStateResult r = minimize(base.with_coupling(g), ground, opts.minimize);
    StudyRecord rec = record_from(g, r, ground.mu);
    rec.i2_coherent = out.i2;
    rec.remainder = r.energy - ground.mu + g * g * out.i2;
    out.records[static_cast<std::size_t>(i)] = rec;
  });

  out.all_converged = true;
  for (const auto& rec : out.records) {
    if (!rec.converged) {
      out.all_converged = false;
      out.notices.push_back("g = " + std::to_string(rec.sweep_parameter) + " did not converge");
    }
    if (rec.remainder >= 0.0)
      out.notices.push_back("g = " + std::to_string(rec.sweep_parameter) + " has a nonnegative remainder");
    out.remainder_constant = std::max(out.remainder_constant, std::abs(rec.remainder) / std::pow(rec.sweep_parameter, 4));
  }
  if (!out.all_converged || out.records.size() < 2) return out;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(out.records.size());
  for (const auto& rec : out.records) {
    const double x = std::log(rec.sweep_parameter);
    const double y = std::log(std::abs(rec.remainder));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  for (auto& rec : out.records) rec.fitted_exponent = out.fitted_exponent;
  return out;
}

UvSweep uv_sweep(const ModelSpec& model, const std::vector<double>& lambda_list, const GridSpec& grid,
                 const SweepOptions& opts) {
  if (lambda_list.empty()) throw InvalidArgument("lambda_list must not be empty");
  for (std::size_t i = 0; i < lambda_list.size(); ++i) {
    if (!(lambda_list[i] > 0.0)) throw InvalidArgument("lambda_list entries must be positive");
    if (i > 0 && !(lambda_list[i] > lambda_list[i - 1])) throw InvalidArgument("lambda_list must be strictly ascending");
  }
  const double k_max = grid.k_max();
  if (std::abs(lambda_list.back() - k_max) > 1e-9 * k_max)
    throw InvalidArgument("the last lambda must be the grid's largest |k| (" + std::to_string(k_max) + ")");

  const ElectronicOperator op = ElectronicOperator::from_spec(model.potential, grid);
  const ElectronicGround ground = electronic_ground(op, opts.eigen_tol);
  const std::size_t count = lambda_list.size();
  std::vector<GroundStateResult> runs(count);
  std::vector<Problem> problems(count);
  parallel_for(static_cast<int>(count), opts.threads, [&](int i) {
    const auto idx = static_cast<std::size_t>(i);
    ModelSpec m = model;
    // The last entry covers the whole lattice.
    m.uv_cutoff = idx + 1 == count ? std::numeric_limits<double>::infinity() : lambda_list[idx];
    problems[idx] = Problem::make(m, grid);
    runs[idx] = minimize(problems[idx], ground, opts.minimize);
  });

  UvSweep out;
  out.all_converged = true;
  const GroundStateResult& ref = runs.back();
  for (std::size_t i = 0; i < count; ++i) {
    StudyRecord rec = record_from(lambda_list[i], runs[i], ground.mu);
    rec.u_qv_distance = qv_norm(runs[i].u_gs - ref.u_gs, op.potential());
    rec.f_zomega_distance = std::sqrt(field_energy(runs[i].f_gs - ref.f_gs, problems.back().modes));
    if (!rec.converged) {
      out.all_converged = false;
      out.notices.push_back("lambda = " + std::to_string(lambda_list[i]) + " did not converge");
    }
    out.records.push_back(rec);
  }
  out.energies_monotone = true;
  out.distances_monotone = true;
  for (std::size_t i = 1; i < count; ++i) {
    if (out.records[i].energy > out.records[i - 1].energy + 10.0 * opts.minimize.energy_tol)
      out.energies_monotone = false;
    if (out.records[i].u_qv_distance > out.records[i - 1].u_qv_distance) out.distances_monotone = false;
  }
  return out;
}

IrStudy ir_study(const ModelSpec& model, const std::vector<double>& box_lengths, double spacing,
                 const SweepOptions& opts) {
  if (box_lengths.size() < 2) throw InvalidArgument("ir_study needs at least two boxes");
  if (!(spacing > 0.0)) throw InvalidArgument("spacing must be positive");
  std::vector<GridSpec> grids;
  for (std::size_t i = 0; i < box_lengths.size(); ++i) {
    const double l = box_lengths[i];
    if (i > 0 && !(l > box_lengths[i - 1])) throw InvalidArgument("box lengths must be strictly ascending");
    const double ratio = l / spacing;
    const long n = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio)
      throw InvalidArgument("box length " + std::to_string(l) + " is not a multiple of the spacing");
    grids.push_back(make_grid(static_cast<int>(n), l));
  }

  const std::size_t count = box_lengths.size();
  IrStudy out;
  out.records.resize(count);
  parallel_for(static_cast<int>(count), opts.threads, [&](int i) {
    const auto idx = static_cast<std::size_t>(i);
    const Problem p = Problem::make(model, grids[idx]);
    const ElectronicGround ground = electronic_ground(p.op, opts.eigen_tol);
    const GroundStateResult r = minimize(p, ground, opts.minimize);
    out.records[idx] = record_from(box_lengths[idx], r, ground.mu);
  });
  out.all_converged = true;
  for (std::size_t i = 0; i < count; ++i) {
    if (!out.records[i].converged) {
      out.all_converged = false;
      out.notices.push_back("L = " + std::to_string(box_lengths[i]) + " did not converge");
    }
    if (i == 0) continue;
    out.increments.push_back(out.records[i].f_l2_norm_sq - out.records[i - 1].f_l2_norm_sq);
    out.predicted_increments.push_back(4.0 * std::numbers::pi * std::log(box_lengths[i] / box_lengths[i - 1]) *
                                       model.g * model.g);
  }
  return out;
}

double t_nc_sum(const Eigenpairs& basis, int n_basis, const FieldModes& modes, ResolventShift shift,
                const std::vector<std::size_t>& mode_indices) {
  if (n_basis < 1 || static_cast<std::size_t>(n_basis) > basis.states.size())
    throw InvalidArgument("n_basis exceeds the available eigenbasis");
  const RealField& u0 = basis.states.front();
  const GridSpec& grid = u0.grid();
  const std::size_t origin = grid.origin_index();
  std::vector<std::size_t> ks = mode_indices;
  if (ks.empty())
    for (std::size_t j = 0; j < grid.size(); ++j)
      if (j != origin) ks.push_back(j);

  double total = 0.0;
  for (int n = 1; n < n_basis; ++n) {
    const RealField& un = basis.states[static_cast<std::size_t>(n)];
    RealField prod(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) prod[i] = std::conj(un[i]) * u0[i];
    const SpectralField overlap = forward_transform(prod);
    const double excitation = basis.values[static_cast<std::size_t>(n)] - basis.values.front();
    for (std::size_t j : ks) {
      if (j == origin) continue;
      const double s = shift == ResolventShift::omega ? modes.omega[j].real() : grid.k_norm(j);
      const double den = excitation + s;
      if (!(den > 0.0)) throw InvalidArgument("resolvent denominator is not positive");
      total += std::norm(modes.v[j]) * std::norm(overlap[j]) / den;
    }
  }
  return grid.freq_cell_volume() * total;
}

SecondOrderSplit second_order_split(const Problem& problem, const Eigenpairs& basis, int n_eigenbasis,
                                    double max_residual) {
  if (n_eigenbasis < 2 || static_cast<std::size_t>(n_eigenbasis) > basis.states.size())
    throw InvalidArgument("n_eigenbasis must be between 2 and the basis size");
  for (int n = 0; n < n_eigenbasis; ++n)
    if (!(basis.residuals[static_cast<std::size_t>(n)] <= max_residual))
      throw InvalidArgument("eigenbasis residual " + std::to_string(basis.residuals[static_cast<std::size_t>(n)]) +
                            " of state " + std::to_string(n) + " exceeds " + std::to_string(max_residual));
  SecondOrderSplit out;
  out.g = problem.model.g;
  out.n_eigenbasis = n_eigenbasis;
  out.i2 = interaction_term(basis.states.front(), problem.with_coupling(1.0).kernel);
  out.t_nc = t_nc_sum(basis, n_eigenbasis, problem.modes, ResolventShift::omega);
  out.t_nc_k_norm = t_nc_sum(basis, n_eigenbasis, problem.modes, ResolventShift::k_norm);
  out.predicted_full_shift = out.g * out.g * (out.i2 + out.t_nc);
  return out;
}

InequalityRatios inequality_ratios(const KernelW& w, const ElectronicOperator& op, const RealField& u1,
                                   const RealField& u2, const RealField& u3) {
  const GridSpec& grid = w.grid();
  const auto [w1, w2] = split_W(w);
  double w1_l1 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) w1_l1 += std::abs(w1[i]);
  w1_l1 *= grid.freq_cell_volume();
  const double w2_weak = weak_lorentz_norm(w2, 3.0);

  RealField prod(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) prod[i] = u1[i] * u2[i];
  const SpectralField p = forward_transform(prod);
  SpectralField a(grid), b(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    a[i] = w1[i] * p[i];
    b[i] = w2[i] * p[i];
  }
  const RealField conv1 = bar_transform(a);
  const RealField conv2 = bar_transform(b);
  double sup1 = 0.0, sup2 = 0.0;
  RealField c2u3(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sup1 = std::max(sup1, std::abs(conv1[i]));
    sup2 = std::max(sup2, std::abs(conv2[i]));
    c2u3[i] = conv2[i] * u3[i];
  }
  const double n1 = l2_norm(u1), n2 = l2_norm(u2), n3 = l2_norm(u3);
  const double d1 = std::sqrt(h1dot_seminorm(u1)), d2 = std::sqrt(h1dot_seminorm(u2)),
               d3 = std::sqrt(h1dot_seminorm(u3));

  double b_neg = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) b_neg = std::max(b_neg, -op.potential()[i].real());

  InequalityRatios r;
  r.convolution_l1 = safe_ratio(sup1, w1_l1 * n1 * n2);
  r.convolution_weak = safe_ratio(sup2, w2_weak * d1 * d2);
  r.convolution_weak_product = safe_ratio(l2_norm(c2u3), w2_weak * n1 * d2 * d3);
  r.coercivity = safe_ratio(d3 * d3, op.expectation(u3) + b_neg * n3 * n3);
  return r;
}

InequalityProbe inequality_probe(const KernelW& w, const ElectronicOperator& op, int n_trials,
                                 std::uint64_t seed, int threads) {
  if (n_trials < 1) throw InvalidArgument("n_trials must be positive");
  if (!(op.grid() == w.grid())) throw InvalidArgument("kernel and operator live on different grids");
  const GridSpec& grid = w.grid();
  std::vector<InequalityRatios> trials(static_cast<std::size_t>(n_trials));
  parallel_for(n_trials, threads, [&](int t) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
    const BumpState s1 = random_bump_state(rng, grid.box_length());
    const BumpState s2 = random_bump_state(rng, grid.box_length());
    const BumpState s3 = random_bump_state(rng, grid.box_length());
    trials[static_cast<std::size_t>(t)] = inequality_ratios(w, op, s1.sample(grid), s2.sample(grid), s3.sample(grid));
  });
  std::vector<double> c1, c2, c3, co;
  for (const auto& r : trials) {
    c1.push_back(r.convolution_l1);
    c2.push_back(r.convolution_weak);
    c3.push_back(r.convolution_weak_product);
    co.push_back(r.coercivity);
  }
  InequalityProbe out;
  out.convolution_l1 = stats(c1);
  out.convolution_weak = stats(c2);
  out.convolution_weak_product = stats(c3);
  out.coercivity = stats(co);
  out.trials = n_trials;
  return out;
}

std::string to_string(ResolventShift s) { return s == ResolventShift::omega ? "omega" : "k_norm"; }

}  // namespace kgs
