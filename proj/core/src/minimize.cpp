#include "kgs/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kgs/detail/parallel.hpp"
#include "kgs/random_states.hpp"

namespace kgs {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Slack for energy comparisons that are decided by rounding.
// Summation noise of a lattice energy grows like sqrt(points).
double rounding_allowance(const HartreeEval& ev, std::size_t points) {
  return 16.0 * kEps * std::sqrt(static_cast<double>(points)) *
         (std::abs(ev.hv_expectation) + std::abs(ev.interaction) + 1.0);
}

// s D^-1/2 (-Lap + s)^-1 D^-1/2 with D = (V_+ + s)/s: near-identity scaling on
// both the kinetic and the potential-dominated ends of the spectrum.
RealField preconditioned(const ElectronicOperator& op, const RealField& g, double shift) {
  const RealField& v = op.potential();
  RealField tmp(g.grid()), out(g.grid());
  std::vector<double> damp(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    damp[i] = std::sqrt(shift / (std::max(0.0, v[i].real()) + shift));
    tmp[i] = damp[i] * g[i];
  }
  op.precondition_complex(tmp.data(), out.data(), shift);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] *= shift * damp[i];
  return out;
}

void finish(GroundStateResult& r, const Problem& p, const ElectronicGround& ground, const RealField& u,
            const HartreeEval& ev) {
  r.u_gs = phase_aligned(u, ground.u);
  r.energy = ev.energy;
  r.lambda = ev.lambda;
  r.residual = ev.residual_l2;
  r.field = field_from_state(r.u_gs, p.modes, p.model.g);
  r.f_gs = r.field.f;
}

RealField starting_state(const Problem& p, const ElectronicGround& ground, const MinimizeOptions& opts,
                         const RealField* provided) {
  switch (opts.start) {
    case StartKind::electronic_ground:
      return ground.u;
    case StartKind::random:
      return random_normalized_state(p.grid, opts.seed);
    case StartKind::provided:
      if (!provided) throw InvalidArgument("start = provided but no start state was given");
      if (!(provided->grid() == p.grid)) throw InvalidArgument("provided start lives on a different grid");
      return normalized(*provided);
  }
  return ground.u;
}

GroundStateResult projected_gradient(const Problem& p, const ElectronicGround& ground, const MinimizeOptions& opts,
                                     RealField u) {
  GroundStateResult r;
  r.method = "projected_gradient";
  HartreeEval ev = evaluate_hartree(u, p.op, p.kernel);
  r.energy_trace.push_back(ev.energy);
  double last_change = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (last_change <= opts.energy_tol && ev.residual_l2 <= opts.residual_tol) {
      r.converged = true;
      break;
    }
    const double s = std::max(1.0, std::abs(ev.lambda));
    RealField grad = ev.el_residual;
    grad *= 2.0;
    const RealField pg = preconditioned(p.op, grad, s);
    const RealField pu = preconditioned(p.op, u, s);
    const cplx alpha = inner_product(u, pg) / inner_product(u, pu).real();
    RealField d = pu;
    d *= alpha;
    d -= pg;
    const double slope = inner_product(grad, d).real();
    if (!(slope < 0.0)) break;

    double t = 1.0 / (2.0 * s);
    bool accepted = false;
    const double allowance = rounding_allowance(ev, p.grid.size());
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      RealField trial = u;
      trial.axpy(t, d);
      trial = normalized(trial);
      HartreeEval tev = evaluate_hartree(trial, p.op, p.kernel);
      if (tev.energy <= ev.energy + 1e-4 * t * slope + allowance) {
        last_change = std::abs(ev.energy - tev.energy);
        u = std::move(trial);
        ev = std::move(tev);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    r.energy_trace.push_back(ev.energy);
  }
  if (!r.converged && last_change <= opts.energy_tol && ev.residual_l2 <= opts.residual_tol) r.converged = true;
  r.iterations = it;
  finish(r, p, ground, u, ev);
  return r;
}

GroundStateResult scf(const Problem& p, const ElectronicGround& ground, const MinimizeOptions& opts, RealField u) {
  GroundStateResult r;
  r.method = "scf";
  HartreeEval ev = evaluate_hartree(u, p.op, p.kernel);
  r.energy_trace.push_back(ev.energy);
  double theta = opts.mixing;
  double last_change = std::numeric_limits<double>::infinity();
  const double eig_tol = std::min(1e-9, 0.1 * opts.residual_tol);
  std::vector<RealField> warm{u};
  std::vector<double> extra(p.grid.size());
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (last_change <= opts.energy_tol && ev.residual_l2 <= opts.residual_tol) {
      r.converged = true;
      break;
    }
    for (std::size_t i = 0; i < extra.size(); ++i) extra[i] = -2.0 * ev.vh[i].real();
    Eigenpairs lin;
    try {
      lin = lowest_eigenpairs_from(p.op, 1, eig_tol, warm, opts.seed, &extra);
    } catch (const ConvergenceError&) {
      break;
    }
    const RealField u_lin = phase_aligned(lin.states.front(), u);
    warm = {lin.states.front()};

    HartreeEval nev;
    RealField next;
    const double allowance = rounding_allowance(ev, p.grid.size());
    for (;;) {
      next = u;
      next *= (1.0 - theta);
      next.axpy(theta, u_lin);
      next = normalized(next);
      nev = evaluate_hartree(next, p.op, p.kernel);
      if (nev.energy <= ev.energy + allowance || theta < 1e-3) break;
      theta *= 0.5;
      ++r.mixing_halvings;
    }
    last_change = std::abs(ev.energy - nev.energy);
    u = std::move(next);
    ev = std::move(nev);
    r.energy_trace.push_back(ev.energy);
  }
  if (!r.converged && last_change <= opts.energy_tol && ev.residual_l2 <= opts.residual_tol) r.converged = true;
  r.iterations = it;
  r.final_mixing = theta;
  finish(r, p, ground, u, ev);
  return r;
}

}  // namespace

Problem Problem::make(const ModelSpec& model, const GridSpec& grid) {
  model.validate();
  Problem p;
  p.model = model;
  p.grid = grid;
  p.op = ElectronicOperator::from_spec(model.potential, grid);
  p.modes = build_field_modes(model, grid);
  p.kernel = build_kernel(model, grid);
  return p;
}

Problem Problem::with_coupling(double g) const {
  Problem p = *this;
  p.model.g = g;
  p.kernel = build_kernel(p.model, grid);
  return p;
}

void MinimizeOptions::validate() const {
  if (max_iter < 1) throw InvalidArgument("minimize.max_iter must be positive");
  if (!(energy_tol > 0.0)) throw InvalidArgument("minimize.energy_tol must be positive");
  if (!(residual_tol > 0.0)) throw InvalidArgument("minimize.residual_tol must be positive");
  if (!(mixing > 0.0 && mixing <= 1.0)) throw InvalidArgument("minimize.mixing must lie in (0, 1]");
}

RealField phase_aligned(const RealField& u, const RealField& ref) {
  const cplx ov = inner_product(u, ref);
  if (std::abs(ov) == 0.0) return u;
  return (ov / std::abs(ov)) * u;
}

GroundStateResult minimize(const Problem& problem, const ElectronicGround& ground, const MinimizeOptions& opts,
                           const RealField* provided_start) {
  opts.validate();
  if (!(ground.u.grid() == problem.grid)) throw InvalidArgument("electronic ground state lives on a different grid");
  RealField u0 = normalized(starting_state(problem, ground, opts, provided_start));
  switch (opts.method) {
    case Method::projected_gradient:
      return projected_gradient(problem, ground, opts, u0);
    case Method::scf:
      return scf(problem, ground, opts, u0);
    case Method::both_crosscheck: {
      GroundStateResult pg = projected_gradient(problem, ground, opts, u0);
      const GroundStateResult sc = scf(problem, ground, opts, u0);
      CrossCheck cc;
      cc.energy_difference = std::abs(pg.energy - sc.energy);
      cc.state_distance = l2_norm(pg.u_gs - sc.u_gs);
      cc.agree = cc.energy_difference <= 10.0 * opts.energy_tol && cc.state_distance <= 1e-5;
      pg.method = "both_crosscheck";
      pg.converged = pg.converged && sc.converged && cc.agree;
      pg.mixing_halvings = sc.mixing_halvings;
      pg.final_mixing = sc.final_mixing;
      pg.crosscheck = cc;
      return pg;
    }
  }
  return {};
}

PhiCheck phi_fixed_point_check(const GroundStateResult& result, const Problem& problem, const Eigenpairs& basis,
                               int n_eigenbasis) {
  if (n_eigenbasis < 2 || static_cast<std::size_t>(n_eigenbasis) > basis.states.size())
    throw InvalidArgument("n_eigenbasis must be between 2 and the basis size");
  const double mu = basis.values.front();
  const double gap = basis.gap();
  const double lambda = result.lambda;
  if (gap > 0.0 && lambda > mu + 0.5 * gap)
    throw InvalidArgument("lambda exceeds mu_V + gap/2; the reduced resolvent is not controlled");
  for (int n = 1; n < n_eigenbasis; ++n)
    if (std::abs(basis.values[n] - lambda) <= 1e-6 * std::max(gap, 1e-300))
      throw InvalidArgument("lambda is too close to an excited eigenvalue");

  const RealField& u = result.u_gs;
  const RealField& u_v = basis.states.front();
  RealField phi = u;
  phi.axpy(-inner_product(u_v, u), u_v);

  RealField source = hartree_potential(u, problem.kernel);
  for (std::size_t i = 0; i < source.size(); ++i) source[i] = 2.0 * source[i].real() * u[i];

  RealField rhs(u.grid());
  RealField remainder = source;
  remainder.axpy(-inner_product(u_v, source), u_v);
  for (int n = 1; n < n_eigenbasis; ++n) {
    const cplx c = inner_product(basis.states[n], source);
    rhs.axpy(c / (basis.values[n] - lambda), basis.states[n]);
    remainder.axpy(-c, basis.states[n]);
  }
  PhiCheck out;
  out.phi_norm = l2_norm(phi);
  out.lhs_rhs_gap = l2_norm(phi - rhs);
  out.tail_estimate = l2_norm(remainder) / std::max(1e-300, basis.values[n_eigenbasis - 1] - lambda);
  return out;
}

UniquenessReport uniqueness_probe(const Problem& problem, const ElectronicGround& ground,
                                  const MinimizeOptions& opts, int n_starts, std::uint64_t seed, int threads) {
  if (n_starts < 2) throw InvalidArgument("uniqueness_probe needs at least two starts");
  std::vector<GroundStateResult> runs(static_cast<std::size_t>(n_starts));
  parallel_for(n_starts, threads, [&](int i) {
    MinimizeOptions o = opts;
    o.start = StartKind::random;
    o.seed = seed + static_cast<std::uint64_t>(i);
    runs[static_cast<std::size_t>(i)] = minimize(problem, ground, o);
  });

  UniquenessReport rep;
  std::vector<const GroundStateResult*> ok;
  for (int i = 0; i < n_starts; ++i) {
    const auto& r = runs[static_cast<std::size_t>(i)];
    if (!r.converged) {
      ++rep.excluded;
      rep.notices.push_back("start " + std::to_string(i) + " did not converge and is excluded");
      continue;
    }
    ok.push_back(&r);
    rep.energies.push_back(r.energy);
  }
  for (std::size_t a = 0; a < ok.size(); ++a)
    for (std::size_t b = a + 1; b < ok.size(); ++b)
      rep.max_pairwise_l2 = std::max(rep.max_pairwise_l2, l2_norm(ok[a]->u_gs - ok[b]->u_gs));
  if (!rep.energies.empty()) {
    const auto [lo, hi] = std::minmax_element(rep.energies.begin(), rep.energies.end());
    rep.energy_spread = *hi - *lo;
  }
  return rep;
}

ExistenceReport existence_condition_report(const Problem& problem, double mu_v, double boost_c, double boost_radius,
                                           double tol) {
  ExistenceReport rep;
  const Decomposition d = decompose_W(problem.kernel);
  rep.w1_l1 = d.w1_l1_norm;
  rep.w2_weak3 = d.w2_weak3_norm;
  RealField v1 = problem.op.potential();
  if (boost_c > 0.0) {
    v1 = confining_potential(v1, boost_c, boost_radius);
  } else {
    for (auto& z : v1.samples()) z = std::max(0.0, z.real());
  }
  rep.mu_v1 = lowest_eigenpairs(ElectronicOperator(problem.grid, v1), 1, tol).values.front();
  rep.gap_mu = rep.mu_v1 - mu_v;
  if (rep.w1_l1 == 0.0)
    rep.smallness_ratio = 0.0;
  else
    rep.smallness_ratio = rep.gap_mu > 0.0 ? rep.w1_l1 / rep.gap_mu : std::numeric_limits<double>::infinity();
  return rep;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::projected_gradient: return "projected_gradient";
    case Method::scf: return "scf";
    case Method::both_crosscheck: return "both_crosscheck";
  }
  return "?";
}

std::string to_string(StartKind s) {
  switch (s) {
    case StartKind::electronic_ground: return "electronic_ground";
    case StartKind::random: return "random";
    case StartKind::provided: return "provided";
  }
  return "?";
}

}  // namespace kgs
