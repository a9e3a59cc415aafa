#include "kgs/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "kgs/config.hpp"
#include "kgs/fock.hpp"
#include "kgs/random_states.hpp"
#include "kgs/report.hpp"
#include "kgs/studies.hpp"

namespace kgs {

namespace {

using nlohmann::json;

struct Context {
  RunConfig cfg;
  RunWriter& writer;
  std::ostream& out;
  int threads = 1;
};

double eigen_tol(const RunConfig& cfg) { return cfg.study.eigen_tol; }

// JSON has no infinities; they are written as strings.
json number(double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); }

void cmd_solve(Context& c) {
  const Problem p = Problem::make(c.cfg.model, c.cfg.grid());
  const ElectronicGround ground = electronic_ground(p.op, eigen_tol(c.cfg));
  c.writer.add_stage("electronic_ground", true, {{"mu_v", ground.mu}, {"gap", ground.gap}});
  const GroundStateResult r = minimize(p, ground, c.cfg.minimize);
  json detail{{"method", r.method}, {"iterations", r.iterations}, {"residual", r.residual}};
  if (r.crosscheck) {
    detail["crosscheck"] = {{"energy_difference", r.crosscheck->energy_difference},
                            {"state_distance", r.crosscheck->state_distance},
                            {"agree", r.crosscheck->agree}};
  }
  if (r.mixing_halvings > 0) detail["mixing_halvings"] = r.mixing_halvings;
  c.writer.add_stage("minimize", r.converged, detail);

  CsvTable t{{{"g", "1"},
              {"energy", "energy"},
              {"mu_v", "energy"},
              {"lambda", "energy"},
              {"residual", "energy"},
              {"f_zomega_norm_sq", "energy"},
              {"f_l2_norm_sq", "1"},
              {"iterations", "1"},
              {"converged", "1"}},
             {}};
  t.add_row({c.cfg.model.g, r.energy, ground.mu, r.lambda, r.residual, r.field.zomega_norm2,
             r.field.l2_norm2, static_cast<long long>(r.iterations), r.converged});
  c.writer.write_csv("solve.csv", t, "ground-state energy, multiplier and field norms");
  std::vector<std::pair<double, double>> trace;
  for (std::size_t i = 0; i < r.energy_trace.size(); ++i) trace.emplace_back(double(i), r.energy_trace[i]);
  c.writer.write_plot("energy_trace.dat", "iteration", "energy", trace);
  c.out << "energy " << format_double(r.energy) << "  mu_v " << format_double(ground.mu) << "  residual "
        << format_double(r.residual) << "  converged " << (r.converged ? "yes" : "no") << '\n';
}

void cmd_sweep_g(Context& c) {
  SweepOptions so{c.cfg.minimize, eigen_tol(c.cfg), c.threads};
  const SmallGSweep s = small_g_sweep(c.cfg.model, c.cfg.study.g_list, c.cfg.grid(), so);
  c.writer.add_stage("small_g_sweep", s.all_converged,
                     {{"i2", s.i2},
                      {"mu_v", s.mu_v},
                      {"fitted_exponent", std::isnan(s.fitted_exponent) ? json(nullptr) : json(s.fitted_exponent)},
                      {"remainder_constant", s.remainder_constant},
                      {"notices", s.notices}});
  CsvTable t{{{"g", "1"},
              {"energy", "energy"},
              {"mu_v", "energy"},
              {"i2", "energy"},
              {"remainder", "energy"},
              {"remainder_over_g4", "energy"},
              {"lambda", "energy"},
              {"residual", "energy"},
              {"iterations", "1"},
              {"converged", "1"}},
             {}};
  std::vector<std::pair<double, double>> energy, remainder;
  for (const auto& r : s.records) {
    const double g = r.sweep_parameter;
    t.add_row({g, r.energy, r.mu_v, r.i2_coherent, r.remainder, r.remainder / std::pow(g, 4), r.lambda, r.residual,
               static_cast<long long>(r.iterations), r.converged});
    energy.emplace_back(g, r.energy);
    remainder.emplace_back(g, std::abs(r.remainder));
  }
  c.writer.write_csv("sweep_g.csv", t, "small-coupling sweep with remainder r(g) = E - mu_V + g^2 I2");
  c.writer.write_plot("energy_vs_g.dat", "g", "energy", energy);
  c.writer.write_plot("abs_remainder_vs_g.dat", "g", "abs_remainder", remainder);
  c.out << "I2 " << format_double(s.i2) << "  fitted exponent " << format_double(s.fitted_exponent) << '\n';
}

void cmd_sweep_uv(Context& c) {
  const GridSpec grid = c.cfg.grid();
  std::vector<double> lambdas = c.cfg.study.lambda_list;
  for (double& l : lambdas)
    if (l < 0.0) l = grid.k_max();
  SweepOptions so{c.cfg.minimize, eigen_tol(c.cfg), c.threads};
  const UvSweep s = uv_sweep(c.cfg.model, lambdas, grid, so);
  c.writer.add_stage("uv_sweep", s.all_converged,
                     {{"energies_monotone", s.energies_monotone},
                      {"distances_monotone", s.distances_monotone},
                      {"reference_lambda", grid.k_max()},
                      {"notices", s.notices}});
  CsvTable t{{{"lambda", "1/length"},
              {"energy", "energy"},
              {"u_qv_distance", "1"},
              {"f_zomega_distance", "energy^1/2"}},
             {}};
  std::vector<std::pair<double, double>> energy, dist;
  for (const auto& r : s.records) {
    t.add_row({r.sweep_parameter, r.energy, r.u_qv_distance, r.f_zomega_distance});
    energy.emplace_back(r.sweep_parameter, r.energy);
    dist.emplace_back(r.sweep_parameter, r.u_qv_distance);
  }
  c.writer.write_csv("sweep_uv.csv", t, "ultraviolet sweep; the last row is the lattice reference");
  c.writer.write_plot("energy_vs_lambda.dat", "lambda", "energy", energy);
  c.writer.write_plot("qv_distance_vs_lambda.dat", "lambda", "u_qv_distance", dist);
  c.out << "energies monotone " << (s.energies_monotone ? "yes" : "no") << "  distances monotone "
        << (s.distances_monotone ? "yes" : "no") << '\n';
}

void cmd_ir_check(Context& c) {
  if (c.cfg.model.coupling.kind != CouplingKind::nelson)
    throw ConfigError("config error: field 'model.coupling.kind' must be nelson for ir-check");
  CsvTable t{{{"kappa", "1/length"},
              {"box_length", "length"},
              {"n_per_axis", "1"},
              {"f_l2_norm_sq", "1"},
              {"f_l2_origin_divergent", "1"},
              {"f_zomega_norm_sq", "energy"},
              {"energy", "energy"},
              {"converged", "1"}},
             {}};
  SweepOptions so{c.cfg.minimize, eigen_tol(c.cfg), c.threads};
  for (double kappa : c.cfg.study.kappa_list) {
    ModelSpec m = c.cfg.model;
    m.coupling.kappa = kappa;
    const IrStudy s = ir_study(m, c.cfg.study.box_lengths, c.cfg.study.spacing, so);
    std::vector<std::pair<double, double>> curve;
    for (const auto& r : s.records) {
      t.add_row({kappa, r.box_length, static_cast<long long>(r.n_per_axis), r.f_l2_norm_sq, r.f_l2_origin_divergent,
                 r.f_zomega_norm_sq, r.energy, r.converged});
      curve.emplace_back(r.box_length, r.f_l2_norm_sq);
    }
    std::ostringstream name;
    name << "f_l2_vs_box_kappa_" << format_double(kappa) << ".dat";
    c.writer.write_plot(name.str(), "box_length", "f_l2_norm_sq", curve);
    c.writer.add_stage("ir_study kappa=" + format_double(kappa), s.all_converged,
                       {{"increments", s.increments}, {"predicted_increments", s.predicted_increments},
                        {"notices", s.notices}});
    c.out << "kappa " << format_double(kappa) << " increments";
    for (double d : s.increments) c.out << ' ' << format_double(d);
    c.out << '\n';
  }
  c.writer.write_csv("ir.csv", t, "||f_gs||^2 against box length at fixed spacing");
}

void cmd_perturb2(Context& c) {
  const Problem p = Problem::make(c.cfg.model, c.cfg.grid());
  const int n = c.cfg.study.n_eigenbasis;
  const double tol = std::min(eigen_tol(c.cfg), 1e-9);
  const Eigenpairs basis = lowest_eigenpairs(p.op, n, tol, c.cfg.seed);
  c.writer.add_stage("eigenbasis", true, {{"count", n}, {"iterations", basis.iterations}});
  CsvTable t{{{"n_eigenbasis", "1"},
              {"g", "1"},
              {"mu_v", "energy"},
              {"i2", "energy"},
              {"t_nc", "energy"},
              {"t_nc_k_norm", "energy"},
              {"predicted_full_shift", "energy"}},
             {}};
  std::vector<int> sizes;
  for (int m : {n / 4, n / 2, n})
    if (m >= 2 && (sizes.empty() || sizes.back() != m)) sizes.push_back(m);
  std::vector<std::pair<double, double>> curve;
  for (int m : sizes) {
    const SecondOrderSplit s = second_order_split(p, basis, m, 1e-8);
    t.add_row({static_cast<long long>(m), s.g, basis.values.front(), s.i2, s.t_nc, s.t_nc_k_norm, s.predicted_full_shift});
    curve.emplace_back(double(m), s.t_nc);
  }
  c.writer.write_csv("perturb2.csv", t, "second-order split into coherent I2 and non-coherent T_nc");
  c.writer.write_plot("t_nc_vs_basis.dat", "n_eigenbasis", "t_nc", curve);
  c.out << "perturb2 rows " << sizes.size() << '\n';
}

void cmd_fock_check(Context& c) {
  const FockStudyConfig& fc = c.cfg.study.fock;
  std::mt19937_64 rng(c.cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CsvTable ids{{{"trial", "1"},
                {"n_modes", "1"},
                {"number_expectation", "energy"},
                {"number_closed_form", "energy"},
                {"field_expectation", "1"},
                {"field_closed_form", "1"},
                {"truncation_tail", "1"}},
               {}};
  double worst = 0.0;
  for (int trial = 0; trial < fc.n_random; ++trial) {
    const int modes = 1 + trial % 2;
    FockSpec spec;
    spec.n_modes = modes;
    spec.n_max = fc.identity_n_max;
    spec.omegas.clear();
    std::vector<cplx> f, h;
    double norm2 = 0.0;
    for (int m = 0; m < modes; ++m) {
      spec.omegas.push_back(0.5 + 1.5 * unit(rng));
      f.push_back(std::polar(unit(rng), 2.0 * M_PI * unit(rng)));
      h.push_back(std::polar(unit(rng), 2.0 * M_PI * unit(rng)));
      norm2 += std::norm(f.back());
    }
    // Rescale into the ball |f| <= f_max.
    const double scale = fc.f_max * unit(rng) / std::sqrt(std::max(norm2, 1e-300));
    double number_closed = 0.0;
    cplx hf = 0.0;
    for (int m = 0; m < modes; ++m) {
      f[static_cast<std::size_t>(m)] *= scale;
      number_closed += spec.omegas[static_cast<std::size_t>(m)] * std::norm(f[static_cast<std::size_t>(m)]);
      hf += std::conj(h[static_cast<std::size_t>(m)]) * f[static_cast<std::size_t>(m)];
    }
    const double field_closed = std::sqrt(2.0) * hf.real();
    const double number = expect_number(f, spec);
    const double field = expect_field(h, f, spec);
    worst = std::max({worst, std::abs(number - number_closed), std::abs(field - field_closed)});
    ids.add_row({static_cast<long long>(trial), static_cast<long long>(modes), number, number_closed, field,
                 field_closed, truncation_tail(norm2 * scale * scale, spec.n_max)});
  }
  c.writer.write_csv("fock_identities.csv", ids, "coherent-state number and field expectations");
  c.writer.add_stage("coherent_identities", true, {{"max_abs_error", worst}, {"trials", fc.n_random}});

  CsvTable mini{{{"g", "1"},
                 {"e_full", "energy"},
                 {"e_quasi", "energy"},
                 {"e_quasi_minus_e_full", "energy"},
                 {"g2_t_nc", "energy"},
                 {"dimension", "1"},
                 {"ordering_holds", "1"}},
                {}};
  const GridSpec small = make_grid(fc.n_per_axis, fc.box_length);
  bool all_ok = true;
  json detail = json::array();
  for (double g : fc.g_list) {
    ModelSpec m = c.cfg.model;
    m.g = g;
    const Problem p = Problem::make(m, small);
    const MiniPauliFierz r = mini_pauli_fierz(p, axis_modes(small, fc.n_modes), fc.n_max);
    const bool ordering = r.e_full <= r.e_quasi + 1e-9;
    all_ok = all_ok && r.quasi_converged;
    mini.add_row({g, r.e_full, r.e_quasi, r.e_quasi - r.e_full, g * g * r.t_nc, static_cast<long long>(r.dimension),
                  ordering});
    detail.push_back({{"g", g}, {"ordering_holds", ordering}, {"quasi_converged", r.quasi_converged}});
  }
  c.writer.write_csv("fock_mini.csv", mini, "truncated Pauli-Fierz ground energy against the product-state minimum");
  c.writer.add_stage("mini_pauli_fierz", all_ok, detail);
  c.out << "coherent identities max error " << format_double(worst) << '\n';
}

void cmd_probe_ineq(Context& c) {
  CsvTable t{{{"inequality", "1"}, {"n_per_axis", "1"}, {"max_ratio", "1"}, {"p95_ratio", "1"}, {"trials", "1"}}, {}};
  std::vector<int> sizes{c.cfg.n_per_axis};
  if (c.cfg.study.refine_n_per_axis != 0 && c.cfg.study.refine_n_per_axis != c.cfg.n_per_axis)
    sizes.push_back(c.cfg.study.refine_n_per_axis);
  std::map<int, InequalityProbe> results;
  for (int n : sizes) {
    const Problem p = Problem::make(c.cfg.model, make_grid(n, c.cfg.box_length));
    const InequalityProbe r = inequality_probe(p.kernel, p.op, c.cfg.study.n_trials, c.cfg.seed, c.threads);
    results[n] = r;
    const std::pair<const char*, RatioStats> rows[] = {{"convolution_l1", r.convolution_l1},
                                                       {"convolution_weak", r.convolution_weak},
                                                       {"convolution_weak_product", r.convolution_weak_product},
                                                       {"coercivity", r.coercivity}};
    for (const auto& [name, st] : rows)
      t.add_row({std::string(name), static_cast<long long>(n), st.max, st.p95, static_cast<long long>(r.trials)});
  }
  c.writer.write_csv("probe.csv", t, "empirical inequality ratios per grid");
  json detail = json::object();
  if (sizes.size() == 2) {
    const auto& a = results[sizes[0]];
    const auto& b = results[sizes[1]];
    detail["refinement_max_ratio"] = {{"convolution_l1", b.convolution_l1.max / a.convolution_l1.max},
                                      {"convolution_weak", b.convolution_weak.max / a.convolution_weak.max},
                                      {"convolution_weak_product",
                                       b.convolution_weak_product.max / a.convolution_weak_product.max}};
  }
  c.writer.add_stage("inequality_probe", true, detail);
  c.out << "probe trials " << c.cfg.study.n_trials << " on " << sizes.size() << " grid(s)\n";
}

void cmd_diagnose(Context& c) {
  const GridSpec grid = c.cfg.grid();
  const Problem p = Problem::make(c.cfg.model, grid);
  const Decomposition d = decompose_W(p.kernel);
  const IrCriterion ir = ir_l2_criterion(c.cfg.model, grid);
  const IrCriterion ir2 = ir_l2_criterion(c.cfg.model, make_grid(2 * grid.n(), 2 * grid.box_length()));
  const double growth = ir.low_band > 0.0 ? ir2.low_band / ir.low_band - 1.0 : 0.0;
  // The origin power law decides divergence; the doubled-box growth is reported as evidence.
  const bool ir_divergent = ir.low_band_divergent || ir2.low_band_divergent;
  const ElectronicGround ground = electronic_ground(p.op, eigen_tol(c.cfg));
  const ExistenceReport ex =
      existence_condition_report(p, ground.mu, c.cfg.study.boost_c, c.cfg.study.boost_radius, eigen_tol(c.cfg));

  std::vector<RealField> states;
  for (int i = 0; i < 100; ++i) states.push_back(random_normalized_state(grid, c.cfg.seed + static_cast<std::uint64_t>(i)));
  const std::vector<double> a_values{0.0, 0.25, 0.5, 0.75};
  const std::vector<double> b_values = minimal_form_bound(p.op, states, a_values);

  json report{{"decomposition", {{"split_radius", p.kernel.split_radius}, {"w1_l1", d.w1_l1_norm}, {"w2_weak3", d.w2_weak3_norm}}},
              {"ir_l2_criterion",
               {{"low_band", ir.low_band},
                {"high_band", ir.high_band},
                {"origin_divergent", ir.low_band_divergent},
                {"low_band_doubled_box", ir2.low_band},
                {"low_band_growth", number(growth)},
                {"grid_divergent", ir_divergent}}},
              {"electronic", {{"mu_v", ground.mu}, {"gap", ground.gap}}},
              {"existence",
               {{"w1_l1", ex.w1_l1},
                {"w2_weak3", ex.w2_weak3},
                {"mu_v1", ex.mu_v1},
                {"gap_mu", ex.gap_mu},
                {"smallness_ratio", number(ex.smallness_ratio)}}},
              {"coercivity", {{"a", a_values}, {"minimal_b", b_values}, {"states", states.size()}}}};
  c.writer.write_json("diagnose.json", report, "hypothesis diagnostics");
  std::ostringstream txt;
  txt << "W decomposition (split radius " << format_double(p.kernel.split_radius) << ")\n"
      << "  ||W1||_L1        " << format_double(d.w1_l1_norm) << '\n'
      << "  ||W2||_L3,inf    " << format_double(d.w2_weak3_norm) << '\n'
      << "infrared L2 criterion\n"
      << "  low band         " << format_double(ir.low_band) << (ir_divergent ? "  (grid-divergent)" : "") << '\n'
      << "  high band        " << format_double(ir.high_band) << '\n'
      << "existence ingredients\n"
      << "  mu_V             " << format_double(ground.mu) << '\n'
      << "  mu_V1 - mu_V     " << format_double(ex.gap_mu) << '\n'
      << "  ||W1||_1 / gap   " << format_double(ex.smallness_ratio) << '\n'
      << "coercivity: minimal b for a = 0, 0.25, 0.5, 0.75\n ";
  for (double b : b_values) txt << ' ' << format_double(b);
  txt << '\n';
  c.writer.write_text("diagnose.txt", txt.str(), "hypothesis diagnostics, human-readable");
  c.writer.add_stage("diagnose", true);
  c.out << txt.str();
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"solve",      "sweep-g",    "sweep-uv",   "ir-check",
                                              "perturb2",   "fock-check", "probe-ineq", "diagnose"};
  return names;
}

int resolve_threads(std::optional<int> cli, int configured) {
  if (cli) return std::max(1, *cli);
  if (const char* env = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  return std::max(1, configured);
}

int run_command(const CommandRequest& request, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, std::function<void(Context&)>> table{
      {"solve", cmd_solve},       {"sweep-g", cmd_sweep_g},       {"sweep-uv", cmd_sweep_uv},
      {"ir-check", cmd_ir_check}, {"perturb2", cmd_perturb2},     {"fock-check", cmd_fock_check},
      {"probe-ineq", cmd_probe_ineq}, {"diagnose", cmd_diagnose}};
  const auto it = table.find(request.command);
  if (it == table.end()) {
    err << "unknown command '" << request.command << "'\n";
    return exit_invalid_config;
  }
  RunConfig cfg;
  try {
    cfg = load_config(request.config_path);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return exit_invalid_config;
  }
  if (request.seed) {
    cfg.seed = *request.seed;
    cfg.minimize.seed = *request.seed;
  }
  if (request.output_dir) cfg.output_dir = *request.output_dir;
  const int threads = resolve_threads(request.threads, cfg.threads);

  std::optional<RunWriter> writer;
  try {
    writer.emplace(cfg.output_dir, request.command, to_json(cfg));
  } catch (const std::exception& e) {
    err << "cannot create output directory: " << e.what() << '\n';
    return exit_not_converged;
  }
  Context ctx{cfg, *writer, out, threads};
  try {
    it->second(ctx);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    writer->finish(exit_invalid_config, e.what());
    return exit_invalid_config;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << '\n';
    writer->finish(exit_invalid_config, e.what());
    return exit_invalid_config;
  } catch (const ConvergenceError& e) {
    err << "not converged: " << e.what() << " (best residual " << format_double(e.best_residual()) << ")\n";
    writer->add_stage("error", false, {{"message", e.what()}, {"best_residual", e.best_residual()}});
    writer->finish(exit_not_converged, e.what());
    return exit_not_converged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    writer->add_stage("error", false, {{"message", e.what()}});
    writer->finish(exit_not_converged, e.what());
    return exit_not_converged;
  }
  const int code = writer->all_converged() ? exit_ok : exit_not_converged;
  writer->finish(code);
  return code;
}

}  // namespace kgs
