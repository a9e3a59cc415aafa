#include "kgs/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace kgs {

namespace {

using nlohmann::json;

// Best-effort line of a key path in the source: each key is searched after
// the position of its parent.
int locate_line(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  bool found = false;
  for (const auto& key : path) {
    const std::size_t at = text.find("\"" + key + "\"", pos);
    if (at == std::string::npos) break;
    pos = at;
    found = true;
  }
  if (!found) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
 public:
  Reader(const std::string& text, const json& node, std::vector<std::string> path)
      : text_(text), node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("must be an object");
  }

  [[noreturn]] void fail(const std::string& msg, const std::string& key = "") const {
    std::vector<std::string> p = path_;
    if (!key.empty()) p.push_back(key);
    std::string name;
    for (const auto& s : p) name += (name.empty() ? "" : ".") + s;
    if (name.empty()) name = "<root>";
    const int line = locate_line(text_, p);
    std::ostringstream os;
    os << "config error";
    if (line > 0) os << " at line " << line;
    os << ": field '" << name << "' " << msg;
    throw ConfigError(os.str());
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  Reader child(const std::string& key) {
    seen_.insert(key);
    auto p = path_;
    p.push_back(key);
    if (!node_.contains(key)) return Reader(text_, empty_object(), p);
    return Reader(text_, node_.at(key), p);
  }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const json& v = node_.at(key);
    if (!v.is_number()) fail("must be a number", key);
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail("must be finite", key);
    return d;
  }

  /// Number or the string "inf".
  double number_or_inf(const std::string& key, double def) {
    if (!has(key)) return def;
    const json& v = node_.at(key);
    if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    if (!v.is_number()) fail("must be a number or \"inf\"", key);
    return v.get<double>();
  }

  long long integer(const std::string& key, long long def) {
    if (!has(key)) return def;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) fail("must be an integer", key);
    return v.get<long long>();
  }

  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const json& v = node_.at(key);
    if (!v.is_string()) fail("must be a string", key);
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& def, bool allow_kmax = false) {
    if (!has(key)) return def;
    const json& v = node_.at(key);
    if (!v.is_array()) fail("must be an array", key);
    if (v.empty()) fail("must not be empty", key);
    std::vector<double> out;
    for (const auto& e : v) {
      if (allow_kmax && e.is_string() && e.get<std::string>() == "k_max") {
        out.push_back(-1.0);
        continue;
      }
      if (!e.is_number()) fail(allow_kmax ? "entries must be numbers or \"k_max\"" : "entries must be numbers", key);
      out.push_back(e.get<double>());
    }
    return out;
  }

  template <class Enum>
  Enum choice(const std::string& key, Enum def, const std::vector<std::pair<std::string, Enum>>& options) {
    if (!has(key)) return def;
    const std::string s = string(key, "");
    std::string allowed;
    for (const auto& [name, value] : options) {
      if (name == s) return value;
      allowed += (allowed.empty() ? "" : ", ") + name;
    }
    fail("must be one of: " + allowed, key);
  }

  /// Rejects keys that were never asked for.
  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.count(it.key())) fail("is not a recognized key", it.key());
  }

  const std::vector<std::string>& path() const { return path_; }

 private:
  static const json& empty_object() {
    static const json e = json::object();
    return e;
  }

  const std::string& text_;
  const json& node_;
  std::vector<std::string> path_;
  std::set<std::string> seen_;
};

template <class Fn>
void wrap(Reader& r, const std::string& key, Fn&& fn) {
  try {
    fn();
  } catch (const InvalidArgument& e) {
    r.fail(e.what(), key);
  }
}

PotentialSpec read_potential(Reader r) {
  PotentialSpec p;
  p.kind = r.choice<PotentialKind>("kind", PotentialKind::harmonic,
                                   {{"harmonic", PotentialKind::harmonic},
                                    {"gaussian_well", PotentialKind::gaussian_well},
                                    {"soft_coulomb", PotentialKind::soft_coulomb}});
  p.omega0 = r.number("omega0", p.omega0);
  p.depth = r.number("depth", p.depth);
  p.width = r.number("width", p.width);
  p.charge = r.number("charge", p.charge);
  p.softening = r.number("softening", p.softening);
  r.finish();
  wrap(r, "", [&] { p.validate(); });
  return p;
}

DispersionSpec read_dispersion(Reader r) {
  DispersionSpec d;
  d.kind = r.choice<DispersionKind>("kind", DispersionKind::constant_one,
                                    {{"relativistic", DispersionKind::relativistic},
                                     {"constant_one", DispersionKind::constant_one},
                                     {"acoustic", DispersionKind::acoustic}});
  d.mass = r.number("mass", d.mass);
  d.slope = r.number("slope", d.slope);
  r.finish();
  wrap(r, "", [&] { d.validate(); });
  return d;
}

CouplingSpec read_coupling(Reader r) {
  CouplingSpec c;
  c.kind = r.choice<CouplingKind>("kind", CouplingKind::polaron,
                                  {{"nelson", CouplingKind::nelson},
                                   {"polaron", CouplingKind::polaron},
                                   {"phonon", CouplingKind::phonon}});
  c.kappa = r.number("kappa", c.kappa);
  c.regularizer = r.choice<IrRegularizer>("regularizer", IrRegularizer::smooth,
                                          {{"smooth", IrRegularizer::smooth}, {"sharp", IrRegularizer::sharp}});
  r.finish();
  wrap(r, "", [&] { c.validate(); });
  return c;
}

ModelSpec read_model(Reader r) {
  ModelSpec m;
  m.potential = read_potential(r.child("potential"));
  m.dispersion = read_dispersion(r.child("dispersion"));
  m.coupling = read_coupling(r.child("coupling"));
  m.g = r.number("g", m.g);
  m.uv_cutoff = r.number_or_inf("uv_cutoff", m.uv_cutoff);
  m.split_radius = r.number("split_radius", m.split_radius);
  m.k_zero = r.choice<KZeroPolicy>("k_zero", m.k_zero,
                                   {{"lattice_corrected", KZeroPolicy::lattice_corrected},
                                    {"cell_average", KZeroPolicy::cell_average}});
  r.finish();
  wrap(r, "", [&] { m.validate(); });
  return m;
}

MinimizeOptions read_minimize(Reader r) {
  MinimizeOptions o;
  o.method = r.choice<Method>("method", o.method,
                              {{"projected_gradient", Method::projected_gradient},
                               {"scf", Method::scf},
                               {"both_crosscheck", Method::both_crosscheck}});
  o.max_iter = static_cast<int>(r.integer("max_iter", o.max_iter));
  o.energy_tol = r.number("energy_tol", o.energy_tol);
  o.residual_tol = r.number("residual_tol", o.residual_tol);
  o.mixing = r.number("mixing", o.mixing);
  o.start = r.choice<StartKind>("start", o.start,
                                {{"electronic_ground", StartKind::electronic_ground},
                                 {"random", StartKind::random}});
  r.finish();
  wrap(r, "", [&] { o.validate(); });
  return o;
}

FockStudyConfig read_fock(Reader r) {
  FockStudyConfig f;
  f.n_per_axis = static_cast<int>(r.integer("n_per_axis", f.n_per_axis));
  f.box_length = r.number("box_length", f.box_length);
  f.n_modes = static_cast<int>(r.integer("n_modes", f.n_modes));
  f.n_max = static_cast<int>(r.integer("n_max", f.n_max));
  f.g_list = r.numbers("g_list", f.g_list);
  f.n_random = static_cast<int>(r.integer("n_random", f.n_random));
  f.f_max = r.number("f_max", f.f_max);
  f.identity_n_max = static_cast<int>(r.integer("identity_n_max", f.identity_n_max));
  r.finish();
  if (f.n_per_axis > 8) r.fail("must be at most 8", "n_per_axis");
  wrap(r, "n_per_axis", [&] { (void)make_grid(f.n_per_axis, f.box_length); });
  if (f.n_modes < 1 || f.n_modes > 3) r.fail("must be 1, 2 or 3", "n_modes");
  if (f.n_max < 1) r.fail("must be at least 1", "n_max");
  if (f.identity_n_max < 1) r.fail("must be at least 1", "identity_n_max");
  if (f.n_random < 0) r.fail("must be nonnegative", "n_random");
  if (!(f.f_max >= 0.0)) r.fail("must be nonnegative", "f_max");
  return f;
}

StudyConfig read_study(Reader r) {
  StudyConfig s;
  s.g_list = r.numbers("g_list", s.g_list);
  s.lambda_list = r.numbers("lambda_list", s.lambda_list, true);
  s.box_lengths = r.numbers("box_lengths", s.box_lengths);
  s.spacing = r.number("spacing", s.spacing);
  s.kappa_list = r.numbers("kappa_list", s.kappa_list);
  s.n_trials = static_cast<int>(r.integer("n_trials", s.n_trials));
  s.n_eigenbasis = static_cast<int>(r.integer("n_eigenbasis", s.n_eigenbasis));
  s.refine_n_per_axis = static_cast<int>(r.integer("refine_n_per_axis", s.refine_n_per_axis));
  s.n_starts = static_cast<int>(r.integer("n_starts", s.n_starts));
  s.eigen_tol = r.number("eigen_tol", s.eigen_tol);
  s.boost_c = r.number("boost_c", s.boost_c);
  s.boost_radius = r.number("boost_radius", s.boost_radius);
  s.fock = read_fock(r.child("fock"));
  r.finish();
  for (double g : s.g_list)
    if (!(g >= 0.0)) r.fail("entries must be nonnegative", "g_list");
  for (double k : s.kappa_list)
    if (!(k >= 0.0)) r.fail("entries must be nonnegative", "kappa_list");
  for (std::size_t i = 0; i < s.lambda_list.size(); ++i) {
    const bool last = i + 1 == s.lambda_list.size();
    if (s.lambda_list[i] < 0.0 && !last) r.fail("may use \"k_max\" only as the last entry", "lambda_list");
    if (s.lambda_list[i] == 0.0) r.fail("entries must be positive", "lambda_list");
  }
  if (!(s.spacing > 0.0)) r.fail("must be positive", "spacing");
  if (s.n_trials < 1) r.fail("must be positive", "n_trials");
  if (s.n_eigenbasis < 2) r.fail("must be at least 2", "n_eigenbasis");
  if (s.refine_n_per_axis != 0) wrap(r, "refine_n_per_axis", [&] { (void)make_grid(s.refine_n_per_axis, 1.0); });
  if (s.n_starts < 2) r.fail("must be at least 2", "n_starts");
  if (!(s.eigen_tol > 0.0)) r.fail("must be positive", "eigen_tol");
  if (!(s.boost_c >= 0.0)) r.fail("must be nonnegative", "boost_c");
  if (!(s.boost_radius > 0.0)) r.fail("must be positive", "boost_radius");
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Reader root(text, doc, {});
  RunConfig cfg;
  cfg.model = read_model(root.child("model"));
  {
    Reader g = root.child("grid");
    cfg.n_per_axis = static_cast<int>(g.integer("n_per_axis", cfg.n_per_axis));
    cfg.box_length = g.number("box_length", cfg.box_length);
    g.finish();
    if (cfg.n_per_axis % 2 != 0) g.fail("must be even", "n_per_axis");
    if (cfg.n_per_axis < 8) g.fail("must be at least 8", "n_per_axis");
    if (!(cfg.box_length > 0.0)) g.fail("must be positive", "box_length");
  }
  cfg.minimize = read_minimize(root.child("minimize"));
  cfg.study = read_study(root.child("study"));
  cfg.output_dir = root.string("output_dir", cfg.output_dir);
  const long long seed = root.integer("seed", static_cast<long long>(cfg.seed));
  if (seed < 0) root.fail("must be nonnegative", "seed");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.minimize.seed = cfg.seed;
  cfg.threads = static_cast<int>(root.integer("threads", cfg.threads));
  if (cfg.threads < 1) root.fail("must be at least 1", "threads");
  root.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

nlohmann::json to_json(const RunConfig& c) {
  const auto num_or_inf = [](double x) -> json { return std::isinf(x) ? json("inf") : json(x); };
  json lambda = json::array();
  for (double l : c.study.lambda_list) lambda.push_back(l < 0.0 ? json("k_max") : json(l));
  const ModelSpec& m = c.model;
  return json{
      {"model",
       {{"potential",
         {{"kind", to_string(m.potential.kind)},
          {"omega0", m.potential.omega0},
          {"depth", m.potential.depth},
          {"width", m.potential.width},
          {"charge", m.potential.charge},
          {"softening", m.potential.softening}}},
        {"dispersion", {{"kind", to_string(m.dispersion.kind)}, {"mass", m.dispersion.mass}, {"slope", m.dispersion.slope}}},
        {"coupling",
         {{"kind", to_string(m.coupling.kind)},
          {"kappa", m.coupling.kappa},
          {"regularizer", to_string(m.coupling.regularizer)}}},
        {"g", m.g},
        {"uv_cutoff", num_or_inf(m.uv_cutoff)},
        {"split_radius", m.split_radius},
        {"k_zero", to_string(m.k_zero)}}},
      {"grid", {{"n_per_axis", c.n_per_axis}, {"box_length", c.box_length}}},
      {"minimize",
       {{"method", to_string(c.minimize.method)},
        {"max_iter", c.minimize.max_iter},
        {"energy_tol", c.minimize.energy_tol},
        {"residual_tol", c.minimize.residual_tol},
        {"mixing", c.minimize.mixing},
        {"start", to_string(c.minimize.start)}}},
      {"study",
       {{"g_list", c.study.g_list},
        {"lambda_list", lambda},
        {"box_lengths", c.study.box_lengths},
        {"spacing", c.study.spacing},
        {"kappa_list", c.study.kappa_list},
        {"n_trials", c.study.n_trials},
        {"n_eigenbasis", c.study.n_eigenbasis},
        {"refine_n_per_axis", c.study.refine_n_per_axis},
        {"n_starts", c.study.n_starts},
        {"eigen_tol", c.study.eigen_tol},
        {"boost_c", c.study.boost_c},
        {"boost_radius", c.study.boost_radius},
        {"fock",
         {{"n_per_axis", c.study.fock.n_per_axis},
          {"box_length", c.study.fock.box_length},
          {"n_modes", c.study.fock.n_modes},
          {"n_max", c.study.fock.n_max},
          {"g_list", c.study.fock.g_list},
          {"n_random", c.study.fock.n_random},
          {"f_max", c.study.fock.f_max},
          {"identity_n_max", c.study.fock.identity_n_max}}}}},
      {"output_dir", c.output_dir},
      {"seed", c.seed},
      {"threads", c.threads}};
}

}  // namespace kgs
