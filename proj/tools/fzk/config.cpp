#include "config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "fzk/diagnostics.hpp"
#include "fzk/errors.hpp"
#include "fzk/fft.hpp"
#include "fzk/weights.hpp"

namespace fzk::cli {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : "; ") + x;
  return s;
}

// Reads keys from one table, recording type errors and unknown keys.
class Reader {
public:
  Reader(const toml::table& t, std::string where, std::vector<std::string>& errs)
      : t_(t), where_(std::move(where)), errs_(errs) {}

  ~Reader() {
    for (const auto& [k, v] : t_)
      if (!used_.count(std::string(k.str()))) errs_.push_back(where_ + ": unknown key '" + std::string(k.str()) + "'");
  }

  const toml::node* node(const std::string& key) {
    used_.insert(key);
    return t_.get(key);
  }

  void number(const std::string& key, double& out) {
    if (auto* n = node(key)) {
      if (auto v = n->value<double>(); v && (n->is_integer() || n->is_floating_point())) out = *v;
      else bad(key, "a number");
    }
  }
  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (auto* n = node(key)) {
      if (n->is_integer()) out = static_cast<Int>(*n->value<std::int64_t>());
      else bad(key, "an integer");
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (auto* n = node(key)) {
      if (n->is_boolean()) out = *n->value<bool>();
      else bad(key, "a boolean");
    }
  }
  void string(const std::string& key, std::string& out) {
    if (auto* n = node(key)) {
      if (n->is_string()) out = *n->value<std::string>();
      else bad(key, "a string");
    }
  }
  void numbers(const std::string& key, std::vector<double>& out) {
    if (auto* n = node(key)) {
      const auto* a = n->as_array();
      std::vector<double> v;
      bool ok = a != nullptr;
      if (a)
        for (const auto& e : *a) {
          if (!(e.is_integer() || e.is_floating_point())) ok = false;
          else v.push_back(*e.value<double>());
        }
      if (ok) out = v;
      else bad(key, "an array of numbers");
    }
  }
  void integers(const std::string& key, std::vector<int>& out) {
    if (auto* n = node(key)) {
      const auto* a = n->as_array();
      std::vector<int> v;
      bool ok = a != nullptr;
      if (a)
        for (const auto& e : *a) {
          if (!e.is_integer()) ok = false;
          else v.push_back(static_cast<int>(*e.value<std::int64_t>()));
        }
      if (ok) out = v;
      else bad(key, "an array of integers");
    }
  }
  const toml::table* table(const std::string& key) {
    auto* n = node(key);
    if (n && !n->is_table()) bad(key, "a table");
    return n ? n->as_table() : nullptr;
  }
  std::vector<const toml::table*> tables(const std::string& key) {
    std::vector<const toml::table*> out;
    auto* n = node(key);
    if (!n) return out;
    if (!n->is_array_of_tables()) {
      bad(key, "an array of tables");
      return out;
    }
    for (const auto& e : *n->as_array()) out.push_back(e.as_table());
    return out;
  }

private:
  void bad(const std::string& key, const char* what) { errs_.push_back(where_ + "." + key + " must be " + what); }

  const toml::table& t_;
  std::string where_;
  std::vector<std::string>& errs_;
  std::set<std::string> used_;
};

std::string quote(const std::string& s) {
  std::string o = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') {
      o += '\\';
      o += ch;
    } else if (static_cast<unsigned char>(ch) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", ch);
      o += buf;
    } else {
      o += ch;
    }
  }
  return o + "\"";
}

// TOML needs a '.' or exponent to read a value back as a float.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::string s = format_double(v);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

template <class T, class F>
std::string list(const std::vector<T>& v, F&& f) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + f(v[i]);
  return s + "]";
}

std::string nums(const std::vector<double>& v) { return list(v, num); }
std::string ints(const std::vector<int>& v) {
  return list(v, [](int x) { return std::to_string(x); });
}
const char* flag(bool b) { return b ? "true" : "false"; }

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) return false;
  return true;
}

bool power_of_two_at_least_8(int p) { return p >= 8 && (p & (p - 1)) == 0; }

Point to_point(const std::vector<double>& v) {
  Point p{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < v.size() && i < 3; ++i) p[i] = v[i];
  return p;
}

Field noise(const Grid& g, int kmax, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Field f(g);
  for (auto& v : f.values) v = nd(rng);
  auto F = forward(f);
  for (std::size_t i = 0; i < F.size(); ++i) {
    auto ix = g.unflatten(i);
    for (int a = 0; a < g.n; ++a)
      if (std::abs(g.wavenumber(a, ix[a])) > kmax || ix[a] == g.points[a] / 2) F.coeffs[i] = 0.0;
  }
  Field u = inverse(F);
  const double nrm = l2_norm(u);
  return nrm > 0.0 ? (amplitude / nrm) * u : u;
}

} // namespace

Grid GridSpec::grid() const {
  Grid g;
  g.n = n;
  for (int a = 0; a < n && a < 3; ++a) {
    g.points[a] = points.at(a);
    g.length[a] = length.at(a);
    g.origin[a] = -0.5 * length.at(a);
  }
  return g;
}

SolverConfig SolverSpec::config() const {
  SolverConfig c;
  c.alpha = alpha;
  c.dt = dt;
  c.T = T;
  c.record_every = record_every;
  c.nonlinear = nonlinear;
  c.dealias_initial = dealias_initial;
  c.keep_snapshots = false;
  return c;
}

ConfigViolations::ConfigViolations(std::vector<std::string> v)
    : std::runtime_error("invalid configuration: " + join(v)), v_(std::move(v)) {}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> e;
  const int n = c.grid.n;
  if (!valid_name(c.name)) e.push_back("name must be a non-empty [A-Za-z0-9_.-] string");
  bool grid_ok = true;
  if (n != 2 && n != 3) {
    e.push_back("grid.n must be 2 or 3");
    grid_ok = false;
  }
  if (static_cast<int>(c.grid.points.size()) != n || static_cast<int>(c.grid.length.size()) != n) {
    e.push_back("grid.points and grid.length need n entries");
    grid_ok = false;
  } else {
    for (int p : c.grid.points)
      if (!power_of_two_at_least_8(p)) {
        e.push_back("grid.points entries must be powers of two >= 8");
        grid_ok = false;
        break;
      }
    for (double L : c.grid.length)
      if (!(L > 0.0) || !std::isfinite(L)) {
        e.push_back("grid.length entries must be positive");
        grid_ok = false;
        break;
      }
  }

  const auto& s = c.solver;
  bool solver_ok = true;
  auto solver_bad = [&](const std::string& m) {
    e.push_back(m);
    solver_ok = false;
  };
  if (!(s.alpha > 0.0 && s.alpha <= 2.0)) solver_bad("solver.alpha must lie in (0, 2]");
  if (!(s.dt > 0.0)) solver_bad("solver.dt must be positive");
  if (!(s.T >= s.dt)) solver_bad("solver.T must be at least dt");
  if (s.record_every < 1) solver_bad("solver.record_every must be >= 1");
  if (solver_ok && grid_ok) {
    try {
      s.config().validate(c.grid.grid());
    } catch (const std::exception& ex) {
      e.push_back(std::string("solver: ") + ex.what());
    }
  }

  if (c.initial.empty()) e.push_back("at least one [[initial]] term is required");
  for (std::size_t i = 0; i < c.initial.size(); ++i) {
    const auto& t = c.initial[i];
    const std::string at = "initial[" + std::to_string(i) + "]";
    if (!std::isfinite(t.amplitude)) e.push_back(at + ".amplitude must be finite");
    if (t.kind == "gaussian") {
      if (!(t.width > 0.0)) e.push_back(at + ".width must be positive");
      if (!t.centre.empty() && static_cast<int>(t.centre.size()) != n) e.push_back(at + ".centre needs n entries");
    } else if (t.kind == "filtered_step") {
      if (static_cast<int>(t.nu.size()) != n) e.push_back(at + ".nu needs n entries");
      if (!(t.upper > t.lower)) e.push_back(at + ".upper must exceed lower");
      if (!(t.sigma >= 0.0)) e.push_back(at + ".sigma must be >= 0");
      if (!(t.transverse_width > 0.0)) e.push_back(at + ".transverse_width must be positive");
    } else if (t.kind == "zk_soliton") {
      if (!(t.speed > 0.0)) e.push_back(at + ".speed must be positive");
      if (!t.centre.empty() && static_cast<int>(t.centre.size()) != n) e.push_back(at + ".centre needs n entries");
    } else if (t.kind == "noise") {
      if (t.kmax < 1) e.push_back(at + ".kmax must be >= 1");
    } else {
      e.push_back(at + ".kind '" + t.kind + "' is not one of gaussian, filtered_step, zk_soliton, noise");
    }
  }

  std::set<std::string> names;
  auto check_name = [&](const std::string& nm, const std::string& at) {
    if (!valid_name(nm)) e.push_back(at + ".name must be a non-empty [A-Za-z0-9_.-] string");
    else if (!names.insert(nm).second) e.push_back(at + ".name '" + nm + "' is used twice");
  };
  auto check_nu = [&](const std::vector<double>& nu, const std::string& at) {
    if (static_cast<int>(nu.size()) != n) {
      e.push_back(at + ".nu needs n entries");
      return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < c.localized.size(); ++i) {
    const auto& l = c.localized[i];
    const std::string at = "localized[" + std::to_string(i) + "]";
    check_name(l.name, at);
    if (!(l.r >= 0.0)) e.push_back(at + ".r must be >= 0");
    if (l.region == "half_space") {
      check_nu(l.nu, at);
    } else if (l.region == "channel") {
      check_nu(l.nu, at);
      if (!(l.upper > l.lower)) e.push_back(at + ".upper must exceed lower");
    } else if (l.region == "unit_box") {
      if (static_cast<int>(l.kappa.size()) != n) e.push_back(at + ".kappa needs n entries");
      if (!l.nu.empty()) check_nu(l.nu, at);
    } else {
      e.push_back(at + ".region '" + l.region + "' is not one of half_space, channel, unit_box");
    }
  }
  for (std::size_t i = 0; i < c.smoothing.size(); ++i) {
    const auto& m = c.smoothing[i];
    const std::string at = "smoothing[" + std::to_string(i) + "]";
    check_name(m.name, at);
    if (!(m.ramp_width > 0.0)) e.push_back(at + ".ramp_width must be positive");
    if (!(m.C > 0.0)) e.push_back(at + ".C must be positive");
    if (m.eps_cone < 0.0) e.push_back(at + ".eps_cone must be >= 0 (0 selects the midpoint)");
    if (m.bound && m.bound_r >= 0.0 && !(m.bound_r > n / 2.0)) e.push_back(at + ".bound_r must exceed n/2");
    if (check_nu(m.nu, at)) {
      double eps = m.eps_cone;
      if (eps == 0.0) eps = midpoint_eps_cone(m.nu, s.alpha, n, m.C).value_or(0.0);
      const auto cone = check_cone({m.nu, s.alpha, n, eps > 0.0 ? eps : 0.5, m.C});
      if (cone.case_id == 0 || !(eps > 0.0)) e.push_back(at + ".nu fails the cone condition: " + cone.reason);
    }
  }
  for (std::size_t i = 0; i < c.propagation.size(); ++i) {
    const auto& p = c.propagation[i];
    const std::string at = "propagation[" + std::to_string(i) + "]";
    check_name(p.name, at);
    if (!(p.r >= 0.0)) e.push_back(at + ".r must be >= 0");
    if (!(p.eps > 0.0)) e.push_back(at + ".eps must be positive");
    if (!(p.tau >= 5.0 * p.eps)) e.push_back(at + ".tau must be >= 5 eps");
    check_nu(p.nu, at);
  }
  if (c.output_directory.empty()) e.push_back("output.directory must be non-empty");
  if (c.linear_check && s.nonlinear) e.push_back("checks.linear needs solver.nonlinear = false");
  for (int p : c.refinement)
    if (!power_of_two_at_least_8(p)) {
      e.push_back("refinement.points entries must be powers of two >= 8");
      break;
    }
  if (grid_ok && solver_ok)
    for (int p : c.refinement) {
      GridSpec gs = c.grid;
      for (auto& q : gs.points) q = p;
      if (!power_of_two_at_least_8(p)) continue;
      try {
        s.config().validate(gs.grid());
      } catch (const std::exception& ex) {
        e.push_back("refinement " + std::to_string(p) + ": " + ex.what());
      }
    }
  return e;
}

ExperimentConfig parse_config(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& err) {
    std::ostringstream os;
    os << "syntax error at line " << err.source().begin.line << ": " << err.description();
    throw ConfigViolations({os.str()});
  }
  std::vector<std::string> errs;
  ExperimentConfig c;
  {
    Reader r(root, "config", errs);
    r.string("name", c.name);
    std::int64_t seed = static_cast<std::int64_t>(c.seed);
    r.integer("seed", seed);
    if (seed < 0) errs.push_back("config.seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);

    if (auto* g = r.table("grid")) {
      Reader gr(*g, "grid", errs);
      gr.integer("n", c.grid.n);
      c.grid.points.assign(std::max(c.grid.n, 0), 128);
      c.grid.length.assign(std::max(c.grid.n, 0), 20.0);
      if (auto* p = gr.node("points"); p && p->is_integer()) {
        c.grid.points.assign(std::max(c.grid.n, 0), static_cast<int>(*p->value<std::int64_t>()));
      } else {
        gr.integers("points", c.grid.points);
      }
      if (auto* l = gr.node("length"); l && (l->is_integer() || l->is_floating_point())) {
        c.grid.length.assign(std::max(c.grid.n, 0), *l->value<double>());
      } else {
        gr.numbers("length", c.grid.length);
      }
    }
    if (auto* s = r.table("solver")) {
      Reader sr(*s, "solver", errs);
      sr.number("alpha", c.solver.alpha);
      sr.number("dt", c.solver.dt);
      sr.number("T", c.solver.T);
      sr.integer("record_every", c.solver.record_every);
      sr.boolean("nonlinear", c.solver.nonlinear);
      sr.boolean("dealias_initial", c.solver.dealias_initial);
    }
    for (const auto* t : r.tables("initial")) {
      InitialTerm term;
      Reader ir(*t, "initial[" + std::to_string(c.initial.size()) + "]", errs);
      ir.string("kind", term.kind);
      ir.number("amplitude", term.amplitude);
      if (term.kind == "gaussian") {
        ir.number("width", term.width);
        ir.numbers("centre", term.centre);
      } else if (term.kind == "filtered_step") {
        ir.numbers("nu", term.nu);
        ir.number("lower", term.lower);
        ir.number("upper", term.upper);
        ir.number("sigma", term.sigma);
        ir.number("transverse_width", term.transverse_width);
      } else if (term.kind == "zk_soliton") {
        ir.number("speed", term.speed);
        ir.numbers("centre", term.centre);
      } else if (term.kind == "noise") {
        ir.integer("kmax", term.kmax);
      }
      c.initial.push_back(term);
    }
    for (const auto* t : r.tables("localized")) {
      LocalizedSpec l;
      Reader lr(*t, "localized[" + std::to_string(c.localized.size()) + "]", errs);
      lr.string("name", l.name);
      lr.string("region", l.region);
      lr.number("r", l.r);
      lr.number("omega", l.omega);
      lr.numbers("nu", l.nu);
      if (l.region == "half_space") lr.number("beta", l.beta);
      if (l.region == "channel") {
        lr.number("lower", l.lower);
        lr.number("upper", l.upper);
      }
      if (l.region == "unit_box") lr.integers("kappa", l.kappa);
      c.localized.push_back(l);
    }
    for (const auto* t : r.tables("smoothing")) {
      SmoothingSpec m;
      Reader mr(*t, "smoothing[" + std::to_string(c.smoothing.size()) + "]", errs);
      mr.string("name", m.name);
      mr.number("s", m.s);
      mr.numbers("nu", m.nu);
      mr.number("shift", m.shift);
      mr.number("ramp_width", m.ramp_width);
      mr.boolean("bound", m.bound);
      mr.number("eps_cone", m.eps_cone);
      mr.number("C", m.C);
      mr.number("bound_r", m.bound_r);
      c.smoothing.push_back(m);
    }
    for (const auto* t : r.tables("propagation")) {
      PropagationSpec p;
      Reader pr(*t, "propagation[" + std::to_string(c.propagation.size()) + "]", errs);
      pr.string("name", p.name);
      pr.number("r", p.r);
      pr.number("channel_index", p.channel_index);
      pr.number("beta", p.beta);
      pr.number("eps", p.eps);
      pr.number("tau", p.tau);
      pr.numbers("nu", p.nu);
      pr.number("omega", p.omega);
      c.propagation.push_back(p);
    }
    if (auto* o = r.table("output")) {
      Reader orr(*o, "output", errs);
      orr.string("directory", c.output_directory);
      orr.boolean("checkpoint", c.checkpoint);
    }
    if (auto* k = r.table("checks")) {
      Reader kr(*k, "checks", errs);
      kr.boolean("linear", c.linear_check);
    }
    if (auto* f = r.table("refinement")) {
      Reader fr(*f, "refinement", errs);
      fr.integers("points", c.refinement);
    }
  }
  if (errs.empty()) errs = validate(c);
  else for (auto& v : validate(c)) errs.push_back(v);
  if (!errs.empty()) throw ConfigViolations(errs);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigViolations({"cannot read config file '" + path + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_toml(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "name = " << quote(c.name) << "\n";
  o << "seed = " << c.seed << "\n\n";
  o << "[grid]\nn = " << c.grid.n << "\npoints = " << ints(c.grid.points) << "\nlength = " << nums(c.grid.length)
    << "\n\n";
  const auto& s = c.solver;
  o << "[solver]\nalpha = " << num(s.alpha) << "\ndt = " << num(s.dt) << "\nT = " << num(s.T)
    << "\nrecord_every = " << s.record_every << "\nnonlinear = " << flag(s.nonlinear)
    << "\ndealias_initial = " << flag(s.dealias_initial) << "\n";
  for (const auto& t : c.initial) {
    o << "\n[[initial]]\nkind = " << quote(t.kind) << "\namplitude = " << num(t.amplitude) << "\n";
    if (t.kind == "gaussian") {
      o << "width = " << num(t.width) << "\n";
      if (!t.centre.empty()) o << "centre = " << nums(t.centre) << "\n";
    } else if (t.kind == "filtered_step") {
      o << "nu = " << nums(t.nu) << "\nlower = " << num(t.lower) << "\nupper = " << num(t.upper)
        << "\nsigma = " << num(t.sigma) << "\ntransverse_width = " << num(t.transverse_width) << "\n";
    } else if (t.kind == "zk_soliton") {
      o << "speed = " << num(t.speed) << "\n";
      if (!t.centre.empty()) o << "centre = " << nums(t.centre) << "\n";
    } else if (t.kind == "noise") {
      o << "kmax = " << t.kmax << "\n";
    }
  }
  for (const auto& l : c.localized) {
    o << "\n[[localized]]\nname = " << quote(l.name) << "\nregion = " << quote(l.region) << "\nr = " << num(l.r)
      << "\nomega = " << num(l.omega) << "\n";
    if (!l.nu.empty()) o << "nu = " << nums(l.nu) << "\n";
    if (l.region == "half_space") o << "beta = " << num(l.beta) << "\n";
    if (l.region == "channel") o << "lower = " << num(l.lower) << "\nupper = " << num(l.upper) << "\n";
    if (l.region == "unit_box") o << "kappa = " << ints(l.kappa) << "\n";
  }
  for (const auto& m : c.smoothing) {
    o << "\n[[smoothing]]\nname = " << quote(m.name) << "\ns = " << num(m.s) << "\nnu = " << nums(m.nu)
      << "\nshift = " << num(m.shift) << "\nramp_width = " << num(m.ramp_width) << "\nbound = " << flag(m.bound)
      << "\neps_cone = " << num(m.eps_cone) << "\nC = " << num(m.C) << "\nbound_r = " << num(m.bound_r) << "\n";
  }
  for (const auto& p : c.propagation) {
    o << "\n[[propagation]]\nname = " << quote(p.name) << "\nr = " << num(p.r)
      << "\nchannel_index = " << num(p.channel_index) << "\nbeta = " << num(p.beta) << "\neps = " << num(p.eps)
      << "\ntau = " << num(p.tau) << "\nnu = " << nums(p.nu) << "\nomega = " << num(p.omega) << "\n";
  }
  o << "\n[output]\ndirectory = " << quote(c.output_directory) << "\ncheckpoint = " << flag(c.checkpoint) << "\n";
  o << "\n[checks]\nlinear = " << flag(c.linear_check) << "\n";
  o << "\n[refinement]\npoints = " << ints(c.refinement) << "\n";
  return o.str();
}

std::string config_hash(const ExperimentConfig& c) {
  ExperimentConfig k = c;
  k.output_directory.clear();
  const std::string text = to_toml(k);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Field initial_field(const ExperimentConfig& c, const Grid& g) {
  Field u(g);
  for (std::size_t i = 0; i < c.initial.size(); ++i) {
    const auto& t = c.initial[i];
    Field term;
    if (t.kind == "gaussian") term = gaussian(g, t.amplitude, t.width, to_point(t.centre));
    else if (t.kind == "filtered_step")
      term = filtered_step(g, t.nu, t.lower, t.upper, t.sigma, t.transverse_width, t.amplitude);
    else if (t.kind == "zk_soliton") term = t.amplitude * zk_soliton(g, t.speed, to_point(t.centre));
    else if (t.kind == "noise") term = noise(g, t.kmax, t.amplitude, c.seed + i);
    else throw ConfigError("unknown initial data kind '" + t.kind + "'");
    u = u + term;
  }
  return u;
}

} // namespace fzk::cli
