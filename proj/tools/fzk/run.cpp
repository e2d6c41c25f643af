#include "run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "fzk/diagnostics.hpp"
#include "fzk/errors.hpp"
#include "fzk/multiplier.hpp"
#include "fzk/weights.hpp"

namespace fzk::cli {

namespace {

using nlohmann::json;

Region to_region(const LocalizedSpec& l) {
  if (l.region == "half_space") return HalfSpace{l.nu, l.beta};
  if (l.region == "channel") return Channel{l.nu, l.lower, l.upper};
  return UnitBox{l.kappa, l.nu};
}

DirectionalWeight to_weight(const SmoothingSpec& m) {
  DirectionalWeight w;
  w.nu = m.nu;
  w.shift = m.shift;
  w.profile = DirectionalProfile(m.ramp_width);
  return w;
}

ConeCondition to_cone(const SmoothingSpec& m, double alpha, int n) {
  double eps = m.eps_cone;
  if (eps == 0.0) eps = midpoint_eps_cone(m.nu, alpha, n, m.C).value_or(0.0);
  return {m.nu, alpha, n, eps, m.C};
}

PropagationOptions to_options(const PropagationSpec& p) {
  PropagationOptions o;
  o.r = p.r;
  o.channel_index = p.channel_index;
  o.beta = p.beta;
  o.eps = p.eps;
  o.tau = p.tau;
  o.nu = p.nu;
  o.omega = p.omega;
  return o;
}

json conserved_json(const Conserved& c) { return {{"I", c.I}, {"M", c.M}, {"H", c.H}, {"H_alt", c.H_alt}}; }

double drift(double a, double b) { return a == 0.0 ? std::abs(b) : std::abs(b - a) / std::abs(a); }

struct Measured {
  std::vector<DiagnosticRecord> records;
  json smoothing = json::object();
  json propagation = json::object();
  json run = json::object();
  Field final_state;
  double linear_error = -1.0;
};

Measured measure(const ExperimentConfig& c, const Grid& g) {
  const double alpha = c.solver.alpha;
  const Field u0 = initial_field(c, g);
  std::vector<std::unique_ptr<SmoothingAccumulator>> smooth;
  std::vector<std::unique_ptr<SmoothingBoundAccumulator>> bounds;
  std::vector<std::unique_ptr<PropagationAccumulator>> props;
  for (const auto& m : c.smoothing) {
    smooth.push_back(std::make_unique<SmoothingAccumulator>(g, m.s, alpha, to_weight(m)));
    bounds.push_back(m.bound ? std::make_unique<SmoothingBoundAccumulator>(g, m.s, alpha, to_weight(m),
                                                                           to_cone(m, alpha, g.n), m.bound_r)
                             : nullptr);
  }
  for (const auto& p : c.propagation) props.push_back(std::make_unique<PropagationAccumulator>(to_options(p), g.n));

  Measured out;
  auto hook = [&](const Snapshot& s) {
    DiagnosticRecord rec;
    rec.t = s.t;
    rec.conserved = conserved_quantities(s.u, alpha);
    std::map<double, Field> density;
    for (const auto& l : c.localized) {
      auto it = density.find(l.r);
      if (it == density.end()) it = density.emplace(l.r, sobolev_density(s.u, l.r)).first;
      rec.localized.emplace_back(l.name, restricted_integral(it->second, to_region(l), s.t, l.omega));
    }
    for (std::size_t i = 0; i < smooth.size(); ++i) {
      smooth[i]->add(s.t, s.u);
      if (bounds[i]) bounds[i]->add(s.t, s.u);
      const auto& r = smooth[i]->result();
      const std::string& nm = c.smoothing[i].name;
      rec.localized.emplace_back(nm + ".gain_term", r.gain_term);
      rec.localized.emplace_back(nm + ".x1_term", r.x1_term);
      rec.localized.emplace_back(nm + ".homogeneous_term", r.homogeneous_term);
    }
    for (std::size_t i = 0; i < props.size(); ++i) {
      props[i]->add(s.t, s.u);
      const auto& r = props[i]->result();
      rec.localized.emplace_back(c.propagation[i].name + ".half_space", r.half_space.back());
      rec.localized.emplace_back(c.propagation[i].name + ".channel_integral", r.channel_integral);
    }
    out.records.push_back(std::move(rec));
  };
  const auto traj = solve(u0, c.solver.config(), {hook});

  for (std::size_t i = 0; i < smooth.size(); ++i) {
    const auto& r = smooth[i]->result();
    json j = {{"s", c.smoothing[i].s},
              {"gain_term", r.gain_term},
              {"x1_term", r.x1_term},
              {"homogeneous_term", r.homogeneous_term}};
    if (bounds[i]) {
      const auto b = bounds[i]->report();
      j["bound"] = {{"lambda", b.lambda},         {"r", b.r},           {"left_integral", b.left_integral},
                    {"grad_l1_linf", b.grad_l1_linf}, {"sup_hr", b.sup_hr}, {"sup_hs", b.sup_hs},
                    {"right", b.right},           {"ratio", b.ratio}};
    }
    out.smoothing[c.smoothing[i].name] = j;
  }
  for (std::size_t i = 0; i < props.size(); ++i) {
    const auto& r = props[i]->result();
    const auto o = to_options(c.propagation[i]);
    out.propagation[c.propagation[i].name] = {{"r", o.r},
                                              {"channel_index", o.channel_r()},
                                              {"sup_half_space", r.sup_half_space},
                                              {"channel_integral", r.channel_integral}};
  }
  const auto& c0 = traj.conserved.front();
  const auto& c1 = traj.conserved.back();
  out.run = {{"points", std::vector<int>(g.points.begin(), g.points.begin() + g.n)},
             {"steps", traj.steps},
             {"guard", traj.guard},
             {"warnings", traj.warnings},
             {"measured_sobolev_index", measured_sobolev_index(u0)},
             {"conserved", {{"initial", conserved_json(c0)},
                            {"final", conserved_json(c1)},
                            {"relative_drift",
                             {{"I", drift(c0.I, c1.I)},
                              {"M", drift(c0.M, c1.M)},
                              {"H", drift(c0.H, c1.H)},
                              {"H_alt", drift(c0.H_alt, c1.H_alt)}}}}}};
  if (c.linear_check) {
    const Field start = c.solver.dealias_initial ? dealias(u0) : u0;
    const Field exact = apply_multiplier(linear_propagator(alpha, c.solver.T), start);
    const double nrm = l2_norm(exact);
    out.linear_error = nrm > 0.0 ? l2_norm(traj.final_state - exact) / nrm : l2_norm(traj.final_state);
  }
  out.final_state = traj.final_state;
  return out;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  f << text;
  if (!f) throw ConfigError("write failed for '" + p.string() + "'");
}

std::string csv_text(const std::vector<DiagnosticRecord>& recs, const RunMeta& meta) {
  std::ostringstream os;
  write_records_csv(os, recs, meta);
  return os.str();
}

} // namespace

json error_record(const std::string& kind, const std::vector<std::string>& messages) {
  return {{"status", "error"}, {"kind", kind}, {"version", FZK_VERSION}, {"violations", messages}};
}

json run_experiment(const ExperimentConfig& c, std::ostream& log) {
  if (auto v = validate(c); !v.empty()) throw ConfigViolations(v);
  namespace fs = std::filesystem;
  const fs::path dir(c.output_directory);
  fs::create_directories(dir);
  const std::string hash = config_hash(c);
  const Grid g = c.grid.grid();

  log << "fzk " << FZK_VERSION << " run '" << c.name << "' config_hash=" << hash << "\n";
  Measured base = measure(c, g);
  write_file(dir / "records.csv", csv_text(base.records, {g, c.solver.alpha, hash, FZK_VERSION}));

  json summary = {{"format", "fzk-summary"},
                  {"schema_version", 1},
                  {"version", FZK_VERSION},
                  {"config_hash", hash},
                  {"name", c.name},
                  {"seed", c.seed},
                  {"alpha", c.solver.alpha},
                  {"T", c.solver.T},
                  {"dt", c.solver.dt},
                  {"run", base.run},
                  {"smoothing", base.smoothing},
                  {"propagation", base.propagation}};
  if (c.linear_check) {
    summary["linear_error"] = base.linear_error;
    log << "linear error: " << format_double(base.linear_error) << "\n";
  }
  if (c.checkpoint) write_checkpoint((dir / "final.ckpt").string(), base.final_state, {g, c.solver.T, c.solver.alpha, hash});

  json refinement = json::array();
  for (int p : c.refinement) {
    GridSpec gs = c.grid;
    for (auto& q : gs.points) q = p;
    const Grid gp = gs.grid();
    log << "refinement companion at " << p << " points per axis\n";
    Measured m = measure(c, gp);
    write_file(dir / ("records_N" + std::to_string(p) + ".csv"), csv_text(m.records, {gp, c.solver.alpha, hash, FZK_VERSION}));
    json ratios = json::object();
    for (const auto& [name, v] : base.smoothing.items())
      for (const char* key : {"gain_term", "x1_term", "homogeneous_term"}) {
        const double a = v[key], b = m.smoothing[name][key];
        ratios[name + "." + key] = a == 0.0 ? (b == 0.0 ? 1.0 : INFINITY) : b / a;
      }
    for (const auto& [name, v] : base.propagation.items())
      for (const char* key : {"sup_half_space", "channel_integral"}) {
        const double a = v[key], b = m.propagation[name][key];
        ratios[name + "." + key] = a == 0.0 ? (b == 0.0 ? 1.0 : INFINITY) : b / a;
      }
    refinement.push_back({{"points", p}, {"run", m.run}, {"smoothing", m.smoothing},
                          {"propagation", m.propagation}, {"ratios", ratios}});
  }
  summary["refinement"] = refinement;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  for (const auto& w : base.run["warnings"]) log << "warning: " << w.get<std::string>() << "\n";
  log << "wrote " << (dir / "records.csv").string() << " and " << (dir / "summary.json").string() << "\n";
  return summary;
}

} // namespace fzk::cli
