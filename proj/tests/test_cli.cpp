#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"
#include "fzk/diagnostics.hpp"
#include "fzk/weights.hpp"
#include "run.hpp"

using namespace fzk;
using namespace fzk::cli;
namespace fs = std::filesystem;

namespace {

const char* kConfigs[] = {"linear_exactness", "smoothing_2d", "propagation_2d", "zk_soliton"};

std::string config_path(const std::string& name) { return std::string(FZK_SOURCE_DIR) + "/configs/" + name + ".toml"; }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigViolations& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

const char* kSmall = R"(
name = "small"
seed = 3
[grid]
n = 2
points = 32
length = 16.0
[solver]
alpha = 1.5
dt = 0.01
T = 0.1
record_every = 2
[[initial]]
kind = "gaussian"
width = 1.0
[[initial]]
kind = "noise"
amplitude = 0.05
kmax = 6
[[smoothing]]
name = "sm"
s = 1.0
nu = [1.0, 0.05]
[[propagation]]
name = "pr"
r = 1.0
nu = [1.0, 0.05]
[[localized]]
name = "h"
region = "half_space"
nu = [1.0, 0.0]
r = 0.5
[refinement]
points = [64]
)";

} // namespace

TEST_CASE("shipped configs parse and round-trip") {
  for (const char* name : kConfigs) {
    INFO(name);
    const auto c = load_config(config_path(name));
    const std::string text = to_toml(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(to_toml(back) == text);
    CHECK(config_hash(back) == config_hash(c));
  }
  CHECK(load_config(config_path("linear_exactness")).linear_check);
}

TEST_CASE("property: random configs round-trip through the canonical text") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  for (int trial = 0; trial < 200; ++trial) {
    ExperimentConfig c;
    c.name = "cfg_" + std::to_string(trial);
    c.seed = rng() >> 2;
    c.grid.n = trial % 5 == 0 ? 3 : 2;
    c.grid.points.assign(c.grid.n, 8 << (trial % 3));
    c.grid.length.assign(c.grid.n, pick(5.0, 40.0));
    c.solver.alpha = pick(0.1, 2.0);
    c.solver.dt = pick(1e-4, 1e-3);
    c.solver.T = c.solver.dt * (1 + trial % 7);
    c.solver.record_every = 1 + trial % 4;
    c.solver.nonlinear = trial % 2 == 0;
    InitialTerm g;
    g.amplitude = pick(-2.0, 2.0);
    g.width = pick(0.3, 3.0);
    g.centre.assign(c.grid.n, pick(-1.0, 1.0));
    c.initial.push_back(g);
    if (trial % 3 == 0) {
      InitialTerm f;
      f.kind = "filtered_step";
      f.nu.assign(c.grid.n, 0.0);
      f.nu[0] = 1.0;
      f.lower = pick(-3.0, -1.0);
      f.upper = pick(0.0, 2.0);
      f.sigma = pick(0.0, 3.0);
      f.transverse_width = pick(0.5, 2.0);
      c.initial.push_back(f);
    }
    LocalizedSpec l;
    l.name = "box";
    l.region = "unit_box";
    l.kappa.assign(c.grid.n, trial % 4 - 2);
    l.r = pick(0.0, 3.0);
    c.localized.push_back(l);
    PropagationSpec p;
    p.name = "prop";
    p.nu.assign(c.grid.n, 0.0);
    p.nu[0] = 1.0;
    p.eps = pick(0.1, 1.0);
    p.tau = 5 * p.eps + pick(0.0, 2.0);
    p.omega = pick(0.0, 2.0);
    p.r = pick(0.0, 3.0);
    c.propagation.push_back(p);
    c.output_directory = "out dir/\"quoted\"";
    c.refinement = {16};
    REQUIRE(validate(c).empty());
    const auto back = parse_config(to_toml(c));
    CHECK(back == c);
  }
}

TEST_CASE("config validation lists every violation") {
  const std::string bad = R"(
name = "bad"
speed = 3
[grid]
n = 2
points = 48
length = 10.0
[solver]
alpha = 2.5
dt = 0.01
T = 0.1
[[initial]]
kind = "wave"
[[smoothing]]
name = "sm"
nu = [1.0, 40.0]
[[propagation]]
name = "sm"
eps = 1.0
tau = 2.0
[checks]
linear = true
)";
  const auto v = violations_of(bad);
  MESSAGE(v.size() << " violations");
  CHECK(mentions(v, "unknown key 'speed'"));
  CHECK(mentions(v, "powers of two"));
  CHECK(mentions(v, "solver.alpha"));
  CHECK(mentions(v, "kind 'wave'"));
  CHECK(mentions(v, "cone condition"));
  CHECK(mentions(v, "used twice"));
  CHECK(mentions(v, "tau must be >= 5 eps"));
  CHECK(mentions(v, "checks.linear"));
  CHECK(v.size() >= 8);

  CHECK(mentions(violations_of("name = \"x\"\n[grid\n"), "syntax error"));
  CHECK(mentions(violations_of("[solver]\ndt = \"small\"\n[[initial]]\nkind = \"gaussian\"\n"), "solver.dt must be a number"));
  CHECK(mentions(violations_of("[[initial]]\nkind = \"gaussian\"\nsigma = 1.0\n"), "unknown key 'sigma'"));
  // The stability guard needs the grid and solver together.
  CHECK(mentions(violations_of("[grid]\npoints = 256\n[solver]\ndt = 0.5\nT = 1.0\n[[initial]]\nkind = \"gaussian\"\n"),
                 "solver:"));
}

TEST_CASE("config hash ignores the output directory only") {
  auto c = parse_config(kSmall);
  const auto h = config_hash(c);
  CHECK(h.size() == 16);
  c.output_directory = "elsewhere";
  CHECK(config_hash(c) == h);
  c.seed = 4;
  CHECK(config_hash(c) != h);
  c.seed = 3;
  c.solver.alpha = 1.25;
  CHECK(config_hash(c) != h);
}

TEST_CASE("run writes identical outputs for identical configs") {
  const fs::path base = fs::temp_directory_path() / "fzk_cli_determinism";
  fs::remove_all(base);
  auto c = parse_config(kSmall);
  std::ostringstream log;
  c.output_directory = (base / "a").string();
  const auto s1 = run_experiment(c, log);
  c.output_directory = (base / "b").string();
  run_experiment(c, log);
  for (const char* f : {"records.csv", "summary.json", "final.ckpt", "records_N64.csv"}) {
    INFO(f);
    REQUIRE(fs::exists(base / "a" / f));
    CHECK(slurp(base / "a" / f) == slurp(base / "b" / f));
  }
  const std::string csv = slurp(base / "a" / "records.csv");
  CHECK(csv.rfind("# fzk " FZK_VERSION " config_hash=" + config_hash(c), 0) == 0);
  CHECK(csv.find("t,I,M,H,h,sm.gain_term,sm.x1_term,sm.homogeneous_term,pr.half_space,pr.channel_integral\n") !=
        std::string::npos);
  CHECK(s1["config_hash"] == config_hash(c));
  CHECK(s1["version"] == FZK_VERSION);
  CHECK(s1["schema_version"] == 1);
  CHECK(s1["smoothing"]["sm"]["bound"]["lambda"].get<double>() > 0.0);
  CHECK(s1["refinement"][0]["points"] == 64);
  CHECK(s1["refinement"][0]["ratios"].contains("sm.gain_term"));

  // A different seed changes the noise term and therefore the records.
  c.seed = 4;
  c.output_directory = (base / "c").string();
  run_experiment(c, log);
  CHECK(slurp(base / "a" / "records.csv") != slurp(base / "c" / "records.csv"));
  fs::remove_all(base);
}

TEST_CASE("linear exactness config") {
  auto c = load_config(config_path("linear_exactness"));
  c.output_directory = (fs::temp_directory_path() / "fzk_cli_linear").string();
  c.checkpoint = false;
  std::ostringstream log;
  const auto s = run_experiment(c, log);
  CHECK(s["linear_error"].get<double>() < 1e-10);
  CHECK(log.str().find("linear error: ") != std::string::npos);
  fs::remove_all(c.output_directory);
}

TEST_CASE("check-cone command") {
  std::ostringstream a, b, bad;
  CHECK(check_cone_command({1.0, 0.05}, 1.0, std::nullopt, std::nullopt, 1.0, a) == 0);
  CHECK(a.str().find("case 2\n") == 0);
  const double eps = *midpoint_eps_cone({1.0, 0.05}, 1.0, 2);
  const double lam = smoothing_lambda({{1.0, 0.05}, 1.0, 2, eps, 1.0});
  CHECK(a.str().find("lambda " + format_double(lam) + "\n") != std::string::npos);
  CHECK(check_cone_command({1.0, 0.0}, 1.0, std::nullopt, std::nullopt, 1.0, b) == 0);
  CHECK(b.str().find("case 1\n") == 0);
  CHECK(b.str().find("lambda 0.5\n") != std::string::npos);
  CHECK(check_cone_command({1.0, 9.0}, 1.0, std::nullopt, std::nullopt, 1.0, bad) == 1);
  CHECK(bad.str().find("case 0\n") == 0);
}

TEST_CASE("table commands") {
  std::ostringstream bt;
  bessel_table_command(1.5, 2, {0.01, 0.1, 1.0, 20.0}, bt);
  std::istringstream in(bt.str());
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "r,kernel,regime,asymptotic,ratio");
  CHECK(rows[1].find(",near_zero,") != std::string::npos);
  CHECK(rows[3].find(",none,,") != std::string::npos);
  CHECK(rows[4].find(",infinity,") != std::string::npos);
  const double ratio = std::stod(rows[4].substr(rows[4].rfind(',') + 1));
  CHECK(std::abs(ratio - 1.0) < 0.1);

  std::ostringstream ps;
  psi_series_table_command(1.0, 50, ps);
  const std::string t = ps.str();
  CHECK(t.rfind("rho,J,exact,series,abs_error,last_term\n", 0) == 0);
  CHECK(std::count(t.begin(), t.end(), '\n') == 1 + 6 * 7);  // J = 1, 2, 4, ..., 32, 50
  CHECK_THROWS(psi_series_table_command(1.0, 0, ps));

  std::ostringstream op;
  order_probe_command("commutator", 1.0, 64, {2, 4, 8}, 2, 1, op);
  CHECK(op.str().find("# slope ") != std::string::npos);
  CHECK_THROWS(order_probe_command("bogus", 1.0, 64, {2, 4, 8}, 2, 1, op));
}

TEST_CASE("convert-checkpoint writes coordinates and values") {
  const fs::path dir = fs::temp_directory_path() / "fzk_cli_convert";
  fs::create_directories(dir);
  const Grid g = Grid::cube(2, 8, 4.0);
  const Field u = gaussian(g, 1.0, 1.0, {0, 0, 0});
  write_checkpoint((dir / "u.ckpt").string(), u, {g, 0.5, 1.5, "feed"});
  std::ostringstream log;
  CHECK(convert_checkpoint_command((dir / "u.ckpt").string(), (dir / "u.csv").string(), log) == 0);
  const std::string csv = slurp(dir / "u.csv");
  CHECK(csv.find("config_hash=feed t=0.5 alpha=1.5\nx1,x2,u\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 64);
  CHECK(convert_checkpoint_command((dir / "u.ckpt").string(), (dir / "v.ckpt").string(), log) == 0);
  CHECK(slurp(dir / "u.ckpt") == slurp(dir / "v.ckpt"));
  fs::remove_all(dir);
}
