#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fzk/diagnostics.hpp"
#include "fzk/errors.hpp"
#include "fzk/multiplier.hpp"
#include "test_util.hpp"

using namespace fzk;
using fzk::testing::kPi;

namespace {

Grid box8(int N) { return Grid::cube(2, N, 8.0); }

Field bump(const Grid& g) { return gaussian(g, 1.0, 0.6, {0.3, -0.2, 0.0}); }

DirectionalWeight weight(std::vector<double> nu, double shift) {
  DirectionalWeight w;
  w.nu = std::move(nu);
  w.shift = shift;
  w.profile = DirectionalProfile(1.0);
  return w;
}

double whole_box_density(const Field& u, double r) { return integral(sobolev_density(u, r)); }

} // namespace

TEST_CASE("localized norm over the whole box is the global norm") {
  const auto g = box8(64);
  const auto u = bump(g);
  const HalfSpace everything{{1.0, 0.0}, -1e9};
  const double M = conserved_quantities(u, 1.5).M;
  CHECK(std::abs(localized_sobolev(u, 0.0, everything) - M) < 1e-13 * M);
  const double n2 = std::pow(l2_norm(bessel_potential(u, 1.5)), 2);
  CHECK(std::abs(localized_sobolev(u, 1.5, everything) - n2) < 1e-12 * n2);
  CHECK_THROWS_AS(localized_sobolev(u, -0.5, everything), DomainError);
}

TEST_CASE("unit box away from the support carries no mass") {
  const auto g = box8(64);
  const auto u = gaussian(g, 1.0, 0.4, {-2.0, -2.0, 0.0});
  const UnitBox far{{2, 2}, {}};
  const double M = conserved_quantities(u, 1.0).M;
  CHECK(localized_sobolev(u, 0.0, far) < 1e-12 * M);
}

TEST_CASE("property: unit box tiling adds up to the global value") {
  std::mt19937_64 rng(21);
  const auto g = box8(64);
  for (int trial = 0; trial < 5; ++trial) {
    const auto u = fzk::testing::bandlimited_field(g, 12, rng);
    const double r = 0.5 * trial;
    const double t = 0.1 * trial, omega = 0.7;
    double sum = 0.0;
    for (int a = -5; a < 5; ++a)
      for (int b = -5; b < 5; ++b) sum += localized_sobolev(u, r, UnitBox{{a, b}, {1.0, 0.3}}, t, omega);
    const double total = whole_box_density(u, r);
    CHECK(std::abs(sum - total) < 1e-10 * total);
  }
}

TEST_CASE("property: localized norm grows with the region") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  const auto g = box8(32);
  const auto u = fzk::testing::bandlimited_field(g, 8, rng);
  const auto dens = sobolev_density(u, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> nu{1.0, ud(rng) / 10.0};
    double a = ud(rng), b = ud(rng);
    if (a > b) std::swap(a, b);
    const double inner = restricted_integral(dens, Channel{nu, a, b});
    CHECK(inner <= restricted_integral(dens, Channel{nu, a - 0.5, b + 0.5}));
    CHECK(restricted_integral(dens, HalfSpace{nu, b}) <= restricted_integral(dens, HalfSpace{nu, a}));
    CHECK(inner <= restricted_integral(dens, HalfSpace{nu, a}));
  }
}

TEST_CASE("moving half-space equals the static one shifted by omega t") {
  const auto g = box8(64);
  const auto u = bump(g);
  const std::vector<double> nu{1.0, 0.05};
  for (double t : {0.0, 0.3, 1.1}) {
    const double moving = localized_sobolev(u, 1.0, HalfSpace{nu, 0.2}, t, 0.8);
    const double fixed = localized_sobolev(u, 1.0, HalfSpace{nu, 0.2 - 0.8 * t});
    CHECK(moving == doctest::Approx(fixed).epsilon(1e-14));
  }
}

TEST_CASE("smoothing integrand of a single Fourier mode") {
  // cos(eta x_1) is an eigenfunction of every multiplier involved.
  const auto g = box8(64);
  const int k = 3;
  const double eta = 2 * kPi * k / g.length[0];
  const auto u = fzk::testing::cos_wave(g, {k, 0, 0});
  const auto w = weight({1.0, 0.0}, 0.4);
  const double s = 1.0, alpha = 1.5;
  double base = 0.0, base_sin = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double dphi = w.eval(g.position(i))[1];
    base += u[i] * u[i] * dphi;
    base_sin += (1.0 - u[i] * u[i]) * dphi;
  }
  base *= g.cell_volume();
  base_sin *= g.cell_volume();
  const auto v = smoothing_integrand(u, s, alpha, w);
  const double jb = 1 + eta * eta;
  CHECK(v.gain == doctest::Approx(std::pow(jb, s + alpha / 2) * base).epsilon(1e-12));
  CHECK(v.x1 == doctest::Approx(eta * eta * std::pow(jb, s + (alpha - 2) / 2) * base_sin).epsilon(1e-12));
  CHECK(v.homogeneous == doctest::Approx(std::pow(eta, 2 * s + alpha) * base).epsilon(1e-12));
}

TEST_CASE("alpha = 2 x1 term is the first derivative of J^s u") {
  const auto g = box8(64);
  const auto u = bump(g);
  const auto w = weight({1.0, 0.05}, 0.5);
  const double s = 1.5;
  const Field d = partial(bessel_potential(u, s), {1, 0, 0});
  double ref = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) ref += d[i] * d[i] * w.eval(g.position(i))[1];
  ref *= g.cell_volume();
  CHECK(smoothing_integrand(u, s, 2.0, w).x1 == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("smoothing integrals vanish for zero data and flat weights") {
  const auto g = box8(32);
  SolverConfig cfg;
  cfg.alpha = 1.5;
  cfg.dt = 1e-2;
  cfg.T = 0.1;
  cfg.record_every = 2;
  const auto zero = solve(Field(g), cfg);
  const auto w = weight({1.0, 0.0}, 0.2);
  const auto si = smoothing_integral(zero, 2.0, 1.5, w);
  CHECK(si.gain_term == 0.0);
  CHECK(si.x1_term == 0.0);
  CHECK(si.homogeneous_term == 0.0);
  const ConeCondition cone{{1.0, 0.05}, 1.5, 2};
  const auto rep = smoothing_bound_report(zero, 2.0, 1.5, weight({1.0, 0.05}, 0.2), cone);
  CHECK(rep.ratio == 0.0);
  CHECK(rep.lambda == smoothing_lambda(cone));

  // phi' vanishes on the whole box once the ramp sits beyond its edge.
  const auto bumped = solve(bump(g), cfg);
  const auto flat = smoothing_integral(bumped, 2.0, 1.5, weight({1.0, 0.0}, 100.0));
  CHECK(flat.gain_term == 0.0);
  CHECK(flat.x1_term == 0.0);
}

TEST_CASE("negative d_1 phi is rejected") {
  const auto g = box8(32);
  CHECK_THROWS_AS(SmoothingEvaluator(g, 1.0, 1.5, weight({-1.0, 0.0}, 0.0)), ConfigError);
  CHECK_THROWS_AS(SmoothingEvaluator(g, 1.0, 1.5, weight({1.0, 0.0, 0.0}, 0.0)), ConfigError);
  SolverConfig cfg;
  cfg.dt = 1e-2;
  cfg.T = 0.02;
  cfg.keep_snapshots = false;
  CHECK_THROWS_AS(smoothing_integral(solve(bump(g), cfg), 1.0, 1.5, weight({1.0, 0.0}, 0.0)), ConfigError);
}

TEST_CASE("trapezoid rule") {
  Trapezoid tr;
  for (double t : {0.0, 0.5, 0.75, 2.0}) tr.add(t, 3.0 * t + 1.0);
  CHECK(tr.value() == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(tr.count() == 4);
  CHECK_THROWS_AS(tr.add(2.0, 0.0), ConfigError);
}

TEST_CASE("gain term converges at second order in the recording interval") {
  const auto g = box8(64);
  const auto u0 = bump(g);
  const auto w = weight({1.0, 0.05}, -0.5);
  std::vector<double> gain;
  for (int every : {1, 2, 4, 8}) {
    SolverConfig cfg;
    cfg.alpha = 1.5;
    cfg.dt = 0.01;
    cfg.T = 0.64;
    cfg.record_every = every;
    gain.push_back(smoothing_integral(solve(u0, cfg), 1.0, 1.5, w).gain_term);
  }
  // Differences from the densest record scale like (k^2 - 1) for interval k.
  const double e2 = gain[1] - gain[0], e4 = gain[2] - gain[0], e8 = gain[3] - gain[0];
  MESSAGE("gain " << gain[0] << " differences " << e2 << " " << e4 << " " << e8);
  CHECK(e4 / e2 == doctest::Approx(15.0 / 3.0).epsilon(0.1));
  CHECK(e8 / e4 == doctest::Approx(63.0 / 15.0).epsilon(0.1));
  CHECK(std::abs(e2) < 1e-2 * gain[0]);
}

TEST_CASE("smoothing bound report pieces") {
  const auto g = box8(32);
  SolverConfig cfg;
  cfg.alpha = 1.0;
  cfg.dt = 1e-2;
  cfg.T = 0.2;
  cfg.record_every = 5;
  const auto traj = solve(bump(g), cfg);
  const ConeCondition cone{{1.0, 0.0}, 1.0, 2};
  const auto rep = smoothing_bound_report(traj, 1.0, 1.0, weight({1.0, 0.0}, 0.0), cone);
  CHECK(rep.lambda == 0.5);
  CHECK(rep.times.size() == 5);
  CHECK(rep.T == doctest::Approx(0.2));
  CHECK(rep.r == 1.5);
  CHECK(std::isfinite(rep.ratio));
  CHECK(rep.ratio > 0.0);
  const double hs0 = l2_norm(bessel_potential(traj.snapshots[0].u, 1.0));
  CHECK(rep.sup_hs >= hs0);
  CHECK(rep.right == doctest::Approx(std::sqrt(1 + rep.T + rep.grad_l1_linf + rep.T * rep.sup_hr) * rep.sup_hs));
  CHECK_THROWS_AS(smoothing_bound_report(traj, 1.0, 1.0, weight({1.0, 0.0}, 0.0), cone, 0.9), ConfigError);
  CHECK_THROWS_AS(smoothing_bound_report(traj, 1.0, 1.0, weight({1.0, 0.0}, 0.0), ConeCondition{{1.0, 5.0}, 1.0, 2}),
                  DomainError);
}

TEST_CASE("propagation monitor") {
  const auto g = box8(32);
  SolverConfig cfg;
  cfg.alpha = 1.5;
  cfg.dt = 1e-2;
  cfg.T = 0.2;
  cfg.record_every = 4;
  const auto traj = solve(bump(g), cfg);
  PropagationOptions o;
  o.r = 1.0;
  o.beta = -1.0;
  o.eps = 0.25;
  o.tau = 1.25;
  o.nu = {1.0, 0.05};
  o.omega = 0.5;
  const auto res = propagation_monitor(traj, o);
  REQUIRE(res.times.size() == traj.snapshots.size());
  double global = 0.0;
  for (const auto& s : traj.snapshots) global = std::max(global, std::pow(l2_norm(bessel_potential(s.u, 1.0)), 2));
  CHECK(res.sup_half_space > 0.0);
  CHECK(res.sup_half_space <= global);
  CHECK(res.channel_integral > 0.0);
  const auto& last = traj.snapshots.back();
  CHECK(res.channel.back() ==
        doctest::Approx(localized_sobolev(last.u, 2.0, Channel{o.nu, -0.75, 0.25}, last.t, 0.5)).epsilon(1e-14));

  o.tau = 1.2;
  CHECK_THROWS_AS(propagation_monitor(traj, o), ConfigError);
  o.tau = 1.25;
  o.nu = {1.0};
  CHECK_THROWS_AS(propagation_monitor(traj, o), ConfigError);
  CHECK_THROWS_AS(propagation_monitor(traj, 1.0, 0.0, 0.5, 2.0, {1.0, 0.0}, 1.0), ConfigError);
}

TEST_CASE("records csv") {
  RunMeta meta{Grid::cube(2, 16, 4.0), 1.5, "abc123", "0.1.0"};
  std::vector<DiagnosticRecord> recs(2);
  recs[0].t = 0.0;
  recs[0].conserved = {1.0, 2.0, 0.1, 0.2};
  recs[0].localized = {{"half_r1", 0.25}};
  recs[1].t = 0.1;
  recs[1].conserved = {1.0, 2.0, 0.1, 0.2};
  recs[1].localized = {{"half_r1", 0.3}};
  std::ostringstream os;
  write_records_csv(os, recs, meta);
  CHECK(os.str() == "# fzk 0.1.0 config_hash=abc123 alpha=1.5 points=16x16\n"
                    "t,I,M,H,half_r1\n0,1,2,0.1,0.25\n0.1,1,2,0.1,0.3\n");
  recs[1].localized[0].first = "other";
  std::ostringstream os2;
  CHECK_THROWS_AS(write_records_csv(os2, recs, meta), ConfigError);
  for (double v : {1.0 / 3.0, 1e-300, -2.5e17, 0.1 + 0.2}) CHECK(std::stod(format_double(v)) == v);
}
