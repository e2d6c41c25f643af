#include <cmath>
#include <random>

#include "doctest.h"
#include "fzk/errors.hpp"
#include "fzk/kernel_ops.hpp"
#include "test_util.hpp"

using namespace fzk;
using fzk::testing::kPi;

namespace {

// Closed-form kernel of (1 - Delta)^{-delta/2}:
// (2 pi)^{-n/2} 2^{1-delta/2} / Gamma(delta/2) r^{(delta-n)/2} K_{(n-delta)/2}(r).
double bessel_closed_form(double delta, int n, double r) {
  double nu = std::abs(0.5 * (n - delta));
  return std::pow(2.0 * kPi, -0.5 * n) * std::pow(2.0, 1.0 - 0.5 * delta) / std::tgamma(0.5 * delta) *
         std::pow(r, 0.5 * (delta - n)) * std::cyl_bessel_k(nu, r);
}

Point radial_xi(double scaled_radius) { return {scaled_radius / (2.0 * kPi), 0.0, 0.0}; }

} // namespace

TEST_CASE("K_alpha multiplier values") {
  for (double a : {0.3, 1.0, 1.7, 2.0}) CHECK(k_alpha_multiplier(a, {0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  for (double r : {0.0, 0.4, 3.0, 50.0}) CHECK(k_alpha_multiplier(2.0, radial_xi(r)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(k_alpha_multiplier(1.0, radial_xi(1.0)) - 0.41421356237309515) < 1e-15);
  CHECK_THROWS_AS(k_alpha_multiplier(0.0, {0, 0, 0}), DomainError);
  CHECK_THROWS_AS(k_alpha_multiplier(2.1, {0, 0, 0}), DomainError);
}

TEST_CASE("property: 0 < m <= 1, decreasing, and m <2 pi xi>^{2-alpha} <= 2 on lattices") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ua(1e-3, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    double a = ua(rng);
    auto g = Grid::cube(2, 32, 0.5 + trial * 0.3);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double m = k_alpha_multiplier(a, g.frequency(i));
      CHECK(m > 0.0);
      CHECK(m <= 1.0 + 1e-15);
    }
    CHECK(k_alpha_bound_ratio(a, g) <= 2.0);
    double prev = 2.0;
    for (double r = 0.0; r < 200.0; r += 0.37) {
      double m = k_alpha_multiplier(a, radial_xi(r));
      CHECK(m <= prev + 1e-15);
      prev = m;
    }
  }
}

TEST_CASE("psi series basics") {
  CHECK(psi_series(1.3, radial_xi(2.0), 1).value == doctest::Approx(0.65).epsilon(1e-15));
  CHECK(psi_series(1.3, radial_xi(2.0), 1).last_term == doctest::Approx(0.65).epsilon(1e-15));
  for (int J : {1, 2, 5, 30}) CHECK(psi_series(2.0, radial_xi(0.8), J).value == doctest::Approx(1.0).epsilon(1e-15));
  // Partial sums at xi = 0 telescope: sum_{j<=J} (-1)^{j+1} C(1/2, j) = 1 - C(80, 40)/4^40 for J = 40.
  CHECK(std::abs(psi_series(1.0, {0, 0, 0}, 40).value - 0.91107212122609277) < 1e-14);
  CHECK_THROWS_AS(psi_series(1.0, {0, 0, 0}, 0), DomainError);
}

TEST_CASE("property: psi series reproduces the exact multiplier") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> ua(0.05, 2.0), ur(0.5, 40.0);
  for (int trial = 0; trial < 200; ++trial) {
    double a = ua(rng), r = ur(rng);
    Point xi = radial_xi(r);
    // Terms decay like (1 + r^2)^{-j}; 200 terms reach round-off for r >= 0.5.
    double b = 1.0 + r * r;
    double approx = std::pow(b, 0.5 * (a - 2.0)) * psi_series(a, xi, 200).value;
    CHECK(std::abs(approx - k_alpha_multiplier(a, xi)) < 1e-12);
  }
}

TEST_CASE("psi series error at xi = 0 decays at the rate set by the binomial tail") {
  for (double a : {0.5, 1.0, 1.5}) {
    std::vector<double> Js, errs, lasts;
    for (int J : {25, 50, 100, 200, 400}) {
      auto ps = psi_series(a, {0, 0, 0}, J);
      Js.push_back(J);
      errs.push_back(std::abs(1.0 - ps.value));
      lasts.push_back(ps.last_term);
    }
    // Terms ~ J^{-a/2-1}, so the tail (the error) ~ J^{-a/2}.
    CHECK(std::abs(testing::loglog_slope(Js, lasts) - (-0.5 * a - 1.0)) < 0.3);
    CHECK(std::abs(testing::loglog_slope(Js, errs) - (-0.5 * a)) < 0.3);
  }
}

TEST_CASE("binomial asymptotics") {
  CHECK(binom(0.5, 1) == 0.5);
  CHECK(binom(0.5, 2) == doctest::Approx(-0.125));
  auto r = binom_asymptotic_check(0.5, 400);
  CHECK(r.scaled[0] == 0.5);
  CHECK(r.predicted == doctest::Approx(0.28209479177387814).epsilon(1e-14));
  CHECK(std::abs(r.limit - 0.28209479177387814) < 1e-5);
  CHECK(std::abs(r.scaled[199] - 0.28262510054909389) < 1e-12);
  CHECK(r.settled);
  auto ri = binom_asymptotic_check(3.0, 20);
  for (int k = 4; k <= 20; ++k) CHECK(ri.scaled[k - 1] == 0.0);
  CHECK(ri.scaled[2] > 0.0);
  CHECK_THROWS_AS(binom_asymptotic_check(-1.0, 10), DomainError);
}

TEST_CASE("Legendre duplication formula") {
  for (double z = 0.05; z < 10.0; z += 0.173) CHECK(legendre_duplication_residual(z) < 1e-10);
}

TEST_CASE("apply_k_alpha") {
  std::mt19937_64 rng(33);
  auto g = Grid::cube(2, 64, 8.0);
  auto f = testing::random_field(g, rng);
  CHECK(testing::rel_diff(apply_k_alpha({2.0, KAlphaOperator::Mode::exact, 1}, f), f) < 1e-13);
  CHECK(testing::rel_diff(apply_k_alpha({2.0, KAlphaOperator::Mode::series, 1}, f), f) < 1e-13);
  for (double a : {0.5, 1.0, 1.5}) {
    auto k = apply_k_alpha({a, KAlphaOperator::Mode::exact, 1}, f);
    CHECK(l2_norm(k) <= l2_norm(bessel_potential(f, a - 2.0)) * k_alpha_bound_ratio(a, g) * (1 + 1e-12));
  }
  CHECK_THROWS_AS(apply_k_alpha({0.0, KAlphaOperator::Mode::exact, 1}, f), DomainError);
}

TEST_CASE("series and exact K_alpha agree on data away from zero frequency") {
  // Gaussian wave packet centred at |2 pi xi| = 6.
  auto g = Grid::cube(2, 64, 16.0);
  auto f = sample(g, [](const Point& x) {
    return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])) * std::cos(6.0 * x[0]);
  });
  auto exact = apply_k_alpha({1.5, KAlphaOperator::Mode::exact, 1}, f);
  auto series = apply_k_alpha({1.5, KAlphaOperator::Mode::series, 50}, f);
  CHECK(testing::rel_diff(series, exact) < 1e-5);
}

TEST_CASE("series K_alpha error on a centred Gaussian matches the zero-frequency tail") {
  // The J = 50 tail at xi = 0 is |C(-1/4, 50)|; a centred Gaussian carries
  // most of its mass near xi = 0, so the discrepancy sits just below that tail.
  auto g = Grid::cube(2, 64, 16.0);
  auto f = sample(g, [](const Point& x) { return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])); });
  auto exact = apply_k_alpha({1.5, KAlphaOperator::Mode::exact, 1}, f);
  auto series = apply_k_alpha({1.5, KAlphaOperator::Mode::series, 50}, f);
  double tail = std::abs(binom(-0.25, 50));
  double d = l2_norm(series - exact) / l2_norm(exact);
  CHECK(d < tail);
  CHECK(d > 0.1 * tail);
}

TEST_CASE("Bessel kernel matches the modified Bessel closed form") {
  for (auto [delta, n] : {std::pair{1.0, 2}, {2.0, 2}, {1.5, 3}, {2.5, 2}, {0.7, 3}, {3.5, 3}}) {
    for (double r : {1e-3, 0.01, 0.3, 1.0, 2.5, 7.0, 15.0, 30.0}) {
      double q = bessel_kernel_quadrature({delta, n, 1e-8}, r);
      CHECK(std::abs(q / bessel_closed_form(delta, n, r) - 1.0) < 1e-8);
    }
  }
  // delta = n + 1 endpoint: e^{-r} / (8 pi) in 3D.
  CHECK(bessel_kernel_quadrature({4.0, 3, 1e-8}, 2.0) == doctest::Approx(std::exp(-2.0) / (8 * kPi)).epsilon(1e-14));
}

TEST_CASE("Bessel kernel is positive and decreasing along rays") {
  for (auto [delta, n] : {std::pair{1.0, 2}, {2.0, 2}, {1.5, 3}, {4.0, 3}}) {
    double prev = INFINITY;
    for (double r = 2e-4; r < 35.0; r *= 1.07) {
      double v = bessel_kernel_eval(delta, n, r);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("Bessel kernel unit mass and Fourier transform") {
  for (auto [delta, n] : {std::pair{1.0, 2}, {2.0, 2}, {1.5, 3}, {4.0, 3}}) {
    BesselKernel k{delta, n, 1e-8};
    CHECK(std::abs(bessel_l1_mass(k) - 1.0) < 1e-6);
    for (double rho : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      double expect = std::pow(1.0 + 4.0 * kPi * kPi * rho * rho, -0.5 * delta);
      CHECK(std::abs(bessel_fourier(k, rho) - expect) < 1e-6);
    }
  }
}

TEST_CASE("Bessel asymptotic regimes") {
  // delta > n at the origin.
  double c = std::tgamma(0.25) / (4.0 * kPi * std::tgamma(1.25));
  CHECK(bessel_asymptotic(2.5, 2, BesselRegime::near_zero, 0.01) == doctest::Approx(c).epsilon(1e-14));
  CHECK(bessel_kernel_quadrature({2.5, 2, 1e-8}, 0.0) == doctest::Approx(c).epsilon(1e-14));
  // delta = n grows like log(1/|2 pi y|).
  double a1 = bessel_asymptotic(2.0, 2, BesselRegime::near_zero, 1e-4);
  double a2 = bessel_asymptotic(2.0, 2, BesselRegime::near_zero, 1e-5);
  CHECK((a2 - a1) == doctest::Approx(std::log(10.0) / (2 * kPi)).epsilon(1e-12));
  struct Case {
    double delta;
    int n;
  };
  for (Case cs : {Case{1.0, 2}, {2.0, 2}, {1.5, 3}, {2.5, 2}, {4.0, 3}}) {
    BesselKernel k{cs.delta, cs.n, 1e-8};
    double r0 = 1e-4;
    CHECK(std::abs(bessel_kernel_quadrature(k, r0) / bessel_asymptotic(cs.delta, cs.n, BesselRegime::near_zero, r0) - 1.0) < 0.05);
    double r1 = 20.0;
    CHECK(std::abs(bessel_kernel_quadrature(k, r1) / bessel_asymptotic(cs.delta, cs.n, BesselRegime::infinity, r1) - 1.0) < 0.05);
  }
  CHECK_THROWS_AS(bessel_asymptotic(1.0, 2, BesselRegime::near_zero, 0.5), DomainError);
  CHECK_THROWS_AS(bessel_asymptotic(1.0, 2, BesselRegime::infinity, 5.0), DomainError);
  CHECK_THROWS_AS(bessel_kernel_eval(1.0, 2, 0.0), DomainError);
  CHECK_THROWS_AS(bessel_kernel_eval(3.5, 2, 1.0), DomainError);
  // Below 1e-3 the evaluator uses the near-zero form for delta <= n.
  CHECK(bessel_kernel_eval(1.0, 2, 1e-4) == bessel_asymptotic(1.0, 2, BesselRegime::near_zero, 1e-4));
}
