#pragma once

#include <vector>

#include "fzk/grid.hpp"
#include "fzk/multiplier.hpp"

namespace fzk {

// m(xi) = <2 pi xi>^alpha - |2 pi xi|^alpha, alpha in (0, 2].
double k_alpha_multiplier(double alpha, const Point& xi);
Multiplier k_alpha_symbol(double alpha);

// Generalized binomial coefficient beta choose k.
double binom(double beta, int k);

struct PsiSeries {
  double value = 0.0;      // sum_{j=1}^{J} (-1)^{j+1} C(alpha/2, j) <2 pi xi>^{2-2j}
  double last_term = 0.0;  // |j = J term|
};

// Signed series with <2 pi xi>^{alpha-2} psi -> k_alpha_multiplier as J grows.
PsiSeries psi_series(double alpha, const Point& xi, int J);

struct BinomAsymptotics {
  double beta = 0.0;
  std::vector<double> scaled;  // k^{beta+1} |C(beta, k)| for k = 1..k_max
  double limit = 0.0;          // Richardson estimate of the limit
  double predicted = 0.0;      // 1 / |Gamma(-beta)|, zero for integer beta
  double ratio_deviation = 0.0;  // |s_k / s_{k-1} - 1| at k = min(200, k_max)
  bool settled = false;        // ratio_deviation < 1%
};

BinomAsymptotics binom_asymptotic_check(double beta, int k_max);

struct KAlphaOperator {
  enum class Mode { exact, series };
  double alpha = 1.0;
  Mode mode = Mode::exact;
  int terms = 50;  // truncation J for series mode
};

Field apply_k_alpha(const KAlphaOperator& op, const Field& f);
// sup over the lattice of m(xi) <2 pi xi>^{2-alpha}.
double k_alpha_bound_ratio(double alpha, const Grid& g);

// Legendre duplication residual |sqrt(pi) Gamma(2z) - 2^{2z-1} Gamma(z) Gamma(z+1/2)| / |sqrt(pi) Gamma(2z)|.
double legendre_duplication_residual(double z);

// Radial convolution kernel of J^{-delta} on R^n, 0 < delta <= n + 1.
// delta = n + 1 is the closed-form limit e^{-r} / ((2pi)^{(n-1)/2} 2^{(n+1)/2} Gamma((n+1)/2)).
struct BesselKernel {
  double delta = 1.0;
  int n = 2;
  double rel_tol = 1e-8;
};

// Quadrature of the integral representation at radius r > 0 (r = 0 allowed when delta > n).
double bessel_kernel_quadrature(const BesselKernel& k, double r);
// Public evaluator: routes r < 1e-3 with delta <= n to the near-zero asymptotic form.
double bessel_kernel_eval(double delta, int n, double r);
double bessel_kernel_eval(double delta, int n, const Point& y);

enum class BesselRegime { near_zero, infinity };
// Leading asymptotic form. near_zero requires r < 0.1, infinity requires r > 10.
double bessel_asymptotic(double delta, int n, BesselRegime regime, double r);

// Radial quadratures: L1 mass and Fourier transform at |xi| = rho.
double bessel_l1_mass(const BesselKernel& k);
double bessel_fourier(const BesselKernel& k, double rho);

} // namespace fzk
