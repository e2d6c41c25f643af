#include "fzk/kernel_ops.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <memory>
#include <string>

#include "fzk/errors.hpp"

namespace fzk {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;


void require_alpha(double alpha) {
  if (!(alpha > 0.0) || alpha > 2.0)
    throw DomainError("alpha must lie in (0, 2], got " + std::to_string(alpha));
}

double scaled_norm2(const Point& xi) {
  return kTwoPi * kTwoPi * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
}

void require_kernel(const BesselKernel& k) {
  if (k.n < 1) throw DomainError("kernel dimension must be positive");
  if (!(k.delta > 0.0) || k.delta > k.n + 1.0)
    throw DomainError("kernel order must satisfy 0 < delta <= n + 1");
}

// Unit sphere area |S^{n-1}|.
double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

class Workspace {
public:
  Workspace() : w_(gsl_integration_workspace_alloc(kIntervals)) { gsl_set_error_handler_off(); }
  ~Workspace() { gsl_integration_workspace_free(w_); }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  gsl_integration_workspace* get() { return w_; }
  static constexpr std::size_t kIntervals = 2000;

private:
  gsl_integration_workspace* w_;
};

// One workspace per thread and nesting level (the radial transforms nest one
// kernel quadrature inside another).
gsl_integration_workspace* workspace(int level) {
  thread_local Workspace ws[2];
  return ws[level].get();
}

template <class F>
double trampoline(double x, void* p) {
  return (*static_cast<const F*>(p))(x);
}

// Adaptive Gauss-Kronrod (31-point) with absolute and relative targets.
// singular = true uses the extrapolating variant for endpoint singularities.
struct PanelSum {
  int level = 0;
  double value = 0.0;
  double error = 0.0;

  template <class F>
  void add(const F& f, double a, double b, double epsabs, double epsrel, bool singular = false) {
    gsl_function fn{&trampoline<F>, const_cast<F*>(&f)};
    double v = 0.0, err = 0.0;
    auto* w = workspace(level);
    int status = singular ? gsl_integration_qags(&fn, a, b, epsabs, epsrel, Workspace::kIntervals, w, &v, &err)
                          : gsl_integration_qag(&fn, a, b, epsabs, epsrel, Workspace::kIntervals,
                                                GSL_INTEG_GAUSS31, w, &v, &err);
    if (!std::isfinite(v)) throw NumericError("kernel quadrature produced a non-finite value");
    if (status != GSL_SUCCESS && err > 1e3 * std::max(epsabs, epsrel * std::abs(v))) {
      std::ostringstream os;
      os << "kernel quadrature did not converge on [" << a << ", " << b << "]: " << gsl_strerror(status)
         << ", error " << err << " against value " << v;
      throw NumericError(os.str());
    }
    value += v;
    error += err;
  }
};

} // namespace

double k_alpha_multiplier(double alpha, const Point& xi) {
  require_alpha(alpha);
  double e2 = scaled_norm2(xi);
  return std::pow(1.0 + e2, 0.5 * alpha) - std::pow(e2, 0.5 * alpha);
}

Multiplier k_alpha_symbol(double alpha) {
  require_alpha(alpha);
  return {[alpha](const Point& xi) { return cplx(k_alpha_multiplier(alpha, xi), 0.0); }, alpha - 2.0,
          "K_alpha", true};
}

double binom(double beta, int k) {
  if (k < 0) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c *= (beta - i + 1) / i;
  return c;
}

PsiSeries psi_series(double alpha, const Point& xi, int J) {
  if (J < 1) throw DomainError("series truncation needs J >= 1");
  const double beta = 0.5 * alpha;
  const double inv_b = 1.0 / (1.0 + scaled_norm2(xi));
  PsiSeries out;
  double c = 1.0, w = 1.0;  // C(beta, j) and <2 pi xi>^{2-2j}
  double sign = -1.0;
  for (int j = 1; j <= J; ++j) {
    c *= (beta - j + 1) / j;
    if (j > 1) w *= inv_b;
    sign = -sign;
    double term = sign * c * w;
    out.value += term;
    out.last_term = std::abs(term);
  }
  return out;
}

BinomAsymptotics binom_asymptotic_check(double beta, int k_max) {
  if (!(beta > 0.0)) throw DomainError("binomial asymptotics need beta > 0");
  if (k_max < 2) throw DomainError("binomial asymptotics need k_max >= 2");
  BinomAsymptotics r;
  r.beta = beta;
  double c = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    c *= (beta - k + 1) / k;
    r.scaled.push_back(std::pow(k, beta + 1.0) * std::abs(c));
  }
  bool integer = beta == std::floor(beta);
  r.predicted = integer ? 0.0 : 1.0 / std::abs(std::tgamma(-beta));
  int kk = k_max;
  int kh = kk / 2;
  r.limit = 2.0 * r.scaled[kk - 1] - r.scaled[kh - 1];
  int kr = std::min(200, k_max);
  double prev = r.scaled[kr - 2], cur = r.scaled[kr - 1];
  r.ratio_deviation = prev == 0.0 ? (cur == 0.0 ? 0.0 : 1.0) : std::abs(cur / prev - 1.0);
  r.settled = r.ratio_deviation < 0.01;
  return r;
}

Field apply_k_alpha(const KAlphaOperator& op, const Field& f) {
  require_alpha(op.alpha);
  if (op.mode == KAlphaOperator::Mode::exact) return apply_multiplier(k_alpha_symbol(op.alpha), f);
  if (op.terms < 1) throw DomainError("series truncation needs J >= 1");
  const double alpha = op.alpha;
  const int J = op.terms;
  Multiplier m{[alpha, J](const Point& xi) {
                 double b = 1.0 + scaled_norm2(xi);
                 return cplx(std::pow(b, 0.5 * (alpha - 2.0)) * psi_series(alpha, xi, J).value, 0.0);
               },
               alpha - 2.0, "K_alpha_series", true};
  return apply_multiplier(m, f);
}

double k_alpha_bound_ratio(double alpha, const Grid& g) {
  require_alpha(alpha);
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Point xi = g.frequency(i);
    double b = 1.0 + scaled_norm2(xi);
    best = std::max(best, k_alpha_multiplier(alpha, xi) * std::pow(b, 1.0 - 0.5 * alpha));
  }
  return best;
}

double legendre_duplication_residual(double z) {
  double lhs = std::sqrt(kPi) * std::tgamma(2.0 * z);
  double rhs = std::pow(2.0, 2.0 * z - 1.0) * std::tgamma(z) * std::tgamma(z + 0.5);
  return std::abs(lhs - rhs) / std::abs(lhs);
}

double bessel_kernel_quadrature(const BesselKernel& k, double r) {
  require_kernel(k);
  const int n = k.n;
  const double delta = k.delta;
  if (r < 0.0) r = -r;
  if (delta == n + 1.0)
    return std::exp(-r) /
           (std::pow(kTwoPi, 0.5 * (n - 1)) * std::pow(2.0, 0.5 * (n + 1)) * std::tgamma(0.5 * (n + 1)));
  if (r == 0.0) {
    if (delta <= n) throw DomainError("kernel is singular at the origin for delta <= n");
    return std::tgamma(0.5 * (delta - n)) / (std::pow(4.0 * kPi, 0.5 * n) * std::tgamma(0.5 * delta));
  }
  const double p = 0.5 * (n - delta - 1.0);
  const double prefactor = 1.0 / (std::pow(kTwoPi, 0.5 * (n - 1)) * std::pow(2.0, 0.5 * delta) *
                                  std::tgamma(0.5 * delta) * std::tgamma(0.5 * (n - delta + 1.0)));
  const double tol = 1e-3 * k.rel_tol;
  // [0, 1]: for p < 0 the substitution s = u^m, m = 1/(p+1), removes the s^p
  // endpoint singularity; the remaining Hoelder behaviour at 0 goes to QAGS.
  const double m = p < 0.0 ? 1.0 / (p + 1.0) : 1.0;
  auto head = [&](double u) {
    if (p < 0.0) {
      double s = std::pow(u, m);
      return m * std::pow(1.0 + 0.5 * s, p) * std::exp(-r * s);
    }
    return std::pow(u + 0.5 * u * u, p) * std::exp(-r * u);
  };
  PanelSum total;
  total.level = 1;
  total.add(head, 0.0, 1.0, 0.0, tol, true);
  // [1, S]; beyond S the integrand is below e^{-100} of its scale.
  const double S = std::max(50.0, 100.0 / r);
  auto tail = [&](double s) { return std::pow(s + 0.5 * s * s, p) * std::exp(-r * s); };
  for (double a = 1.0; a < S; a *= 2.0) total.add(tail, a, std::min(2.0 * a, S), 0.0, tol);
  return prefactor * std::exp(-r) * total.value;
}

double bessel_kernel_eval(double delta, int n, double r) {
  BesselKernel k{delta, n, 1e-8};
  require_kernel(k);
  r = std::abs(r);
  if (delta <= n) {
    if (r == 0.0) throw DomainError("kernel is singular at the origin for delta <= n");
    if (r < 1e-3) return bessel_asymptotic(delta, n, BesselRegime::near_zero, r);
  }
  return bessel_kernel_quadrature(k, r);
}

double bessel_kernel_eval(double delta, int n, const Point& y) {
  double r2 = 0.0;
  for (int a = 0; a < std::min(n, 3); ++a) r2 += y[a] * y[a];
  return bessel_kernel_eval(delta, n, std::sqrt(r2));
}

double bessel_asymptotic(double delta, int n, BesselRegime regime, double r) {
  require_kernel({delta, n, 1e-8});
  r = std::abs(r);
  if (regime == BesselRegime::near_zero) {
    if (!(r < 0.1)) throw DomainError("near-zero regime needs |y| < 0.1");
    if (delta < n) {
      if (r == 0.0) throw DomainError("power-law regime undefined at the origin");
      return std::tgamma(0.5 * (n - delta)) /
             (std::pow(2.0, delta) * std::pow(kPi, 0.5 * n) * std::tgamma(0.5 * delta)) *
             std::pow(r, delta - n);
    }
    if (delta == n) {
      if (r == 0.0) throw DomainError("logarithmic regime undefined at the origin");
      // Leading log plus its constant: 2/((4pi)^{n/2} Gamma(n/2)) (log(1/|2pi y|) + log(4pi) - gamma).
      return 2.0 / (std::pow(4.0 * kPi, 0.5 * n) * std::tgamma(0.5 * n)) *
             (std::log(1.0 / (kTwoPi * r)) + std::log(4.0 * kPi) - std::numbers::egamma);
    }
    return std::tgamma(0.5 * (delta - n)) / (std::pow(4.0 * kPi, 0.5 * n) * std::tgamma(0.5 * delta));
  }
  if (!(r > 10.0)) throw DomainError("infinity regime needs |y| > 10");
  return std::pow(kTwoPi, -0.5 * n) * std::pow(2.0, 1.0 - 0.5 * delta) / std::tgamma(0.5 * delta) *
         std::pow(r, 0.5 * (delta - n)) * std::sqrt(kPi / (2.0 * r)) * std::exp(-r);
}

namespace {

// Integrate g(r) over (0, R]: an extrapolated piece at the origin, then panels
// no wider than `width` so oscillatory integrands stay resolved.
double radial_integral(const auto& g, double width) {
  PanelSum total;
  total.add(g, 0.0, 1.0, 1e-13, 1e-10, true);
  // The kernel is below e^{-40} of its unit mass beyond R.
  const double R = 40.0;
  for (double a = 1.0; a < R; a += width) total.add(g, a, std::min(a + width, R), 1e-14, 1e-10);
  return total.value;
}

} // namespace

double bessel_l1_mass(const BesselKernel& k) {
  require_kernel(k);
  const double area = sphere_area(k.n);
  auto g = [&](double r) {
    if (r == 0.0) return 0.0;
    return area * bessel_kernel_quadrature(k, r) * std::pow(r, k.n - 1);
  };
  return radial_integral(g, 2.0);
}

double bessel_fourier(const BesselKernel& k, double rho) {
  require_kernel(k);
  if (rho == 0.0) return bessel_l1_mass(k);
  const double w = kTwoPi * rho;
  auto g = [&](double r) {
    if (r == 0.0) return 0.0;
    double kr = bessel_kernel_quadrature(k, r);
    if (k.n == 2) return kTwoPi * kr * std::cyl_bessel_j(0.0, w * r) * r;
    if (k.n == 3) return 4.0 * kPi * kr * std::sin(w * r) / w * r;
    // General n: |S^{n-2}| int_0^pi e^{i w r cos} sin^{n-2} handled through J_{n/2-1}.
    double nu = 0.5 * k.n - 1.0;
    return kTwoPi * std::pow(rho, -nu) * kr * std::cyl_bessel_j(nu, w * r) * std::pow(r, nu + 1.0);
  };
  return radial_integral(g, std::min(2.0, 0.5 / rho));
}

} // namespace fzk
