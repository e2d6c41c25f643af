#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fzk/grid.hpp"

namespace fzk {

// Value and derivatives of a scalar function through order 4.
struct Jet {
  std::array<double, 5> d{0.0, 0.0, 0.0, 0.0, 0.0};

  static Jet constant(double c) { return Jet{{c, 0.0, 0.0, 0.0, 0.0}}; }
  static Jet variable(double x, double dx = 1.0) { return Jet{{x, dx, 0.0, 0.0, 0.0}}; }
  double operator[](int k) const { return d[k]; }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator*(double s, const Jet& a);
Jet jet_sqrt(const Jet& a);
// sum_k c[k] t^k evaluated on a jet argument.
Jet jet_poly(const std::vector<double>& c, const Jet& t);

// C^3 ramp 35t^4 - 84t^5 + 70t^6 - 20t^7, clamped to [0, 1] outside (0, 1).
Jet smoothstep7(const Jet& t);

// The cutoffs chi, phi, phi_tilde, psi for eps > 0 and tau >= 5 eps.
// chi rises on [eps, 2eps], is linear on [2eps, tau-2eps] and closes on
// [tau-2eps, tau] with 1 - chi = eps c u^8 q(u), u = (tau-x)/(2eps), q >= 1,
// so sqrt(1 - chi^2) = u^4 sqrt(...) stays C^3 at tau. psi = 1 - s(v)^2 on [eps/8, eps/4], so
// phi_tilde = s(v) and phi = s(v)^2 there.
class CutoffFamily {
public:
  enum class Kind { chi, phi, phi_tilde, psi };

  CutoffFamily(double eps, double tau);

  double eps() const { return eps_; }
  double tau() const { return tau_; }
  double slope() const { return c_; }  // chi' on the linear stretch

  Jet eval(Kind kind, double x) const;
  Jet chi(double x) const;
  Jet phi(double x) const;
  Jet phi_tilde(double x) const;
  Jet psi(double x) const;

private:
  double eps_, tau_, c_;
};

std::string to_string(CutoffFamily::Kind k);
CutoffFamily::Kind cutoff_kind_from_string(const std::string& s);

// Nondecreasing profile with phi' == 1 on [0, 1], phi' ramping up on
// [-w, 0] and down on [1, 1 + w], phi(-inf) = 0. Bounded through order 4.
class DirectionalProfile {
public:
  explicit DirectionalProfile(double ramp_width = 1.0);
  double ramp_width() const { return w_; }
  Jet eval(double s) const;
  double total_rise() const { return 1.0 + w_; }

private:
  double w_;
};

// phi(nu . x + omega t + shift).
struct DirectionalWeight {
  std::vector<double> nu;  // size n
  double shift = 0.0;
  DirectionalProfile profile{};

  double argument(const Point& x, double t, double omega) const;
  Jet eval(const Point& x, double t = 0.0, double omega = 0.0) const;
};

// Cutoff member composed with nu . x + omega t.
struct DirectionalCutoff {
  std::vector<double> nu;
  CutoffFamily family;
  CutoffFamily::Kind kind;
  double argument(const Point& x, double t, double omega) const;
  Jet eval(const Point& x, double t = 0.0, double omega = 0.0) const;
};

// Sup |phi^{(j)}| for j = 0..4 over a dense sample of the profile's support.
std::array<double, 5> profile_derivative_bounds(const DirectionalProfile& p);

// Values, gradient and Hessian of a spatial function on R^n.
struct SpatialJet {
  double value = 0.0;
  std::array<double, 3> grad{0.0, 0.0, 0.0};
  std::array<std::array<double, 3>, 3> hess{};
};

// Directional weight blended to a constant near the box boundary:
// phi_w = c + W(x) (phi(nu.x + shift) - c), W a product of plateau windows
// that vanish together with three derivatives at the box faces.
class WindowedWeight {
public:
  WindowedWeight(DirectionalWeight w, const Grid& g, double margin_fraction = 1.0 / 6.0);
  SpatialJet eval(const Point& x) const;
  // Sample value or a derivative d^beta (|beta| <= 2) on the grid.
  Field sample_derivative(const Grid& g, const std::array<int, 3>& beta) const;
  const DirectionalWeight& weight() const { return w_; }
  double margin() const { return margin_; }
  double boundary_value() const { return c_; }

private:
  DirectionalWeight w_;
  Grid grid_;
  double margin_;
  double c_;
};

struct HalfSpace {
  std::vector<double> nu;
  double beta = 0.0;
};
struct Channel {
  std::vector<double> nu;
  double lower = 0.0;  // eps
  double upper = 1.0;  // tau
};
struct UnitBox {
  std::vector<int> kappa;
  std::vector<double> nu;  // drift direction for moving boxes; empty means static
};
using Region = std::variant<HalfSpace, Channel, UnitBox>;

// Membership of x in the region shifted by -omega t nu/|nu|^2.
// Channels need upper > lower (ConfigError otherwise).
bool region_indicator(const Region& r, const Point& x, double t = 0.0, double omega = 0.0);
void validate_region(const Region& r, int n);
std::string describe(const Region& r);

struct ConeCondition {
  std::vector<double> nu;
  double alpha = 1.0;
  int n = 2;
  double eps_cone = 0.5;
  double C = 1.0;
};

struct ConeResult {
  int case_id = 0;  // 1, 2, or 0 for inadmissible
  std::string reason;
  double nu_bar = 0.0;
  double nu_bar_bound = 0.0;  // min of the two upper bounds on |nu_bar|
  double eps_upper = 0.0;     // admissible eps_cone lies in (0, eps_upper)
};

ConeResult check_cone(const ConeCondition& c);
// Midpoint of the admissible eps_cone interval; nullopt when it is empty.
std::optional<double> midpoint_eps_cone(const std::vector<double>& nu, double alpha, int n, double C = 1.0);
// Throws DomainError for inadmissible cones.
double smoothing_lambda(const ConeCondition& c);
// The Case 2 radical expression without admissibility checks.
double smoothing_lambda_formula(double nu1, double nu_bar, double alpha, int n, double eps_cone, double C);

} // namespace fzk
