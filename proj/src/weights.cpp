#include "fzk/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fzk/errors.hpp"

namespace fzk {

namespace {

constexpr double kBinom[5][5] = {
    {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};

// Chain rule for f(g) given f and its four derivatives at g[0].
Jet compose(const std::array<double, 5>& f, const Jet& g) {
  const double g1 = g[1], g2 = g[2], g3 = g[3], g4 = g[4];
  Jet h;
  h.d[0] = f[0];
  h.d[1] = f[1] * g1;
  h.d[2] = f[2] * g1 * g1 + f[1] * g2;
  h.d[3] = f[3] * g1 * g1 * g1 + 3.0 * f[2] * g1 * g2 + f[1] * g3;
  h.d[4] = f[4] * g1 * g1 * g1 * g1 + 6.0 * f[3] * g1 * g1 * g2 + f[2] * (3.0 * g2 * g2 + 4.0 * g1 * g3) +
           f[1] * g4;
  return h;
}

const std::vector<double> kSmooth{0, 0, 0, 0, 35, -84, 70, -20};
// Antiderivative of kSmooth vanishing at 0; equals 1/2 at t = 1.
const std::vector<double> kSmoothInt{0, 0, 0, 0, 0, 7, -14, 10, -2.5};
// Cap polynomial u^8 q(u) with value 1, slope 2 and flat second/third derivative at u = 1.
const std::vector<double> kCapQ{75, -190, 164, -48};

Jet zero_jet() { return Jet::constant(0.0); }

} // namespace

Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  for (int k = 0; k < 5; ++k) r.d[k] = a.d[k] + b.d[k];
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  for (int k = 0; k < 5; ++k) r.d[k] = a.d[k] - b.d[k];
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  for (int k = 0; k < 5; ++k)
    for (int j = 0; j <= k; ++j) r.d[k] += kBinom[k][j] * a.d[j] * b.d[k - j];
  return r;
}

Jet operator*(double s, const Jet& a) {
  Jet r;
  for (int k = 0; k < 5; ++k) r.d[k] = s * a.d[k];
  return r;
}

Jet jet_sqrt(const Jet& a) {
  const double v = a[0];
  if (!(v > 0.0)) {
    if (v == 0.0 && a[1] == 0.0 && a[2] == 0.0 && a[3] == 0.0 && a[4] == 0.0) return zero_jet();
    throw NumericError("jet_sqrt: radicand " + std::to_string(v) + " is not positive");
  }
  const double s = std::sqrt(v);
  return compose({s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v), -0.9375 / (s * v * v * v)}, a);
}

Jet jet_poly(const std::vector<double>& c, const Jet& t) {
  Jet r;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    r = r * t;
    r.d[0] += *it;
  }
  return r;
}

Jet smoothstep7(const Jet& t) {
  if (t[0] <= 0.0) return zero_jet();
  if (t[0] >= 1.0) return Jet::constant(1.0);
  return jet_poly(kSmooth, t);
}

CutoffFamily::CutoffFamily(double eps, double tau) : eps_(eps), tau_(tau) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("cutoff family: eps must be positive");
  if (!(tau >= 5.0 * eps) || !std::isfinite(tau)) throw ConfigError("cutoff family: tau must be >= 5 eps");
  c_ = 1.0 / (tau - 2.5 * eps);
}

Jet CutoffFamily::chi(double x) const {
  const double e = eps_;
  if (x <= e) return zero_jet();
  if (x >= tau_) return Jet::constant(1.0);
  if (x < 2.0 * e) {
    Jet t = Jet::variable((x - e) / e, 1.0 / e);
    return (c_ * e) * jet_poly(kSmoothInt, t);
  }
  if (x <= tau_ - 2.0 * e) {
    Jet r = Jet::variable(c_ * (0.5 * e + x - 2.0 * e), c_);
    return r;
  }
  Jet u = Jet::variable((tau_ - x) / (2.0 * e), -1.0 / (2.0 * e));
  Jet u2 = u * u, u4 = u2 * u2;
  Jet cap = (e * c_) * (u4 * u4 * jet_poly(kCapQ, u));
  return Jet::constant(1.0) - cap;
}

Jet CutoffFamily::psi(double x) const {
  const double a = eps_ / 8.0;
  if (x <= a) return Jet::constant(1.0);
  if (x >= 2.0 * a) return zero_jet();
  Jet s = smoothstep7(Jet::variable((x - a) / a, 1.0 / a));
  return Jet::constant(1.0) - s * s;
}

Jet CutoffFamily::phi(double x) const {
  const double a = eps_ / 8.0;
  if (x <= a || x >= tau_) return zero_jet();
  if (x < 2.0 * a) {
    Jet s = smoothstep7(Jet::variable((x - a) / a, 1.0 / a));
    return s * s;
  }
  if (x <= eps_) return Jet::constant(1.0);
  return Jet::constant(1.0) - chi(x);
}

Jet CutoffFamily::phi_tilde(double x) const {
  const double a = eps_ / 8.0, e = eps_;
  if (x <= a || x >= tau_) return zero_jet();
  if (x < 2.0 * a) return smoothstep7(Jet::variable((x - a) / a, 1.0 / a));
  if (x <= e) return Jet::constant(1.0);
  Jet ch = chi(x);
  if (x <= tau_ - 2.0 * e) return jet_sqrt(Jet::constant(1.0) - ch * ch);
  // 1 - chi^2 = eps c u^8 q(u) (1 + chi)
  Jet u = Jet::variable((tau_ - x) / (2.0 * e), -1.0 / (2.0 * e));
  Jet u2 = u * u;
  Jet rad = (e * c_) * (jet_poly(kCapQ, u) * (Jet::constant(1.0) + ch));
  return (u2 * u2) * jet_sqrt(rad);
}

Jet CutoffFamily::eval(Kind kind, double x) const {
  switch (kind) {
    case Kind::chi: return chi(x);
    case Kind::phi: return phi(x);
    case Kind::phi_tilde: return phi_tilde(x);
    case Kind::psi: return psi(x);
  }
  return zero_jet();
}

std::string to_string(CutoffFamily::Kind k) {
  switch (k) {
    case CutoffFamily::Kind::chi: return "chi";
    case CutoffFamily::Kind::phi: return "phi";
    case CutoffFamily::Kind::phi_tilde: return "phi_tilde";
    case CutoffFamily::Kind::psi: return "psi";
  }
  return "?";
}

CutoffFamily::Kind cutoff_kind_from_string(const std::string& s) {
  if (s == "chi") return CutoffFamily::Kind::chi;
  if (s == "phi") return CutoffFamily::Kind::phi;
  if (s == "phi_tilde") return CutoffFamily::Kind::phi_tilde;
  if (s == "psi") return CutoffFamily::Kind::psi;
  throw ConfigError("unknown cutoff kind '" + s + "'");
}

DirectionalProfile::DirectionalProfile(double ramp_width) : w_(ramp_width) {
  if (!(ramp_width > 0.0) || !std::isfinite(ramp_width))
    throw ConfigError("directional profile: ramp width must be positive");
}

Jet DirectionalProfile::eval(double s) const {
  const double w = w_;
  if (s <= -w) return zero_jet();
  if (s >= 1.0 + w) return Jet::constant(1.0 + w);
  if (s < 0.0) return w * jet_poly(kSmoothInt, Jet::variable((s + w) / w, 1.0 / w));
  if (s <= 1.0) return Jet::variable(0.5 * w + s);
  Jet t = Jet::variable((1.0 + w - s) / w, -1.0 / w);
  return Jet::constant(0.5 * w + 1.0 + 0.5 * w) - w * jet_poly(kSmoothInt, t);
}

std::array<double, 5> profile_derivative_bounds(const DirectionalProfile& p) {
  std::array<double, 5> b{};
  const double w = p.ramp_width();
  const int samples = 20000;
  for (int i = 0; i <= samples; ++i) {
    double s = -2.0 * w + (1.0 + 4.0 * w) * i / samples;
    Jet j = p.eval(s);
    for (int k = 0; k < 5; ++k) b[k] = std::max(b[k], std::abs(j[k]));
  }
  return b;
}

namespace {

double dot_nu(const std::vector<double>& nu, const Point& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < nu.size() && j < 3; ++j) s += nu[j] * x[j];
  return s;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return s;
}

} // namespace

double DirectionalWeight::argument(const Point& x, double t, double omega) const {
  return dot_nu(nu, x) + omega * t + shift;
}

Jet DirectionalWeight::eval(const Point& x, double t, double omega) const {
  return profile.eval(argument(x, t, omega));
}

double DirectionalCutoff::argument(const Point& x, double t, double omega) const {
  return dot_nu(nu, x) + omega * t;
}

Jet DirectionalCutoff::eval(const Point& x, double t, double omega) const {
  return family.eval(kind, argument(x, t, omega));
}

WindowedWeight::WindowedWeight(DirectionalWeight w, const Grid& g, double margin_fraction)
    : w_(std::move(w)), grid_(g), margin_(margin_fraction) {
  if (static_cast<int>(w_.nu.size()) != g.n) throw ConfigError("windowed weight: nu has wrong dimension");
  if (!(margin_fraction > 0.0 && margin_fraction < 0.5))
    throw ConfigError("windowed weight: margin fraction must lie in (0, 1/2)");
  Point centre{0.0, 0.0, 0.0};
  for (int a = 0; a < g.n; ++a) centre[a] = g.origin[a] + 0.5 * g.length[a];
  c_ = w_.eval(centre)[0];
}

SpatialJet WindowedWeight::eval(const Point& x) const {
  const int n = grid_.n;
  // Per-axis window value and two derivatives.
  std::array<std::array<double, 3>, 3> win{};
  for (int a = 0; a < n; ++a) {
    const double m = margin_ * grid_.length[a];
    Jet lo = smoothstep7(Jet::variable((x[a] - grid_.origin[a]) / m, 1.0 / m));
    Jet hi = smoothstep7(Jet::variable((grid_.origin[a] + grid_.length[a] - x[a]) / m, -1.0 / m));
    Jet p = lo * hi;
    win[a] = {p[0], p[1], p[2]};
  }
  double W = 1.0;
  for (int a = 0; a < n; ++a) W *= win[a][0];
  std::array<double, 3> gW{0.0, 0.0, 0.0};
  std::array<std::array<double, 3>, 3> hW{};
  for (int j = 0; j < n; ++j) {
    gW[j] = 1.0;
    for (int a = 0; a < n; ++a) gW[j] *= win[a][a == j ? 1 : 0];
    for (int k = 0; k < n; ++k) {
      double prod = 1.0;
      for (int a = 0; a < n; ++a) prod *= win[a][(a == j) + (a == k)];
      hW[j][k] = prod;
    }
  }

  Jet g = w_.eval(x);
  const double dg = g[0] - c_;
  SpatialJet r;
  r.value = c_ + W * dg;
  for (int j = 0; j < n; ++j) r.grad[j] = gW[j] * dg + W * g[1] * w_.nu[j];
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      r.hess[j][k] = hW[j][k] * dg + gW[j] * g[1] * w_.nu[k] + gW[k] * g[1] * w_.nu[j] +
                     W * g[2] * w_.nu[j] * w_.nu[k];
  return r;
}

Field WindowedWeight::sample_derivative(const Grid& g, const std::array<int, 3>& beta) const {
  const int order = beta[0] + beta[1] + beta[2];
  if (order > 2 || beta[0] < 0 || beta[1] < 0 || beta[2] < 0)
    throw DomainError("windowed weight: derivatives are available through order 2");
  std::array<int, 2> axes{-1, -1};
  int m = 0;
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < beta[a]; ++c) axes[m++] = a;
  return sample(g, [&](const Point& x) {
    SpatialJet s = eval(x);
    if (order == 0) return s.value;
    if (order == 1) return s.grad[axes[0]];
    return s.hess[axes[0]][axes[1]];
  });
}

void validate_region(const Region& r, int n) {
  auto check_nu = [n](const std::vector<double>& nu, const char* what) {
    if (static_cast<int>(nu.size()) != n) throw ConfigError(std::string(what) + ": nu has wrong dimension");
    if (norm2(nu) == 0.0) throw ConfigError(std::string(what) + ": nu must be nonzero");
  };
  if (auto* h = std::get_if<HalfSpace>(&r)) {
    check_nu(h->nu, "half space");
  } else if (auto* c = std::get_if<Channel>(&r)) {
    check_nu(c->nu, "channel");
    if (!(c->upper > c->lower)) throw ConfigError("channel: upper bound must exceed lower bound");
  } else if (auto* b = std::get_if<UnitBox>(&r)) {
    if (static_cast<int>(b->kappa.size()) != n) throw ConfigError("unit box: kappa has wrong dimension");
    if (!b->nu.empty()) check_nu(b->nu, "unit box");
  }
}

bool region_indicator(const Region& r, const Point& x, double t, double omega) {
  if (auto* h = std::get_if<HalfSpace>(&r)) return dot_nu(h->nu, x) + omega * t > h->beta;
  if (auto* c = std::get_if<Channel>(&r)) {
    if (!(c->upper > c->lower)) throw ConfigError("channel: upper bound must exceed lower bound");
    const double s = dot_nu(c->nu, x) + omega * t;
    return c->lower < s && s < c->upper;
  }
  const auto& b = std::get<UnitBox>(r);
  const double nn = b.nu.empty() ? 0.0 : norm2(b.nu);
  for (std::size_t j = 0; j < b.kappa.size(); ++j) {
    double y = x[j];
    if (nn > 0.0) y += omega * t * b.nu[j] / nn;
    if (!(b.kappa[j] < y && y <= b.kappa[j] + 1)) return false;
  }
  return true;
}

std::string describe(const Region& r) {
  std::ostringstream os;
  auto vec = [&os](const auto& v) {
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ")";
  };
  if (auto* h = std::get_if<HalfSpace>(&r)) {
    os << "half_space nu=";
    vec(h->nu);
    os << " beta=" << h->beta;
  } else if (auto* c = std::get_if<Channel>(&r)) {
    os << "channel nu=";
    vec(c->nu);
    os << " lower=" << c->lower << " upper=" << c->upper;
  } else {
    os << "unit_box kappa=";
    vec(std::get<UnitBox>(r).kappa);
  }
  return os.str();
}

ConeResult check_cone(const ConeCondition& c) {
  ConeResult res;
  if (static_cast<int>(c.nu.size()) != c.n || c.n < 1) {
    res.reason = "nu has wrong dimension";
    return res;
  }
  if (!(c.alpha > 0.0)) {
    res.reason = "alpha must be positive";
    return res;
  }
  const double nu1 = c.nu[0];
  double nb2 = 0.0;
  for (int j = 1; j < c.n; ++j) nb2 += c.nu[j] * c.nu[j];
  res.nu_bar = std::sqrt(nb2);
  if (!(nu1 > 0.0)) {
    res.reason = "nu_1 must be positive";
    return res;
  }
  if (res.nu_bar == 0.0) {
    res.case_id = 1;
    res.reason = "transverse components vanish";
    res.nu_bar_bound = INFINITY;
    res.eps_upper = INFINITY;
    return res;
  }
  const double rn = std::sqrt(c.n - 1.0);
  const double bound1 = 2.0 * nu1 / (c.C * std::sqrt(c.alpha) * rn);
  const double bound2 = nu1 * (1.0 + c.alpha) / (c.alpha * c.eps_cone * rn);
  res.nu_bar_bound = std::min(bound1, bound2);
  res.eps_upper = nu1 / (res.nu_bar * rn) - c.alpha * rn * res.nu_bar * c.C * c.C / (4.0 * nu1);
  if (!(c.eps_cone > 0.0)) {
    res.reason = "eps_cone must be positive";
  } else if (!(res.nu_bar < bound1)) {
    res.reason = "|nu_bar| violates the bound 2 nu_1 / (C sqrt(alpha (n-1)))";
  } else if (!(res.nu_bar < bound2)) {
    res.reason = "|nu_bar| violates the bound nu_1 (1+alpha) / (alpha eps sqrt(n-1))";
  } else if (!(c.eps_cone < res.eps_upper)) {
    res.reason = "eps_cone exceeds its admissible upper limit";
  } else {
    res.case_id = 2;
    res.reason = "both cone inequalities hold";
  }
  return res;
}

std::optional<double> midpoint_eps_cone(const std::vector<double>& nu, double alpha, int n, double C) {
  ConeCondition c{nu, alpha, n, 1.0, C};
  ConeResult r = check_cone(c);
  if (r.case_id == 1) return 1.0;  // no constraint on eps in this case
  if (static_cast<int>(nu.size()) != n || !(nu[0] > 0.0) || !(alpha > 0.0) || r.nu_bar == 0.0) return std::nullopt;
  const double rn = std::sqrt(n - 1.0);
  const double upper = std::min(r.eps_upper, nu[0] * (1.0 + alpha) / (alpha * r.nu_bar * rn));
  if (!(upper > 0.0)) return std::nullopt;
  const double mid = 0.5 * upper;
  c.eps_cone = mid;
  if (check_cone(c).case_id != 2) return std::nullopt;
  return mid;
}

double smoothing_lambda_formula(double nu1, double nu_bar, double alpha, int n, double eps_cone, double C) {
  const double rn = std::sqrt(n - 1.0);
  const double rad = nu1 * nu1 * (1 - alpha) * (1 - alpha) / 4.0 +
                     nu_bar * nu1 * alpha * (1 - alpha) * eps_cone * rn / 2.0 +
                     nu_bar * nu_bar * alpha * alpha * (n - 1.0) * (eps_cone * eps_cone + C * C) / 4.0;
  if (rad < 0.0) throw NumericError("smoothing lambda: negative radicand");
  return nu1 * (1 + alpha) / 4.0 - alpha * eps_cone * rn * nu_bar / 4.0 - 0.5 * std::sqrt(rad);
}

double smoothing_lambda(const ConeCondition& c) {
  ConeResult r = check_cone(c);
  if (r.case_id == 0) throw DomainError("smoothing lambda: inadmissible direction (" + r.reason + ")");
  if (r.case_id == 1) return c.alpha * c.nu[0] / 2.0;
  return smoothing_lambda_formula(c.nu[0], r.nu_bar, c.alpha, c.n, c.eps_cone, c.C);
}

} // namespace fzk
