#include "fzk/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "fzk/errors.hpp"
#include "fzk/fft.hpp"
#include "fzk/multiplier.hpp"

namespace fzk {

namespace {

double max_abs_symbol(const std::vector<cplx>& sym) {
  double m = 0.0;
  for (const auto& c : sym) m = std::max(m, std::abs(c));
  return m;
}

Field apply_to_spectrum(const std::vector<cplx>& sym, const SpectralField& F, double normF) {
  return inverse_checked(apply_symbol(sym, F), max_abs_symbol(sym) * normF);
}

double weighted_square(const Field& v, const Field& weight) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * v[i] * weight[i];
  return s * v.grid.cell_volume();
}

double sobolev_norm(const Field& u, double s) { return l2_norm(bessel_potential(u, s)); }

double max_gradient(const Field& u) {
  std::vector<double> sq(u.size(), 0.0);
  for (int a = 0; a < u.grid.n; ++a) {
    MultiIndex b{0, 0, 0};
    b[a] = 1;
    const Field d = partial(u, b);
    for (std::size_t i = 0; i < u.size(); ++i) sq[i] += d[i] * d[i];
  }
  double m = 0.0;
  for (double v : sq) m = std::max(m, v);
  return std::sqrt(m);
}

void require_snapshots(const Trajectory& traj, const char* what) {
  if (traj.snapshots.empty())
    throw ConfigError(std::string(what) + ": trajectory has no snapshots (set keep_snapshots)");
}

} // namespace

Field sobolev_density(const Field& u, double r) {
  Field v = bessel_potential(u, r);
  for (auto& x : v.values) x *= x;
  return v;
}

double restricted_integral(const Field& density, const Region& region, double t, double omega) {
  validate_region(region, density.grid.n);
  double s = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i)
    if (region_indicator(region, density.grid.position(i), t, omega)) s += density[i];
  return s * density.grid.cell_volume();
}

double localized_sobolev(const Field& u, double r, const Region& region, double t, double omega) {
  if (!(r >= 0.0)) throw DomainError("localized_sobolev: index r must be >= 0");
  return restricted_integral(sobolev_density(u, r), region, t, omega);
}

SmoothingEvaluator::SmoothingEvaluator(const Grid& g, double s, double alpha, const DirectionalWeight& w,
                                       double omega)
    : grid_(g), alpha_(alpha), w_(w), omega_(omega) {
  if (static_cast<int>(w.nu.size()) != g.n) throw ConfigError("smoothing: weight direction must have n entries");
  if (!(w.nu[0] >= 0.0)) throw ConfigError("smoothing: d_1 phi < 0 (nu_1 is negative)");
  gain_sym_ = lattice_symbol(bessel_multiplier(s + alpha / 2.0), g);
  x1_sym_ = lattice_symbol(partial_multiplier({1, 0, 0}) * bessel_multiplier(s + (alpha - 2.0) / 2.0), g);
  hom_sym_ = lattice_symbol(homogeneous_multiplier(s + alpha / 2.0), g);
}

Field SmoothingEvaluator::weight_derivative(double t) const {
  Field d(grid_);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double v = w_.nu[0] * w_.eval(grid_.position(i), t, omega_)[1];
    if (v < -1e-14) throw ConfigError("smoothing: d_1 phi < 0 at a lattice point");
    d[i] = std::max(v, 0.0);
  }
  return d;
}

SmoothingIntegrand SmoothingEvaluator::operator()(const Field& u, double t) const {
  require_same_grid(u.grid, grid_);
  const Field dphi = weight_derivative(t);
  const auto F = forward(u);
  const double nF = l2_norm(F);
  SmoothingIntegrand r;
  r.gain = weighted_square(apply_to_spectrum(gain_sym_, F, nF), dphi);
  r.x1 = weighted_square(apply_to_spectrum(x1_sym_, F, nF), dphi);
  r.homogeneous = weighted_square(apply_to_spectrum(hom_sym_, F, nF), dphi);
  return r;
}

SmoothingIntegrand smoothing_integrand(const Field& u, double s, double alpha, const DirectionalWeight& w,
                                       double t, double omega) {
  return SmoothingEvaluator(u.grid, s, alpha, w, omega)(u, t);
}

void Trapezoid::add(double t, double v) {
  if (n_ > 0) {
    if (!(t > t_)) throw ConfigError("trapezoid: times must increase");
    sum_ += 0.5 * (t - t_) * (v + v_);
  }
  t_ = t;
  v_ = v;
  ++n_;
}

SmoothingAccumulator::SmoothingAccumulator(const Grid& g, double s, double alpha, const DirectionalWeight& w,
                                           double omega)
    : eval_(g, s, alpha, w, omega) {}

void SmoothingAccumulator::add(double t, const Field& u) {
  const auto v = eval_(u, t);
  gain_.add(t, v.gain);
  x1_.add(t, v.x1);
  hom_.add(t, v.homogeneous);
  out_.gain_term = gain_.value();
  out_.x1_term = x1_.value();
  out_.homogeneous_term = hom_.value();
  out_.times.push_back(t);
  out_.integrands.push_back(v);
}

SmoothingIntegral smoothing_integral(const Trajectory& traj, double s, double alpha, const DirectionalWeight& w,
                                     double omega) {
  require_snapshots(traj, "smoothing_integral");
  SmoothingAccumulator acc(traj.snapshots.front().u.grid, s, alpha, w, omega);
  for (const auto& snap : traj.snapshots) acc.add(snap.t, snap.u);
  return acc.result();
}

SmoothingBoundAccumulator::SmoothingBoundAccumulator(const Grid& g, double s, double alpha,
                                                     const DirectionalWeight& w, const ConeCondition& cone,
                                                     double r)
    : eval_(g, s, alpha, w), s_(s) {
  rep_.lambda = smoothing_lambda(cone);
  rep_.r = r < 0.0 ? g.n / 2.0 + 0.5 : r;
  if (!(rep_.r > g.n / 2.0)) throw ConfigError("smoothing bound: r must exceed n/2");
}

void SmoothingBoundAccumulator::add(double t, const Field& u) {
  if (rep_.times.empty()) t0_ = t;
  const auto v = eval_(u, t);
  const double left = rep_.lambda * (v.gain + v.x1);
  rep_.times.push_back(t);
  rep_.left.push_back(left);
  left_.add(t, left);
  grad_.add(t, max_gradient(u));
  rep_.sup_hr = std::max(rep_.sup_hr, sobolev_norm(u, rep_.r));
  rep_.sup_hs = std::max(rep_.sup_hs, sobolev_norm(u, s_));
  rep_.T = t - t0_;
}

SmoothingBoundReport SmoothingBoundAccumulator::report() const {
  SmoothingBoundReport r = rep_;
  r.left_integral = left_.value();
  r.grad_l1_linf = grad_.value();
  r.right = std::sqrt(1.0 + r.T + r.grad_l1_linf + r.T * r.sup_hr) * r.sup_hs;
  r.ratio = r.left_integral == 0.0 ? 0.0 : r.left_integral / r.right;
  return r;
}

SmoothingBoundReport smoothing_bound_report(const Trajectory& traj, double s, double alpha,
                                            const DirectionalWeight& w, const ConeCondition& cone, double r) {
  require_snapshots(traj, "smoothing_bound_report");
  SmoothingBoundAccumulator acc(traj.snapshots.front().u.grid, s, alpha, w, cone, r);
  for (const auto& snap : traj.snapshots) acc.add(snap.t, snap.u);
  return acc.report();
}

void PropagationOptions::validate(int n) const {
  std::vector<std::string> bad;
  if (!(eps > 0.0)) bad.push_back("eps must be positive");
  if (!(tau >= 5.0 * eps)) bad.push_back("tau must be >= 5 eps");
  if (!(r >= 0.0)) bad.push_back("r must be >= 0");
  if (!(channel_r() >= 0.0)) bad.push_back("channel index must be >= 0");
  if (static_cast<int>(nu.size()) != n) bad.push_back("nu must have n entries");
  if (!bad.empty()) {
    std::string msg = "propagation monitor:";
    for (const auto& b : bad) msg += " " + b + ";";
    msg.pop_back();
    throw ConfigError(msg);
  }
}

PropagationAccumulator::PropagationAccumulator(PropagationOptions o, int n) : o_(std::move(o)) { o_.validate(n); }

void PropagationAccumulator::add(double t, const Field& u) {
  const HalfSpace half{o_.nu, o_.beta + o_.eps};
  const Channel chan{o_.nu, o_.beta + o_.eps, o_.beta + o_.tau};
  const double h = localized_sobolev(u, o_.r, half, t, o_.omega);
  const double c = localized_sobolev(u, o_.channel_r(), chan, t, o_.omega);
  out_.times.push_back(t);
  out_.half_space.push_back(h);
  out_.channel.push_back(c);
  out_.sup_half_space = std::max(out_.sup_half_space, h);
  channel_.add(t, c);
  out_.channel_integral = channel_.value();
}

PropagationResult propagation_monitor(const Trajectory& traj, const PropagationOptions& o) {
  require_snapshots(traj, "propagation_monitor");
  PropagationAccumulator acc(o, traj.snapshots.front().u.grid.n);
  for (const auto& snap : traj.snapshots) acc.add(snap.t, snap.u);
  return acc.result();
}

PropagationResult propagation_monitor(const Trajectory& traj, double r, double beta, double eps, double tau,
                                      const std::vector<double>& nu, double omega) {
  PropagationOptions o;
  o.r = r;
  o.beta = beta;
  o.eps = eps;
  o.tau = tau;
  o.nu = nu;
  o.omega = omega;
  return propagation_monitor(traj, o);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_records_csv(std::ostream& os, const std::vector<DiagnosticRecord>& records, const RunMeta& meta) {
  os << "# fzk " << meta.version << " config_hash=" << meta.config_hash << " alpha=" << format_double(meta.alpha)
     << " points=";
  for (int a = 0; a < meta.grid.n; ++a) os << (a ? "x" : "") << meta.grid.points[a];
  os << "\n";
  os << "t,I,M,H";
  if (!records.empty())
    for (const auto& [name, v] : records.front().localized) os << "," << name;
  os << "\n";
  for (const auto& rec : records) {
    if (rec.localized.size() != records.front().localized.size())
      throw ConfigError("csv: records disagree on localized columns");
    os << format_double(rec.t) << "," << format_double(rec.conserved.I) << "," << format_double(rec.conserved.M)
       << "," << format_double(rec.conserved.H);
    for (std::size_t j = 0; j < rec.localized.size(); ++j) {
      if (rec.localized[j].first != records.front().localized[j].first)
        throw ConfigError("csv: records disagree on localized columns");
      os << "," << format_double(rec.localized[j].second);
    }
    os << "\n";
  }
}

} // namespace fzk
