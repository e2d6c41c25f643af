#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fzk/grid.hpp"
#include "fzk/solver.hpp"
#include "fzk/weights.hpp"

namespace fzk {

// (J^r u)^2 on the lattice.
Field sobolev_density(const Field& u, double r);
// h^n sum of `density` over lattice points inside the region at time t.
double restricted_integral(const Field& density, const Region& region, double t = 0.0, double omega = 0.0);

// int over the (moving) region of (J^r u)^2. J^r is applied on the whole box first.
// Throws DomainError for r < 0.
double localized_sobolev(const Field& u, double r, const Region& region, double t = 0.0, double omega = 0.0);

// Spatial integrands of the smoothing estimate at one time:
//   gain        = int (J^{s + alpha/2} u)^2 d_1 phi
//   x1          = int (d_1 J^{s + (alpha - 2)/2} u)^2 d_1 phi
//   homogeneous = int (|D|^{s + alpha/2} u)^2 d_1 phi
struct SmoothingIntegrand {
  double gain = 0.0;
  double x1 = 0.0;
  double homogeneous = 0.0;
};

// Multipliers and the weight derivative d_1 phi = nu_1 phi'(nu . x + omega t + shift)
// sampled once per grid. Throws ConfigError if d_1 phi < 0 somewhere on the lattice.
class SmoothingEvaluator {
public:
  SmoothingEvaluator(const Grid& g, double s, double alpha, const DirectionalWeight& w, double omega = 0.0);
  SmoothingIntegrand operator()(const Field& u, double t = 0.0) const;
  // d_1 phi at time t.
  Field weight_derivative(double t) const;

private:
  Grid grid_;
  double alpha_;
  DirectionalWeight w_;
  double omega_;
  std::vector<cplx> gain_sym_, x1_sym_, hom_sym_;
};

SmoothingIntegrand smoothing_integrand(const Field& u, double s, double alpha, const DirectionalWeight& w,
                                       double t = 0.0, double omega = 0.0);

// Trapezoid rule over (t_i, value_i) pairs added in increasing t.
class Trapezoid {
public:
  void add(double t, double v);
  double value() const { return sum_; }
  std::size_t count() const { return n_; }

private:
  double sum_ = 0.0, t_ = 0.0, v_ = 0.0;
  std::size_t n_ = 0;
};

struct SmoothingIntegral {
  double gain_term = 0.0;
  double x1_term = 0.0;
  double homogeneous_term = 0.0;
  std::vector<double> times;
  std::vector<SmoothingIntegrand> integrands;
};

// Streams snapshots into the time integrals.
class SmoothingAccumulator {
public:
  SmoothingAccumulator(const Grid& g, double s, double alpha, const DirectionalWeight& w, double omega = 0.0);
  void add(double t, const Field& u);
  const SmoothingIntegral& result() const { return out_; }

private:
  SmoothingEvaluator eval_;
  Trapezoid gain_, x1_, hom_;
  SmoothingIntegral out_;
};

// Needs the trajectory's snapshots (keep_snapshots = true); throws ConfigError otherwise.
SmoothingIntegral smoothing_integral(const Trajectory& traj, double s, double alpha, const DirectionalWeight& w,
                                     double omega = 0.0);

struct SmoothingBoundReport {
  double lambda = 0.0;
  double T = 0.0;
  double r = 0.0;                 // index of the H^r factor
  std::vector<double> times;
  std::vector<double> left;       // lambda (gain + x1) at each recorded time
  double left_integral = 0.0;     // trapezoid of `left`
  double grad_l1_linf = 0.0;      // int_0^T max |grad u| dt
  double sup_hr = 0.0;            // sup_t ||J^r u||
  double sup_hs = 0.0;            // sup_t ||J^s u||
  double right = 0.0;             // (1 + T + grad_l1_linf + T sup_hr)^{1/2} sup_hs
  double ratio = 0.0;             // left_integral / right, 0 when both vanish
};

class SmoothingBoundAccumulator {
public:
  // r defaults to n/2 + 1/2 when negative. Throws DomainError for inadmissible cones.
  SmoothingBoundAccumulator(const Grid& g, double s, double alpha, const DirectionalWeight& w,
                            const ConeCondition& cone, double r = -1.0);
  void add(double t, const Field& u);
  SmoothingBoundReport report() const;

private:
  SmoothingEvaluator eval_;
  double s_;
  SmoothingBoundReport rep_;
  Trapezoid left_, grad_;
  double t0_ = 0.0;
};

SmoothingBoundReport smoothing_bound_report(const Trajectory& traj, double s, double alpha,
                                            const DirectionalWeight& w, const ConeCondition& cone,
                                            double r = -1.0);

struct PropagationOptions {
  double r = 1.0;               // half-space norm index
  double channel_index = -1.0;  // channel norm index; negative means r + 1
  double beta = 0.0;
  double eps = 0.5;
  double tau = 2.5;
  std::vector<double> nu{1.0, 0.0};
  double omega = 1.0;

  // Throws ConfigError unless eps > 0, tau >= 5 eps, r >= 0 and nu matches n.
  void validate(int n) const;
  double channel_r() const { return channel_index < 0.0 ? r + 1.0 : channel_index; }
};

struct PropagationResult {
  double sup_half_space = 0.0;
  double channel_integral = 0.0;
  std::vector<double> times;
  std::vector<double> half_space;  // int over nu.x + omega t > beta + eps of (J^r u)^2
  std::vector<double> channel;     // int over beta + eps < nu.x + omega t < beta + tau of (J^{channel_r} u)^2
};

class PropagationAccumulator {
public:
  explicit PropagationAccumulator(PropagationOptions o, int n = 2);
  void add(double t, const Field& u);
  const PropagationResult& result() const { return out_; }

private:
  PropagationOptions o_;
  Trapezoid channel_;
  PropagationResult out_;
};

PropagationResult propagation_monitor(const Trajectory& traj, const PropagationOptions& o);
PropagationResult propagation_monitor(const Trajectory& traj, double r, double beta, double eps, double tau,
                                      const std::vector<double>& nu, double omega);

// One row of the per-record CSV.
struct DiagnosticRecord {
  double t = 0.0;
  Conserved conserved;
  std::vector<std::pair<std::string, double>> localized;  // column name, value
};

struct RunMeta {
  Grid grid;
  double alpha = 0.0;
  std::string config_hash;
  std::string version;
};

// "# fzk <version> config_hash=<hash> alpha=<a> points=<N1>x<N2>..." then a header row
// t,I,M,H,<localized names> and one row per record. Throws ConfigError when
// records disagree on localized column names.
void write_records_csv(std::ostream& os, const std::vector<DiagnosticRecord>& records, const RunMeta& meta);

// Shortest round-trip decimal form used for every number the tool writes.
std::string format_double(double v);

} // namespace fzk
