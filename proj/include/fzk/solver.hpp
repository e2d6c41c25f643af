#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fzk/grid.hpp"
#include "fzk/multiplier.hpp"

namespace fzk {

// exp(dt i 2 pi xi_1 |2 pi xi|^alpha): exact flow of u_t = d_1 (-Delta)^{alpha/2} u.
Multiplier linear_propagator(double alpha, double dt);

struct SolverConfig {
  double alpha = 1.5;
  double dt = 1e-3;
  double T = 1.0;
  int record_every = 10;       // steps between recorded snapshots
  bool nonlinear = true;       // false drops -u d_1 u
  bool dealias_initial = true; // project u0 onto the retained band before stepping
  bool keep_snapshots = true;
  // Upper limit for dt * max |linear symbol| over the retained band.
  double stability_limit = 50.0;

  // Throws ConfigError on bad parameters or when the guard above fails on g.
  // Returns the guard value dt * max |symbol|.
  double validate(const Grid& g) const;
  int steps() const;
};

struct Conserved {
  double I = 0.0;  // integral of u
  double M = 0.0;  // integral of u^2
  double H = 0.0;  // 1/2 int ((-Delta)^{alpha/4} u)^2 - 1/6 int u^3
  double H_alt = 0.0;  // same with (-Delta)^{alpha/2}; not conserved by the flow
};

Conserved conserved_quantities(const Field& u, double alpha);

struct Snapshot {
  double t = 0.0;
  int step = 0;
  Field u;
};

struct State {
  double t = 0.0;
  Field u;
};

// Integrating-factor RK4 in Fourier space with N(u) = -P(u d_1 u), P the 2/3 truncation.
// Holds scratch buffers, so one instance must not be advanced from two threads at once.
class Stepper {
public:
  Stepper(const Grid& g, const SolverConfig& cfg);
  // Advance the coefficients by one step of size dt.
  void advance(SpectralField& U) const;
  double guard() const { return guard_; }

private:
  // out = dt * N(U)
  void nonlinear(const std::vector<cplx>& U, std::vector<cplx>& out) const;

  Grid grid_;
  bool nonlinear_on_;
  double dt_;
  double guard_;
  std::vector<cplx> e_full_, e_half_, d1_;
  std::vector<bool> mask_;
  mutable std::vector<cplx> a_, b_, c_, d_, tmp_, work_;
};

// One step from s. Builds a Stepper, so prefer solve() for many steps.
State step(const State& s, const SolverConfig& cfg);

struct Trajectory {
  SolverConfig config;
  std::vector<double> times;
  std::vector<Conserved> conserved;
  std::vector<Snapshot> snapshots;  // empty unless keep_snapshots
  std::vector<std::string> warnings;
  int steps = 0;
  double guard = 0.0;
  Field final_state;
};

using SnapshotHook = std::function<void(const Snapshot&)>;

// Runs to T. Hooks see every recorded snapshot, including t = 0 and t = T.
// Throws NumericError naming the time at which a non-finite value appears.
Trajectory solve(const Field& u0, const SolverConfig& cfg, const std::vector<SnapshotHook>& hooks = {});

// Largest |u| on the outermost lattice layer relative to max |u|.
double boundary_ratio(const Field& u);

// Initial data.
Field gaussian(const Grid& g, double amplitude, double width, const Point& centre);
// Indicator of the slab a < nu.x/|nu| < b times a transverse Gaussian of the given width,
// smoothed by J^{-sigma}. The jumps make it H^{1/2 + sigma - 0}.
Field filtered_step(const Grid& g, const std::vector<double>& nu, double a, double b, double sigma,
                    double transverse_width, double amplitude = 1.0);
// Approximate ZK solitary wave (alpha = 2) moving in -x_1: c-scaled sech^2 profile.
Field zk_soliton(const Grid& g, double c, const Point& centre);

// Exponent s* in E(N) ~ N^{-2 s*}, E(N) the energy of the dyadic shell N <= |k| < 2N
// (k integer wavenumbers, N >= 2), so u lies in H^s for s < s*. Shells below
// `floor` times the largest fitted shell are dropped; returns +inf when fewer than two remain.
double measured_sobolev_index(const Field& u, double floor = 1e-24);

// Checkpoint: one line of JSON header, then raw little-endian float64 samples.
struct CheckpointHeader {
  Grid grid;
  double t = 0.0;
  double alpha = 0.0;
  std::string config_hash;
};

void write_checkpoint(const std::string& path, const Field& u, const CheckpointHeader& h);
// Throws ConfigError on malformed files.
Field read_checkpoint(const std::string& path, CheckpointHeader* header = nullptr);

} // namespace fzk
