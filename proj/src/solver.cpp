#include "fzk/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fzk/errors.hpp"
#include "fzk/fft.hpp"

namespace fzk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string time_string(double t) {
  std::ostringstream os;
  os.precision(12);
  os << t;
  return os.str();
}

// i 2 pi xi_1 |2 pi xi|^alpha with Nyquist symmetrization.
std::vector<cplx> linear_generator(const Grid& g, double alpha) {
  return lattice_symbol(partial_multiplier({1, 0, 0}) * homogeneous_multiplier(alpha), g);
}

} // namespace

Multiplier linear_propagator(double alpha, double dt) {
  if (!(alpha > 0.0) || alpha > 2.0) throw DomainError("linear propagator: alpha must lie in (0, 2]");
  Multiplier m;
  m.symbol = [alpha, dt](const Point& xi) {
    double r2 = 0.0;
    for (double v : xi) r2 += v * v;
    const double theta = dt * kTwoPi * xi[0] * std::pow(kTwoPi * std::sqrt(r2), alpha);
    return std::polar(1.0, theta);
  };
  m.order = 0.0;
  m.name = "exp(dt d1 D^alpha)";
  m.hermitian = true;
  return m;
}

int SolverConfig::steps() const { return static_cast<int>(std::llround(T / dt)); }

double SolverConfig::validate(const Grid& g) const {
  g.validate();
  if (!(alpha > 0.0) || alpha > 2.0) throw ConfigError("solver: alpha must lie in (0, 2]");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver: dt must be positive");
  if (!(T >= dt) || !std::isfinite(T)) throw ConfigError("solver: T must be at least dt");
  if (std::abs(steps() * dt - T) > 1e-9 * T) throw ConfigError("solver: T must be an integer multiple of dt");
  if (record_every < 1) throw ConfigError("solver: record_every must be positive");
  auto gen = linear_generator(g, alpha);
  auto mask = dealias_mask(g);
  double mx = 0.0;
  for (std::size_t i = 0; i < gen.size(); ++i)
    if (mask[i]) mx = std::max(mx, std::abs(gen[i]));
  const double guard = dt * mx;
  if (guard > stability_limit)
    throw ConfigError("solver: dt * max|symbol| = " + std::to_string(guard) + " exceeds the stability limit " +
                      std::to_string(stability_limit));
  return guard;
}

Conserved conserved_quantities(const Field& u, double alpha) {
  const Grid& g = u.grid;
  Conserved c;
  c.I = integral(u);
  double cube = 0.0, sq = 0.0;
  for (double v : u.values) sq += v * v, cube += v * v * v;
  c.M = sq * g.cell_volume();
  cube *= g.cell_volume();
  auto F = forward(u);
  double e_quarter = 0.0, e_half = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    Point xi = g.frequency(i);
    double r2 = 0.0;
    for (double v : xi) r2 += v * v;
    const double eta = kTwoPi * std::sqrt(r2);
    const double p = std::norm(F.coeffs[i]);
    if (eta > 0.0) {
      e_quarter += std::pow(eta, alpha) * p;
      e_half += std::pow(eta, 2.0 * alpha) * p;
    }
  }
  e_quarter /= g.volume();
  e_half /= g.volume();
  c.H = 0.5 * e_quarter - cube / 6.0;
  c.H_alt = 0.5 * e_half - cube / 6.0;
  return c;
}

Stepper::Stepper(const Grid& g, const SolverConfig& cfg)
    : grid_(g), nonlinear_on_(cfg.nonlinear), dt_(cfg.dt) {
  guard_ = cfg.validate(g);
  auto gen = linear_generator(g, cfg.alpha);
  e_full_.resize(gen.size());
  e_half_.resize(gen.size());
  for (std::size_t i = 0; i < gen.size(); ++i) {
    // The generator is purely imaginary; exponentiate its phase for unit modulus.
    const double w = gen[i].imag();
    e_full_[i] = std::polar(1.0, dt_ * w);
    e_half_[i] = std::polar(1.0, 0.5 * dt_ * w);
  }
  d1_ = lattice_symbol(partial_multiplier({1, 0, 0}), g);
  mask_ = dealias_mask(g);
  for (auto* v : {&a_, &b_, &c_, &d_, &tmp_, &work_}) v->assign(g.size(), cplx(0.0));
}

void Stepper::nonlinear(const std::vector<cplx>& U, std::vector<cplx>& out) const {
  const std::size_t n = U.size();
  if (!nonlinear_on_) {
    std::fill(out.begin(), out.end(), cplx(0.0));
    return;
  }
  // One inverse transform of U + i d_1 U yields u + i u_x, both real.
  for (std::size_t i = 0; i < n; ++i) work_[i] = U[i] + cplx(0.0, 1.0) * (d1_[i] * U[i]);
  inverse_inplace(grid_, work_);
  for (std::size_t i = 0; i < n; ++i) out[i] = -work_[i].real() * work_[i].imag();
  forward_inplace(grid_, out);
  for (std::size_t i = 0; i < n; ++i) out[i] = mask_[i] ? dt_ * out[i] : cplx(0.0);
}

void Stepper::advance(SpectralField& U) const {
  require_same_grid(U.grid, grid_);
  auto& u = U.coeffs;
  const std::size_t n = u.size();
  nonlinear(u, a_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = e_half_[i] * (u[i] + 0.5 * a_[i]);
  nonlinear(tmp_, b_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = e_half_[i] * u[i] + 0.5 * b_[i];
  nonlinear(tmp_, c_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = e_full_[i] * u[i] + e_half_[i] * c_[i];
  nonlinear(tmp_, d_);
  for (std::size_t i = 0; i < n; ++i)
    u[i] = e_full_[i] * u[i] + (e_full_[i] * a_[i] + 2.0 * e_half_[i] * (b_[i] + c_[i]) + d_[i]) / 6.0;
}

namespace {

Field to_field(const SpectralField& U, double t) {
  Field u(U.grid);
  auto v = inverse_complex(U);
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = v[i].real();
  if (!all_finite(u)) throw NumericError("solver: non-finite values at t = " + time_string(t));
  return u;
}

bool finite_coeffs(const SpectralField& U) {
  for (const auto& c : U.coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

} // namespace

State step(const State& s, const SolverConfig& cfg) {
  require_finite(s.u, "solver state");
  Stepper st(s.u.grid, cfg);
  SpectralField U = forward(s.u);
  st.advance(U);
  const double t = s.t + cfg.dt;
  if (!finite_coeffs(U)) throw NumericError("solver: non-finite values at t = " + time_string(t));
  return {t, to_field(U, t)};
}

double boundary_ratio(const Field& u) {
  const Grid& g = u.grid;
  const double mx = max_abs(u);
  if (mx == 0.0) return 0.0;
  double edge = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto ix = g.unflatten(i);
    bool outer = false;
    for (int a = 0; a < g.n; ++a)
      if (ix[a] == 0 || ix[a] == g.points[a] - 1) outer = true;
    if (outer) edge = std::max(edge, std::abs(u[i]));
  }
  return edge / mx;
}

Trajectory solve(const Field& u0, const SolverConfig& cfg, const std::vector<SnapshotHook>& hooks) {
  require_finite(u0, "initial data");
  Stepper st(u0.grid, cfg);
  Trajectory tr;
  tr.config = cfg;
  tr.guard = st.guard();
  SpectralField U = forward(u0);
  if (cfg.dealias_initial) {
    auto mask = dealias_mask(u0.grid);
    for (std::size_t i = 0; i < U.size(); ++i)
      if (!mask[i]) U.coeffs[i] = 0.0;
  }
  const int nsteps = cfg.steps();
  bool warned = false;
  auto record = [&](int k, const Field& u) {
    const double t = k * cfg.dt;
    tr.times.push_back(t);
    tr.conserved.push_back(conserved_quantities(u, cfg.alpha));
    Snapshot snap{t, k, u};
    for (const auto& hook : hooks) hook(snap);
    if (!warned && boundary_ratio(u) > 1e-6) {
      tr.warnings.push_back("boundary contamination: |u| at the box edge exceeds 1e-6 max|u| at t = " +
                            time_string(t));
      warned = true;
    }
    if (cfg.keep_snapshots) tr.snapshots.push_back(std::move(snap));
  };
  record(0, to_field(U, 0.0));
  for (int k = 1; k <= nsteps; ++k) {
    st.advance(U);
    if (!finite_coeffs(U)) throw NumericError("solver: non-finite values at t = " + time_string(k * cfg.dt));
    if (k % cfg.record_every == 0 || k == nsteps) record(k, to_field(U, k * cfg.dt));
  }
  tr.steps = nsteps;
  tr.final_state = to_field(U, nsteps * cfg.dt);
  return tr;
}

Field gaussian(const Grid& g, double amplitude, double width, const Point& centre) {
  if (!(width > 0.0)) throw ConfigError("gaussian: width must be positive");
  return sample(g, [&](const Point& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.n; ++a) r2 += (x[a] - centre[a]) * (x[a] - centre[a]);
    return amplitude * std::exp(-0.5 * r2 / (width * width));
  });
}

Field filtered_step(const Grid& g, const std::vector<double>& nu, double a, double b, double sigma,
                    double transverse_width, double amplitude) {
  if (static_cast<int>(nu.size()) != g.n) throw ConfigError("filtered step: nu has wrong dimension");
  if (!(b > a)) throw ConfigError("filtered step: slab needs b > a");
  if (!(sigma >= 0.0)) throw ConfigError("filtered step: sigma must be nonnegative");
  if (!(transverse_width > 0.0)) throw ConfigError("filtered step: transverse width must be positive");
  double nn = 0.0;
  for (double v : nu) nn += v * v;
  nn = std::sqrt(nn);
  if (nn == 0.0) throw ConfigError("filtered step: nu must be nonzero");
  Field raw = sample(g, [&](const Point& x) {
    double y = 0.0, r2 = 0.0;
    for (int j = 0; j < g.n; ++j) y += nu[j] * x[j] / nn;
    for (int j = 0; j < g.n; ++j) {
      double p = x[j] - y * nu[j] / nn;
      r2 += p * p;
    }
    return (a < y && y < b) ? amplitude * std::exp(-0.5 * r2 / (transverse_width * transverse_width)) : 0.0;
  });
  return bessel_potential(raw, -sigma);
}

Field zk_soliton(const Grid& g, double c, const Point& centre) {
  if (!(c > 0.0)) throw ConfigError("zk soliton: speed must be positive");
  return sample(g, [&](const Point& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.n; ++a) r2 += (x[a] - centre[a]) * (x[a] - centre[a]);
    const double s = 1.0 / std::cosh(0.5 * std::sqrt(c * r2));
    return -3.0 * c * s * s;
  });
}

double measured_sobolev_index(const Field& u, double floor) {
  const Grid& g = u.grid;
  auto F = forward(u);
  auto mask = dealias_mask(g);
  int kmax = g.points[0];
  for (int a = 0; a < g.n; ++a) kmax = std::min(kmax, g.points[a]);
  kmax = (kmax - 1) / 3;  // largest retained wavenumber on every axis
  std::vector<double> shells(32, 0.0);
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (!mask[i]) continue;
    auto ix = g.unflatten(i);
    double r2 = 0.0;
    for (int a = 0; a < g.n; ++a) r2 += std::pow(g.wavenumber(a, ix[a]), 2);
    const double r = std::sqrt(r2);
    if (r < 2.0 || r >= kmax) continue;
    shells[static_cast<int>(std::floor(std::log2(r)))] += std::norm(F.coeffs[i]);
  }
  std::vector<double> xs, ys;
  double peak = 0.0;
  for (int j = 1; j < 32 && (2 << j) <= kmax; ++j) peak = std::max(peak, shells[j]);
  for (int j = 1; j < 32 && (2 << j) <= kmax; ++j)
    if (shells[j] > floor * peak && shells[j] > 0.0) {
      xs.push_back(std::log(std::ldexp(1.0, j)));
      ys.push_back(std::log(shells[j]));
    }
  if (xs.size() < 2) return std::numeric_limits<double>::infinity();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i], sxx += xs[i] * xs[i], sxy += xs[i] * ys[i];
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -0.5 * slope;
}

void write_checkpoint(const std::string& path, const Field& u, const CheckpointHeader& h) {
  require_same_grid(u.grid, h.grid);
  nlohmann::json j;
  j["format"] = "fzk-checkpoint";
  j["version"] = 1;
  j["dtype"] = "float64-le";
  j["grid"] = {{"n", h.grid.n},
               {"points", std::vector<int>(h.grid.points.begin(), h.grid.points.begin() + h.grid.n)},
               {"length", std::vector<double>(h.grid.length.begin(), h.grid.length.begin() + h.grid.n)},
               {"origin", std::vector<double>(h.grid.origin.begin(), h.grid.origin.begin() + h.grid.n)}};
  j["t"] = h.t;
  j["alpha"] = h.alpha;
  j["config_hash"] = h.config_hash;
  j["count"] = u.size();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("checkpoint: cannot open '" + path + "' for writing");
  out << j.dump() << '\n';
  std::vector<unsigned char> bytes(u.size() * 8);
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(u[i]);
    for (int b = 0; b < 8; ++b) bytes[8 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("checkpoint: write to '" + path + "' failed");
}

Field read_checkpoint(const std::string& path, CheckpointHeader* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("checkpoint: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("checkpoint: missing header");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: bad header: ") + e.what());
  }
  if (j.value("format", "") != "fzk-checkpoint" || j.value("version", 0) != 1 ||
      j.value("dtype", "") != "float64-le")
    throw ConfigError("checkpoint: unsupported format");
  CheckpointHeader h;
  try {
    const auto& jg = j.at("grid");
    h.grid.n = jg.at("n").get<int>();
    if (h.grid.n != 2 && h.grid.n != 3) throw ConfigError("checkpoint: bad dimension");
    for (int a = 0; a < h.grid.n; ++a) {
      h.grid.points[a] = jg.at("points").at(a).get<int>();
      h.grid.length[a] = jg.at("length").at(a).get<double>();
      h.grid.origin[a] = jg.at("origin").at(a).get<double>();
    }
    h.t = j.at("t").get<double>();
    h.alpha = j.at("alpha").get<double>();
    h.config_hash = j.at("config_hash").get<std::string>();
    h.grid.validate();
    if (j.at("count").get<std::size_t>() != h.grid.size()) throw ConfigError("checkpoint: count mismatch");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: bad header: ") + e.what());
  }
  std::vector<unsigned char> bytes(h.grid.size() * 8);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw ConfigError("checkpoint: truncated data");
  if (in.peek() != std::char_traits<char>::eof()) throw ConfigError("checkpoint: trailing bytes");
  Field u(h.grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[8 * i + b]) << (8 * b);
    u[i] = std::bit_cast<double>(bits);
  }
  if (header) *header = h;
  return u;
}

} // namespace fzk
