#include "fzk/psido.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "fzk/errors.hpp"
#include "fzk/fft.hpp"
#include "fzk/parallel.hpp"

namespace fzk {

namespace {

Multiplier j_alpha_d1(double alpha) { return bessel_multiplier(alpha) * partial_multiplier({1, 0, 0}); }

MultiIndex unit(int j) {
  MultiIndex m{0, 0, 0};
  m[j] = 1;
  return m;
}

MultiIndex add(MultiIndex a, const MultiIndex& b) {
  for (int j = 0; j < 3; ++j) a[j] += b[j];
  return a;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

Field commutator_apply(double alpha, const Field& phi, const Field& f) {
  require_same_grid(phi.grid, f.grid);
  if (!std::isfinite(alpha)) throw DomainError("commutator: alpha must be finite");
  return CommutatorOperator(alpha, phi)(f);
}

Field commutator_apply(double alpha, const WindowedWeight& w, const Field& f) {
  return commutator_apply(alpha, w.sample_derivative(f.grid, {0, 0, 0}), f);
}

Field commutator_apply(double alpha, const DirectionalWeight& w, const Field& f) {
  return commutator_apply(alpha, WindowedWeight(w, f.grid), f);
}

std::array<double, 4> alpha_minus_1_coefficients(double alpha, ExpansionConstants c) {
  if (c == ExpansionConstants::printed) {
    const double tp = 2.0 * std::numbers::pi;
    return {-alpha, -alpha / tp, -alpha / tp, alpha * (alpha - 2.0) / tp};
  }
  return {0.0, -alpha, -alpha / 2.0, alpha * (alpha - 2.0) / 2.0};
}

SymbolExpansion build_expansion(double alpha, int n, ExpansionConstants c) {
  if (n != 2 && n != 3) throw ConfigError("symbol expansion: n must be 2 or 3");
  if (!std::isfinite(alpha)) throw DomainError("symbol expansion: alpha must be finite");
  SymbolExpansion e;
  e.alpha = alpha;
  e.n = n;
  e.constants = c;
  const MultiIndex e1 = unit(0);
  const Multiplier d1 = partial_multiplier(e1);
  const Multiplier jm2 = bessel_multiplier(alpha - 2.0);
  const Multiplier jm4 = bessel_multiplier(alpha - 4.0);

  e.p_alpha.push_back({1.0, e1, bessel_multiplier(alpha), 1});
  e.p_alpha.push_back({-alpha, e1, jm2 * partial_multiplier({2, 0, 0}), 2});
  for (int j = 1; j < n; ++j) e.p_alpha.push_back({-alpha, unit(j), jm2 * partial_multiplier(add(unit(j), e1)), 3});

  const auto k = alpha_minus_1_coefficients(alpha, c);
  for (int j = 0; j < n; ++j) e.p_alpha_minus_1.push_back({k[0], add(e1, unit(j)), d1 * jm2, 1});
  for (int j = 0; j < n; ++j) e.p_alpha_minus_1.push_back({k[1], add(e1, unit(j)), partial_multiplier(unit(j)) * jm2, 2});
  for (int j = 0; j < n; ++j) e.p_alpha_minus_1.push_back({k[2], add(unit(j), unit(j)), d1 * jm2, 3});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      MultiIndex b = add(unit(i), unit(j));
      e.p_alpha_minus_1.push_back({k[3], b, partial_multiplier(add(b, e1)) * jm4, 4});
    }
  return e;
}

Field apply_terms(const std::vector<SymbolTerm>& terms, const WindowedWeight& w, const Field& f) {
  Field out(f.grid, 0.0);
  std::map<MultiIndex, Field> dphi;
  for (const auto& t : terms) {
    if (t.coefficient == 0.0) continue;
    auto it = dphi.find(t.phi_derivative);
    if (it == dphi.end()) it = dphi.emplace(t.phi_derivative, w.sample_derivative(f.grid, t.phi_derivative)).first;
    out = out + t.coefficient * dealiased_product(it->second, apply_multiplier(t.symbol, f));
  }
  return out;
}

Field principal_apply(const SymbolExpansion& e, ExpansionLevel level, const WindowedWeight& w, const Field& f) {
  return ExpansionOperator(e, w, f.grid).apply(level, f);
}

namespace {

double max_modulus(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

} // namespace

CommutatorOperator::CommutatorOperator(double alpha, Field phi) : phi_(std::move(phi)) {
  if (!std::isfinite(alpha)) throw DomainError("commutator: alpha must be finite");
  sym_ = lattice_symbol(j_alpha_d1(alpha), phi_.grid);
  max_sym_ = max_modulus(sym_);
}

Field CommutatorOperator::operator()(const Field& f) const {
  require_same_grid(phi_.grid, f.grid);
  return apply_lattice_symbol(sym_, max_sym_, dealiased_product(phi_, f)) -
         dealiased_product(phi_, apply_lattice_symbol(sym_, max_sym_, f));
}

ExpansionOperator::ExpansionOperator(const SymbolExpansion& e, const WindowedWeight& w, const Grid& g) : grid_(g) {
  if (g.n != e.n) throw ConfigError("symbol expansion: dimension does not match the grid");
  auto build = [&](const std::vector<SymbolTerm>& in, std::vector<Term>& out) {
    for (const auto& t : in) {
      if (t.coefficient == 0.0) continue;
      auto it = dphi_.find(t.phi_derivative);
      if (it == dphi_.end()) it = dphi_.emplace(t.phi_derivative, dealias(w.sample_derivative(g, t.phi_derivative))).first;
      auto sym = lattice_symbol(t.symbol, g);
      double m = max_modulus(sym);
      out.push_back({t.coefficient, &it->second, std::move(sym), m});
    }
  };
  build(e.p_alpha, p_alpha_);
  build(e.p_alpha_minus_1, p_alpha_minus_1_);
}

Field ExpansionOperator::apply_group(const std::vector<Term>& terms, const Field& f) const {
  Field out(grid_, 0.0);
  for (const auto& t : terms)
    out = out + t.coefficient * dealiased_product(*t.dphi, apply_lattice_symbol(t.sym, t.max_sym, f));
  return out;
}

Field ExpansionOperator::apply(ExpansionLevel level, const Field& f) const {
  require_same_grid(grid_, f.grid);
  Field out = apply_group(p_alpha_, f);
  if (level == ExpansionLevel::alpha_minus_1) out = out + apply_group(p_alpha_minus_1_, f);
  return out;
}

Field annular_probe(const Grid& g, int N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uph(0.0, 2.0 * std::numbers::pi);
  SpectralField F(g);
  bool any = false;
  for (std::size_t i = 0; i < F.size(); ++i) {
    auto ix = g.unflatten(i);
    double r2 = 0.0;
    for (int a = 0; a < g.n; ++a) r2 += std::pow(g.wavenumber(a, ix[a]), 2);
    const double r = std::sqrt(r2);
    // The phase is drawn for every bin so that the sequence does not depend on N.
    const double ph = uph(rng);
    if (r >= N && r <= 2.0 * N && !g.on_nyquist(i)) {
      F.coeffs[i] = std::polar(1.0, ph);
      any = true;
    }
  }
  if (!any) throw ConfigError("annular probe: empty annulus");
  auto v = inverse_complex(F);
  Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = v[i].real();
  return (1.0 / l2_norm(f)) * f;
}

OrderProbeResult order_probe(const FieldOperator& op, const Grid& g, const std::vector<int>& scales,
                             const OrderProbeOptions& opt) {
  if (scales.size() < 3) throw ConfigError("order probe: at least three scales are required");
  if (opt.probes_per_scale < 1) throw ConfigError("order probe: probes_per_scale must be positive");
  g.validate();
  for (int N : scales) {
    if (N < 1) throw ConfigError("order probe: scales must be positive");
    for (int a = 0; a < g.n; ++a)
      if (3 * 2 * N >= g.points[a]) throw ConfigError("order probe: scale " + std::to_string(N) + " exceeds the dealiased band");
  }
  const std::size_t P = static_cast<std::size_t>(opt.probes_per_scale);
  std::vector<Field> probes;
  for (std::size_t s = 0; s < scales.size(); ++s)
    for (std::size_t p = 0; p < P; ++p) probes.push_back(annular_probe(g, scales[s], opt.seed + 7919 * s + p));
  std::vector<double> norms(probes.size());
  parallel_for(
      probes.size(),
      [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) norms[i] = l2_norm(op(probes[i]));
      },
      1);

  OrderProbeResult r;
  r.scales = scales;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t s = 0; s < scales.size(); ++s) {
    double m = median({norms.begin() + s * P, norms.begin() + (s + 1) * P});
    if (!(m > 0.0)) throw NumericError("order probe: operator returned a zero or non-finite norm");
    r.median_norms.push_back(m);
    double lx = std::log(scales[s]), ly = std::log(m);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  const double k = static_cast<double>(scales.size());
  r.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return r;
}

PairingResult commutator_pairing(double alpha, const Field& phi, const Field& f) {
  require_same_grid(phi.grid, f.grid);
  const Grid& g = f.grid;
  const auto sym = lattice_symbol(j_alpha_d1(alpha), g);
  // Spectral side of J^alpha d_1 (phi f) - phi J^alpha d_1 f, without forcing real output.
  SpectralField A = apply_symbol(sym, forward(dealiased_product(phi, f)));
  auto inner = inverse_complex(apply_symbol(sym, forward(dealias(f))));
  Field phid = dealias(phi);
  auto mask = dealias_mask(g);
  std::vector<cplx> prod(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) prod[i] = phid[i] * inner[i];
  SpectralField B = forward_complex(g, prod);
  SpectralField F = forward(f);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx Bi = mask[i] ? B.coeffs[i] : 0.0;
    acc += std::conj(F.coeffs[i]) * (A.coeffs[i] - Bi);
  }
  acc /= g.volume();
  return {acc.real(), acc.imag()};
}

} // namespace fzk
