#include "fzk/multiplier.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fzk/errors.hpp"
#include "fzk/fft.hpp"
#include "fzk/parallel.hpp"

namespace fzk {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm2_scaled(const Point& xi) {
  return kTwoPi * kTwoPi * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
}

std::string describe(const Point& xi) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << xi[0] << ", " << xi[1] << ", " << xi[2] << ")";
  return os.str();
}

} // namespace

Multiplier operator*(const Multiplier& a, const Multiplier& b) {
  Multiplier m;
  auto sa = a.symbol, sb = b.symbol;
  m.symbol = [sa, sb](const Point& xi) { return sa(xi) * sb(xi); };
  m.order = a.order + b.order;
  m.name = a.name + "*" + b.name;
  m.hermitian = a.hermitian && b.hermitian;
  return m;
}

Multiplier scaled(const Multiplier& m, double c) {
  Multiplier r = m;
  auto s = m.symbol;
  r.symbol = [s, c](const Point& xi) { return c * s(xi); };
  return r;
}

Multiplier identity_multiplier() {
  return {[](const Point&) { return cplx(1.0, 0.0); }, 0.0, "I", true};
}

Multiplier homogeneous_multiplier(double beta) {
  if (beta < 0.0) throw DomainError("homogeneous multiplier needs beta >= 0");
  return {[beta](const Point& xi) {
            if (beta == 0.0) return cplx(1.0, 0.0);
            return cplx(std::pow(norm2_scaled(xi), 0.5 * beta), 0.0);
          },
          beta, "D^" + std::to_string(beta), true};
}

Multiplier bessel_multiplier(double s) {
  return {[s](const Point& xi) { return cplx(std::pow(1.0 + norm2_scaled(xi), 0.5 * s), 0.0); }, s,
          "J^" + std::to_string(s), true};
}

Multiplier partial_multiplier(const MultiIndex& beta) {
  int total = 0;
  for (int b : beta) {
    if (b < 0) throw DomainError("multi-index entries must be non-negative");
    total += b;
  }
  return {[beta](const Point& xi) {
            cplx v(1.0, 0.0);
            for (int a = 0; a < 3; ++a)
              for (int k = 0; k < beta[a]; ++k) v *= cplx(0.0, kTwoPi * xi[a]);
            return v;
          },
          static_cast<double>(total), "d", true};
}

std::vector<cplx> lattice_symbol(const Multiplier& m, const Grid& g) {
  std::vector<cplx> out(g.size());
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Point xi = g.frequency(i);
      cplx v = m.symbol(xi);
      if (m.hermitian && g.on_nyquist(i)) {
        auto ix = g.unflatten(i);
        Point xm = xi;
        for (int a = 0; a < g.n; ++a)
          if (ix[a] == g.points[a] / 2) xm[a] = -xm[a];
        v = 0.5 * (v + m.symbol(xm));
      }
      out[i] = v;
    }
  });
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!std::isfinite(out[i].real()) || !std::isfinite(out[i].imag()))
      throw NumericError("multiplier " + m.name + " is not finite at xi = " +
                         describe(g.frequency(i)));
  return out;
}

SpectralField apply_symbol(const std::vector<cplx>& sym, const SpectralField& F) {
  if (sym.size() != F.size()) throw ConfigError("symbol size does not match grid");
  SpectralField G = F;
  for (std::size_t i = 0; i < G.size(); ++i) G.coeffs[i] *= sym[i];
  return G;
}

Field apply_lattice_symbol(const std::vector<cplx>& sym, double max_abs_symbol, const Field& f) {
  auto F = forward(f);
  return inverse_checked(apply_symbol(sym, F), max_abs_symbol * l2_norm(F));
}

Field apply_multiplier(const Multiplier& m, const Field& f) {
  auto sym = lattice_symbol(m, f.grid);
  double mx = 0.0;
  for (const auto& c : sym) mx = std::max(mx, std::abs(c));
  if (!m.hermitian) {
    // No real-output guarantee: keep the real part without checking.
    auto v = inverse_complex(apply_symbol(sym, forward(f)));
    Field r(f.grid);
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].real();
    return r;
  }
  return apply_lattice_symbol(sym, mx, f);
}

Field fractional_laplacian(const Field& f, double alpha) {
  if (!(alpha > 0.0) || alpha > 2.0)
    throw DomainError("fractional Laplacian order must lie in (0, 2], got " + std::to_string(alpha));
  return apply_multiplier(homogeneous_multiplier(alpha), f);
}

Field bessel_potential(const Field& f, double s) {
  if (s == 0.0) return f;  // J^0 is the identity
  return apply_multiplier(bessel_multiplier(s), f);
}

Field partial(const Field& f, const MultiIndex& beta) {
  return apply_multiplier(partial_multiplier(beta), f);
}

std::vector<bool> dealias_mask(const Grid& g) {
  std::vector<bool> keep(g.size(), false);
  auto kept = [&g](int axis, int i) { return 3 * std::abs(g.wavenumber(axis, i)) < g.points[axis]; };
  std::size_t idx = 0;
  for (int i = 0; i < g.points[0]; ++i)
    for (int j = 0; j < g.points[1]; ++j)
      for (int k = 0; k < g.points[2]; ++k, ++idx)
        keep[idx] = kept(0, i) && (g.n < 2 || kept(1, j)) && (g.n < 3 || kept(2, k));
  return keep;
}

Field dealias(const Field& f) {
  auto mask = dealias_mask(f.grid);
  auto F = forward(f);
  for (std::size_t i = 0; i < F.size(); ++i)
    if (!mask[i]) F.coeffs[i] = 0.0;
  return inverse(F);
}

Field dealiased_product(const Field& f, const Field& g) {
  require_same_grid(f.grid, g.grid);
  return dealias(pointwise(dealias(f), dealias(g)));
}

} // namespace fzk
