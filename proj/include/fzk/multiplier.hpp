#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "fzk/grid.hpp"

namespace fzk {

using MultiIndex = std::array<int, 3>;

// Fourier multiplier xi -> symbol(xi). `order` is the growth exponent in |xi|.
// `hermitian` declares symbol(-xi) == conj(symbol(xi)), so real input maps to real output.
struct Multiplier {
  std::function<cplx(const Point& xi)> symbol;
  double order = 0.0;
  std::string name;
  bool hermitian = true;

  cplx operator()(const Point& xi) const { return symbol(xi); }
};

// Composition a(D) b(D): symbols multiply, orders add.
Multiplier operator*(const Multiplier& a, const Multiplier& b);
Multiplier scaled(const Multiplier& m, double c);

Multiplier identity_multiplier();
// |2 pi xi|^beta for any beta >= 0 (value 1 at xi = 0 when beta == 0).
Multiplier homogeneous_multiplier(double beta);
// <2 pi xi>^s = (1 + |2 pi xi|^2)^{s/2}.
Multiplier bessel_multiplier(double s);
// prod_j (2 pi i xi_j)^{beta_j}.
Multiplier partial_multiplier(const MultiIndex& beta);

// Symbol sampled on the grid's frequency lattice. For hermitian symbols the
// Nyquist bins (which have no mirror partner) take the symmetrized value
// (s(xi) + s(xi')) / 2, xi' being xi with Nyquist components negated.
// Throws NumericError naming the first xi with a non-finite value.
std::vector<cplx> lattice_symbol(const Multiplier& m, const Grid& g);

SpectralField apply_symbol(const std::vector<cplx>& sym, const SpectralField& F);
// inverse(symbol * forward(f)) with the real-output check.
Field apply_multiplier(const Multiplier& m, const Field& f);
Field apply_lattice_symbol(const std::vector<cplx>& sym, double max_abs_symbol, const Field& f);

// (-Delta)^{alpha/2}, alpha in (0, 2].
Field fractional_laplacian(const Field& f, double alpha);
Field bessel_potential(const Field& f, double s);
Field partial(const Field& f, const MultiIndex& beta);

// 2/3-rule mask: true for retained bins (|k_j| <= N_j/3 on every axis).
std::vector<bool> dealias_mask(const Grid& g);
Field dealias(const Field& f);
// Product with inputs and output truncated to the retained band.
Field dealiased_product(const Field& f, const Field& g);

} // namespace fzk
