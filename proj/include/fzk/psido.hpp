#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fzk/grid.hpp"
#include "fzk/multiplier.hpp"
#include "fzk/weights.hpp"

namespace fzk {

// [J^alpha d_1; phi] f = J^alpha d_1 (phi f) - phi J^alpha d_1 f with dealiased products.
Field commutator_apply(double alpha, const Field& phi, const Field& f);
// phi sampled from the windowed weight on f's grid.
Field commutator_apply(double alpha, const WindowedWeight& w, const Field& f);
Field commutator_apply(double alpha, const DirectionalWeight& w, const Field& f);

// One term (coefficient) * d^beta phi * m(D) f.
struct SymbolTerm {
  double coefficient = 1.0;
  MultiIndex phi_derivative{0, 0, 0};
  Multiplier symbol;
  int group = 0;  // 1-based term group within its order
};

enum class ExpansionConstants {
  derived,  // from the composition formula; removes the order alpha-1 part
  printed,  // -alpha, -alpha/(2 pi), -alpha/(2 pi), alpha(alpha-2)/(2 pi)
};

struct SymbolExpansion {
  double alpha = 1.0;
  int n = 2;
  ExpansionConstants constants = ExpansionConstants::derived;
  std::vector<SymbolTerm> p_alpha;          // three groups
  std::vector<SymbolTerm> p_alpha_minus_1;  // four groups
};

SymbolExpansion build_expansion(double alpha, int n, ExpansionConstants c = ExpansionConstants::derived);
// Group coefficients of the order alpha-1 part.
std::array<double, 4> alpha_minus_1_coefficients(double alpha, ExpansionConstants c);

enum class ExpansionLevel {
  full_alpha,     // p_alpha
  alpha_minus_1,  // p_alpha + p_(alpha-1)
};

Field apply_terms(const std::vector<SymbolTerm>& terms, const WindowedWeight& w, const Field& f);
Field principal_apply(const SymbolExpansion& e, ExpansionLevel level, const WindowedWeight& w, const Field& f);

// Commutator with the lattice symbol and phi fixed, for repeated application.
class CommutatorOperator {
public:
  CommutatorOperator(double alpha, Field phi);
  Field operator()(const Field& f) const;

private:
  Field phi_;
  std::vector<cplx> sym_;
  double max_sym_ = 0.0;
};

// Expansion with derivative fields and lattice symbols sampled once on a grid.
class ExpansionOperator {
public:
  ExpansionOperator(const SymbolExpansion& e, const WindowedWeight& w, const Grid& g);
  Field apply(ExpansionLevel level, const Field& f) const;

private:
  struct Term {
    double coefficient;
    const Field* dphi;
    std::vector<cplx> sym;
    double max_sym;
  };
  Field apply_group(const std::vector<Term>& terms, const Field& f) const;

  Grid grid_;
  std::map<MultiIndex, Field> dphi_;
  std::vector<Term> p_alpha_, p_alpha_minus_1_;
};

using FieldOperator = std::function<Field(const Field&)>;

struct OrderProbeOptions {
  int probes_per_scale = 8;
  std::uint64_t seed = 1;
};

struct OrderProbeResult {
  std::vector<int> scales;
  std::vector<double> median_norms;
  double slope = 0.0;
};

// Unit-L2 real field with random phases on the lattice annulus N <= |k| <= 2N,
// k the integer wavenumber vector.
Field annular_probe(const Grid& g, int N, std::uint64_t seed);

// Least-squares slope of log median ||op(probe_N)|| against log N.
// Needs at least three scales and 2N inside the dealiased band.
OrderProbeResult order_probe(const FieldOperator& op, const Grid& g, const std::vector<int>& scales,
                             const OrderProbeOptions& opt = {});

// Re <f, [J^alpha d_1; phi] f> and Im of the same pairing computed on the spectral side.
struct PairingResult {
  double real = 0.0;
  double imag = 0.0;
};
PairingResult commutator_pairing(double alpha, const Field& phi, const Field& f);

} // namespace fzk
