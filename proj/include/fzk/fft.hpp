#pragma once

#include "fzk/grid.hpp"

namespace fzk {

// Continuous-normalized transform: F(xi_k) = h^n sum_j f(x_j) e^{-2 pi i k.(x_j - origin)/L}.
// Phases are taken relative to the box origin.
// Plane waves e^{2 pi i xi.x} land on bin xi, and Parseval holds as
// l2_norm(f) == l2_norm(forward(f)).
SpectralField forward(const Field& f);
SpectralField forward_complex(const Grid& g, const std::vector<cplx>& values);

// Inverse transform. inverse() rejects data whose imaginary part exceeds
// 1e-10 of the output norm; inverse_complex() keeps it.
Field inverse(const SpectralField& F);
std::vector<cplx> inverse_complex(const SpectralField& F);
// As inverse(), with `scale` an upper bound on the output L2 norm used as the
// round-off floor for the imaginary residue test.
Field inverse_checked(const SpectralField& F, double scale);

// In-place variants on raw coefficient/sample arrays of g.size() entries,
// with the same scaling as forward_complex / inverse_complex.
void forward_inplace(const Grid& g, std::vector<cplx>& data);
void inverse_inplace(const Grid& g, std::vector<cplx>& data);

} // namespace fzk
