#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace fzk {

using cplx = std::complex<double>;
using Point = std::array<double, 3>;

// Periodic box with n = 2 or 3 axes. Unused trailing axes have one point.
// Lattice storage is row-major with axis 0 slowest.
struct Grid {
  int n = 2;
  std::array<int, 3> points{1, 1, 1};
  std::array<double, 3> length{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  // Square/cubic box [-L/2, L/2)^n with N points per axis.
  static Grid cube(int n, int N, double L);

  // Throws ConfigError unless n is 2 or 3 and every axis has a power of two >= 8 points.
  void validate() const;

  std::size_t size() const;
  double spacing(int axis) const { return length[axis] / points[axis]; }
  double cell_volume() const;
  double volume() const;

  // Physical coordinate of sample i on an axis.
  double coord(int axis, int i) const { return origin[axis] + i * spacing(axis); }
  // Signed frequency index in [-N/2, N/2) for storage index i.
  int wavenumber(int axis, int i) const;
  // Frequency xi = k / L.
  double freq(int axis, int i) const { return wavenumber(axis, i) / length[axis]; }

  // Decompose a flat index into per-axis indices.
  std::array<int, 3> unflatten(std::size_t idx) const;
  Point position(std::size_t idx) const;
  Point frequency(std::size_t idx) const;
  // True when some axis sits on the Nyquist index -N/2.
  bool on_nyquist(std::size_t idx) const;

  bool operator==(const Grid& o) const;
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0);
  Field(const Grid& g, std::vector<double> v);

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

struct SpectralField {
  Grid grid;
  std::vector<cplx> coeffs;

  SpectralField() = default;
  explicit SpectralField(const Grid& g);

  std::size_t size() const { return coeffs.size(); }
};

// Flat index of the mirrored frequency -k.
std::size_t mirror_index(const Grid& g, std::size_t idx);

// Sample a function of position on the lattice.
template <class F>
Field sample(const Grid& g, F&& fn) {
  Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(g.position(i));
  return f;
}

// Field algebra used throughout the solver and diagnostics.
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
Field pointwise(const Field& a, const Field& b);

double l2_norm(const Field& f);          // sqrt(h^n sum f^2)
double l2_norm(const SpectralField& F);  // sqrt(L^-n sum |F|^2)
double integral(const Field& f);         // h^n sum f
double max_abs(const Field& f);
bool all_finite(const Field& f);
// Throws NumericError naming `what` if any value is NaN or Inf.
void require_finite(const Field& f, const char* what);
void require_same_grid(const Grid& a, const Grid& b);

} // namespace fzk
