#include "fzk/grid.hpp"

#include <cmath>
#include <string>

#include "fzk/errors.hpp"

namespace fzk {

Grid Grid::cube(int n, int N, double L) {
  Grid g;
  g.n = n;
  for (int a = 0; a < 3; ++a) {
    bool used = a < n;
    g.points[a] = used ? N : 1;
    g.length[a] = used ? L : 1.0;
    g.origin[a] = used ? -0.5 * L : 0.0;
  }
  g.validate();
  return g;
}

void Grid::validate() const {
  if (n != 2 && n != 3) throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(n));
  for (int a = 0; a < 3; ++a) {
    if (a >= n) {
      if (points[a] != 1) throw ConfigError("unused grid axis must have one point");
      continue;
    }
    int N = points[a];
    if (N < 8 || (N & (N - 1)) != 0)
      throw ConfigError("grid axis " + std::to_string(a) + " needs a power of two >= 8 points, got " +
                        std::to_string(N));
    if (!(length[a] > 0.0) || !std::isfinite(length[a]))
      throw ConfigError("grid axis " + std::to_string(a) + " needs a positive finite length");
  }
}

std::size_t Grid::size() const {
  return static_cast<std::size_t>(points[0]) * points[1] * points[2];
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < n; ++a) v *= spacing(a);
  return v;
}

double Grid::volume() const {
  double v = 1.0;
  for (int a = 0; a < n; ++a) v *= length[a];
  return v;
}

int Grid::wavenumber(int axis, int i) const {
  int N = points[axis];
  return i < N / 2 ? i : i - N;
}

std::array<int, 3> Grid::unflatten(std::size_t idx) const {
  std::array<int, 3> ix{};
  ix[2] = static_cast<int>(idx % points[2]);
  idx /= points[2];
  ix[1] = static_cast<int>(idx % points[1]);
  ix[0] = static_cast<int>(idx / points[1]);
  return ix;
}

Point Grid::position(std::size_t idx) const {
  auto ix = unflatten(idx);
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) p[a] = coord(a, ix[a]);
  return p;
}

Point Grid::frequency(std::size_t idx) const {
  auto ix = unflatten(idx);
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) p[a] = freq(a, ix[a]);
  return p;
}

bool Grid::on_nyquist(std::size_t idx) const {
  auto ix = unflatten(idx);
  for (int a = 0; a < n; ++a)
    if (ix[a] == points[a] / 2) return true;
  return false;
}

bool Grid::operator==(const Grid& o) const {
  return n == o.n && points == o.points && length == o.length && origin == o.origin;
}

std::size_t mirror_index(const Grid& g, std::size_t idx) {
  auto ix = g.unflatten(idx);
  std::size_t out = 0;
  for (int a = 0; a < 3; ++a) {
    int N = g.points[a];
    int m = (N - ix[a]) % N;
    out = out * N + m;
  }
  return out;
}

Field::Field(const Grid& g, double fill) : grid(g), values(g.size(), fill) {}

Field::Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != g.size()) throw ConfigError("field value count does not match grid");
}

SpectralField::SpectralField(const Grid& g) : grid(g), coeffs(g.size(), cplx(0.0, 0.0)) {}

void require_same_grid(const Grid& a, const Grid& b) {
  if (a != b) throw ConfigError("grid mismatch between operands");
}

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid);
  Field r(a.grid);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Field operator-(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid);
  Field r(a.grid);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Field operator*(double s, const Field& a) {
  Field r(a.grid);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = s * a[i];
  return r;
}

Field pointwise(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid);
  Field r(a.grid);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] * b[i];
  return r;
}

double l2_norm(const Field& f) {
  double s = 0.0;
  for (double v : f.values) s += v * v;
  return std::sqrt(s * f.grid.cell_volume());
}

double l2_norm(const SpectralField& F) {
  double s = 0.0;
  for (const auto& c : F.coeffs) s += std::norm(c);
  return std::sqrt(s / F.grid.volume());
}

double integral(const Field& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell_volume();
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const Field& f) {
  for (double v : f.values)
    if (!std::isfinite(v)) return false;
  return true;
}

void require_finite(const Field& f, const char* what) {
  if (!all_finite(f)) throw NumericError(std::string("non-finite values in ") + what);
}

} // namespace fzk
