#include "fzk/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "fzk/errors.hpp"
#include "fzk/parallel.hpp"

namespace fzk {
namespace {

using PlanKey = std::tuple<int, int, int, int, int>;

class PlanCache {
public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const Grid& g, int sign) {
    PlanKey key{g.n, g.points[0], g.points[1], g.points[2], sign};
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    if (!threads_ready_) {
      fftw_init_threads();
      threads_ready_ = true;
    }
    fftw_plan_with_nthreads(thread_count());
    std::vector<cplx> scratch(g.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = g.n == 2
                      ? fftw_plan_dft_2d(g.points[0], g.points[1], buf, buf, sign,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED)
                      : fftw_plan_dft_3d(g.points[0], g.points[1], g.points[2], buf, buf, sign,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw NumericError("failed to create FFT plan");
    plans_.emplace(key, p);
    return p;
  }

private:
  std::mutex mu_;
  std::map<PlanKey, fftw_plan> plans_;
  bool threads_ready_ = false;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(const Grid& g, std::vector<cplx>& data, int sign) {
  fftw_plan p = cache().get(g, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, buf, buf);
}

} // namespace

SpectralField forward_complex(const Grid& g, const std::vector<cplx>& values) {
  g.validate();
  if (values.size() != g.size()) throw ConfigError("value count does not match grid");
  SpectralField F(g);
  F.coeffs = values;
  run(g, F.coeffs, FFTW_FORWARD);
  const double s = g.cell_volume();
  for (auto& c : F.coeffs) c *= s;
  return F;
}

SpectralField forward(const Field& f) {
  std::vector<cplx> v(f.values.begin(), f.values.end());
  return forward_complex(f.grid, v);
}

std::vector<cplx> inverse_complex(const SpectralField& F) {
  F.grid.validate();
  if (F.coeffs.size() != F.grid.size()) throw ConfigError("coefficient count does not match grid");
  std::vector<cplx> v = F.coeffs;
  run(F.grid, v, FFTW_BACKWARD);
  const double s = 1.0 / F.grid.volume();
  for (auto& c : v) c *= s;
  return v;
}

void forward_inplace(const Grid& g, std::vector<cplx>& data) {
  if (data.size() != g.size()) throw ConfigError("value count does not match grid");
  run(g, data, FFTW_FORWARD);
  const double s = g.cell_volume();
  for (auto& c : data) c *= s;
}

void inverse_inplace(const Grid& g, std::vector<cplx>& data) {
  if (data.size() != g.size()) throw ConfigError("coefficient count does not match grid");
  run(g, data, FFTW_BACKWARD);
  const double s = 1.0 / g.volume();
  for (auto& c : data) c *= s;
}

Field inverse(const SpectralField& F) { return inverse_checked(F, l2_norm(F)); }

Field inverse_checked(const SpectralField& F, double scale) {
  auto v = inverse_complex(F);
  double re = 0.0, im = 0.0;
  for (const auto& c : v) {
    re += c.real() * c.real();
    im += c.imag() * c.imag();
  }
  // Round-off floor relative to the largest output the data could produce.
  const double floor = 1e-13 * scale / std::sqrt(F.grid.cell_volume());
  if (std::sqrt(im) > 1e-10 * std::sqrt(re) + floor)
    throw NumericError("inverse transform has imaginary residue " +
                       std::to_string(std::sqrt(im / std::max(re, 1e-300))) + " relative to output");
  Field f(F.grid);
  for (std::size_t i = 0; i < v.size(); ++i) f[i] = v[i].real();
  return f;
}

} // namespace fzk
