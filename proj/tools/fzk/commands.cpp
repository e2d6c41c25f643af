#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <ostream>

#include "fzk/diagnostics.hpp"
#include "fzk/errors.hpp"
#include "fzk/kernel_ops.hpp"
#include "fzk/psido.hpp"
#include "fzk/solver.hpp"
#include "fzk/weights.hpp"

namespace fzk::cli {

int check_cone_command(const std::vector<double>& nu, double alpha, std::optional<int> n,
                       std::optional<double> eps_cone, double C, std::ostream& out) {
  const int dim = n.value_or(static_cast<int>(nu.size()));
  double eps = 0.5;
  if (eps_cone) eps = *eps_cone;
  else if (auto m = midpoint_eps_cone(nu, alpha, dim, C)) eps = *m;
  const ConeCondition cone{nu, alpha, dim, eps, C};
  const auto r = check_cone(cone);
  out << "case " << r.case_id << "\n";
  out << "reason " << r.reason << "\n";
  out << "nu_bar " << format_double(r.nu_bar) << "\n";
  out << "nu_bar_bound " << format_double(r.nu_bar_bound) << "\n";
  out << "eps_cone " << format_double(eps) << "\n";
  out << "eps_upper " << format_double(r.eps_upper) << "\n";
  if (r.case_id == 0) {
    out << "lambda none\n";
    return 1;
  }
  out << "lambda " << format_double(smoothing_lambda(cone)) << "\n";
  return 0;
}

int bessel_table_command(double delta, int n, const std::vector<double>& radii, std::ostream& out) {
  out << "r,kernel,regime,asymptotic,ratio\n";
  const BesselKernel k{delta, n, 1e-10};
  for (double r : radii) {
    const double q = bessel_kernel_quadrature(k, r);
    out << format_double(r) << "," << format_double(q) << ",";
    if (r < 0.1 || r > 10.0) {
      const auto regime = r < 0.1 ? BesselRegime::near_zero : BesselRegime::infinity;
      const double a = bessel_asymptotic(delta, n, regime, r);
      out << (r < 0.1 ? "near_zero" : "infinity") << "," << format_double(a) << "," << format_double(q / a) << "\n";
    } else {
      out << "none,,\n";
    }
  }
  return 0;
}

int psi_series_table_command(double alpha, int J, std::ostream& out) {
  if (J < 1) throw ConfigError("psi-series-table: J must be >= 1");
  out << "rho,J,exact,series,abs_error,last_term\n";
  std::vector<int> ladder;
  for (int j = 1; j < J; j *= 2) ladder.push_back(j);
  ladder.push_back(J);
  for (double rho : {0.0, 0.5, 1.0, 2.0, 5.0, 20.0}) {
    const Point xi{rho / (2.0 * std::numbers::pi), 0.0, 0.0};
    const double exact = k_alpha_multiplier(alpha, xi);
    const double jb = std::pow(1.0 + rho * rho, 0.5 * (alpha - 2.0));
    for (int j : ladder) {
      const auto s = psi_series(alpha, xi, j);
      const double v = jb * s.value;
      out << format_double(rho) << "," << j << "," << format_double(exact) << "," << format_double(v) << ","
          << format_double(std::abs(v - exact)) << "," << format_double(s.last_term) << "\n";
    }
  }
  return 0;
}

int order_probe_command(const std::string& op, double alpha, int points, const std::vector<int>& scales,
                        int probes, std::uint64_t seed, std::ostream& out) {
  const Grid g = Grid::cube(2, points, 2.0 * std::numbers::pi);
  g.validate();
  const WindowedWeight w(DirectionalWeight{{1.0, 0.05}, -0.5, DirectionalProfile(1.0)}, g);
  const CommutatorOperator C(alpha, w.sample_derivative(g, {0, 0, 0}));
  FieldOperator f;
  std::unique_ptr<ExpansionOperator> E;
  if (op == "commutator") {
    f = [&](const Field& x) { return C(x); };
  } else if (op == "minus_p_alpha" || op == "minus_p_alpha_minus_1" || op == "minus_printed") {
    const auto constants = op == "minus_printed" ? ExpansionConstants::printed : ExpansionConstants::derived;
    const auto level = op == "minus_p_alpha" ? ExpansionLevel::full_alpha : ExpansionLevel::alpha_minus_1;
    E = std::make_unique<ExpansionOperator>(build_expansion(alpha, 2, constants), w, g);
    f = [&, level](const Field& x) { return C(x) - E->apply(level, x); };
  } else {
    throw ConfigError("order-probe: unknown op '" + op +
                      "' (commutator, minus_p_alpha, minus_p_alpha_minus_1, minus_printed)");
  }
  OrderProbeOptions o;
  o.probes_per_scale = probes;
  o.seed = seed;
  const auto r = order_probe(f, g, scales, o);
  out << "scale,median_norm\n";
  for (std::size_t i = 0; i < r.scales.size(); ++i)
    out << r.scales[i] << "," << format_double(r.median_norms[i]) << "\n";
  out << "# op=" << op << " alpha=" << format_double(alpha) << " points=" << points << "\n";
  out << "# slope " << format_double(r.slope) << "\n";
  return 0;
}

int convert_checkpoint_command(const std::string& in, const std::string& out_path, std::ostream& log) {
  CheckpointHeader h;
  const Field u = read_checkpoint(in, &h);
  const bool to_ckpt = out_path.size() >= 5 && out_path.compare(out_path.size() - 5, 5, ".ckpt") == 0;
  if (to_ckpt) {
    write_checkpoint(out_path, u, h);
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ConfigError("convert-checkpoint: cannot write '" + out_path + "'");
    f << "# fzk " << FZK_VERSION << " config_hash=" << h.config_hash << " t=" << format_double(h.t)
      << " alpha=" << format_double(h.alpha) << "\n";
    for (int a = 0; a < u.grid.n; ++a) f << "x" << a + 1 << ",";
    f << "u\n";
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Point x = u.grid.position(i);
      for (int a = 0; a < u.grid.n; ++a) f << format_double(x[a]) << ",";
      f << format_double(u[i]) << "\n";
    }
  }
  log << "converted " << in << " -> " << out_path << " (" << u.size() << " samples)\n";
  return 0;
}

} // namespace fzk::cli
