#include <cstdint>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "fzk/errors.hpp"
#include "run.hpp"

using namespace fzk::cli;

int main(int argc, char** argv) {
  CLI::App app{"Fractional ZK experiment runner"};
  app.set_version_flag("--version", std::string("fzk ") + FZK_VERSION);
  app.require_subcommand(1);

  std::string config_path, output;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "TOML experiment file")->required();
  run->add_option("--output", output, "Output directory (overrides output.directory)");
  run->add_option("--seed", seed, "Seed (overrides seed)");

  std::vector<double> nu;
  double alpha = 1.0, C = 1.0;
  std::optional<int> dim;
  std::optional<double> eps_cone;
  auto* cone = app.add_subcommand("check-cone", "Classify a direction and print lambda");
  cone->add_option("--nu", nu, "Direction, comma separated")->required()->delimiter(',');
  cone->add_option("--alpha", alpha, "Dispersion order")->required();
  cone->add_option("--n", dim, "Dimension (defaults to the length of nu)");
  cone->add_option("--eps-cone", eps_cone, "Cone epsilon (defaults to the admissible midpoint)");
  cone->add_option("--C", C, "Operator-norm constant");

  double delta = 1.0;
  int n = 2;
  std::vector<double> radii;
  auto* bessel = app.add_subcommand("bessel-table", "Bessel kernel quadrature vs asymptotics (CSV)");
  bessel->add_option("--delta", delta)->required();
  bessel->add_option("--n", n)->required();
  bessel->add_option("--radii", radii)->required()->delimiter(',');

  int J = 50;
  auto* psi = app.add_subcommand("psi-series-table", "Signed psi series vs the exact corrector (CSV)");
  psi->add_option("--alpha", alpha)->required();
  psi->add_option("--J", J)->required();

  std::string op = "commutator";
  int points = 256, probes = 8;
  std::vector<int> scales{4, 8, 16, 32};
  std::uint64_t probe_seed = 1;
  auto* probe = app.add_subcommand("order-probe", "Log-log order of the commutator and its remainders");
  probe->add_option("--op", op, "commutator | minus_p_alpha | minus_p_alpha_minus_1 | minus_printed");
  probe->add_option("--alpha", alpha)->required();
  probe->add_option("--points", points, "Points per axis");
  probe->add_option("--scales", scales)->delimiter(',');
  probe->add_option("--probes", probes, "Probes per scale");
  probe->add_option("--seed", probe_seed);

  std::string in_path, out_path;
  auto* conv = app.add_subcommand("convert-checkpoint", "Checkpoint to CSV (or .ckpt copy)");
  conv->add_option("input", in_path)->required();
  conv->add_option("output", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig c;
      try {
        c = load_config(config_path);
        if (!output.empty()) c.output_directory = output;
        if (seed) c.seed = *seed;
        if (auto v = validate(c); !v.empty()) throw ConfigViolations(v);
      } catch (const ConfigViolations& e) {
        std::cerr << error_record("config", e.violations()).dump() << "\n";
        return 2;
      }
      run_experiment(c, std::cout);
      return 0;
    }
    if (*cone) return check_cone_command(nu, alpha, dim, eps_cone, C, std::cout);
    if (*bessel) return bessel_table_command(delta, n, radii, std::cout);
    if (*psi) return psi_series_table_command(alpha, J, std::cout);
    if (*probe) return order_probe_command(op, alpha, points, scales, probes, probe_seed, std::cout);
    if (*conv) return convert_checkpoint_command(in_path, out_path, std::cerr);
  } catch (const fzk::ConfigError& e) {
    std::cerr << error_record("config", {e.what()}).dump() << "\n";
    return 2;
  } catch (const fzk::DomainError& e) {
    std::cerr << error_record("domain", {e.what()}).dump() << "\n";
    return 3;
  } catch (const fzk::NumericError& e) {
    std::cerr << error_record("numeric", {e.what()}).dump() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << error_record("runtime", {e.what()}).dump() << "\n";
    return 5;
  }
  return 1;
}
