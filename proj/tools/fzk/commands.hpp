#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fzk::cli {

// Each returns the process exit code.

// Case, reason and lambda for a direction. eps_cone defaults to the midpoint of its admissible interval.
int check_cone_command(const std::vector<double>& nu, double alpha, std::optional<int> n,
                       std::optional<double> eps_cone, double C, std::ostream& out);

// CSV r,kernel,regime,asymptotic,ratio. Asymptotic columns are empty between the two regimes.
int bessel_table_command(double delta, int n, const std::vector<double>& radii, std::ostream& out);

// CSV rho,J,exact,series,abs_error,last_term for rho = |2 pi xi| in a fixed sample and
// J on a doubling ladder up to `J`.
int psi_series_table_command(double alpha, int J, std::ostream& out);

// op: commutator | minus_p_alpha | minus_p_alpha_minus_1 | minus_printed.
// Tilted weight on [-pi, pi)^2; prints scale,median_norm rows then the slope.
int order_probe_command(const std::string& op, double alpha, int points, const std::vector<int>& scales,
                        int probes, std::uint64_t seed, std::ostream& out);

// Checkpoint to CSV with coordinates, or a checkpoint copy when `out` ends in .ckpt.
int convert_checkpoint_command(const std::string& in, const std::string& out_path, std::ostream& log);

} // namespace fzk::cli
