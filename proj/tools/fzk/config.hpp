#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fzk/grid.hpp"
#include "fzk/solver.hpp"

namespace fzk::cli {

struct GridSpec {
  int n = 2;
  std::vector<int> points{128, 128};
  std::vector<double> length{20.0, 20.0};

  Grid grid() const;  // centred box [-L/2, L/2) per axis
  bool operator==(const GridSpec&) const = default;
};

// One summand of the initial data. Only the fields used by `kind` are read or written.
struct InitialTerm {
  std::string kind = "gaussian";  // gaussian | filtered_step | zk_soliton | noise
  double amplitude = 1.0;
  double width = 1.0;                    // gaussian
  std::vector<double> centre;            // gaussian, zk_soliton; empty means origin
  std::vector<double> nu;                // filtered_step
  double lower = -1.0, upper = 1.0;      // filtered_step slab
  double sigma = 1.0;                    // filtered_step smoothing order
  double transverse_width = 1.0;         // filtered_step
  double speed = 1.0;                    // zk_soliton
  int kmax = 8;                          // noise: largest |k_j|

  bool operator==(const InitialTerm&) const = default;
};

struct SolverSpec {
  double alpha = 1.5;
  double dt = 1e-3;
  double T = 1.0;
  int record_every = 10;
  bool nonlinear = true;
  bool dealias_initial = true;

  SolverConfig config() const;
  bool operator==(const SolverSpec&) const = default;
};

struct LocalizedSpec {
  std::string name;
  std::string region = "half_space";  // half_space | channel | unit_box
  std::vector<double> nu;             // half_space, channel; unit_box drift (optional)
  double beta = 0.0;                  // half_space
  double lower = 0.0, upper = 1.0;    // channel
  std::vector<int> kappa;             // unit_box
  double r = 0.0;
  double omega = 0.0;

  bool operator==(const LocalizedSpec&) const = default;
};

struct SmoothingSpec {
  std::string name;
  double s = 1.0;
  std::vector<double> nu{1.0, 0.0};
  double shift = 0.0;
  double ramp_width = 1.0;
  bool bound = true;        // also compute the bound report
  double eps_cone = 0.0;    // 0 selects the midpoint of the admissible interval
  double C = 1.0;
  double bound_r = -1.0;    // negative selects n/2 + 1/2

  bool operator==(const SmoothingSpec&) const = default;
};

struct PropagationSpec {
  std::string name;
  double r = 1.0;
  double channel_index = -1.0;  // negative selects r + 1
  double beta = 0.0;
  double eps = 0.5;
  double tau = 2.5;
  std::vector<double> nu{1.0, 0.0};
  double omega = 1.0;

  bool operator==(const PropagationSpec&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  GridSpec grid;
  SolverSpec solver;
  std::vector<InitialTerm> initial;
  std::vector<LocalizedSpec> localized;
  std::vector<SmoothingSpec> smoothing;
  std::vector<PropagationSpec> propagation;
  std::string output_directory = "out";
  bool checkpoint = true;
  bool linear_check = false;         // compare with the exact linear flow (needs nonlinear = false)
  std::vector<int> refinement;       // companion runs at these point counts

  bool operator==(const ExperimentConfig&) const = default;
};

// Every violated invariant, one message each.
class ConfigViolations : public std::runtime_error {
public:
  explicit ConfigViolations(std::vector<std::string> v);
  const std::vector<std::string>& violations() const { return v_; }

private:
  std::vector<std::string> v_;
};

// Parse and validate. Throws ConfigViolations.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Messages for every violated invariant; empty when the config is usable.
std::vector<std::string> validate(const ExperimentConfig& c);
// Canonical TOML form; parse_config(to_toml(c)) == c.
std::string to_toml(const ExperimentConfig& c);
// 16 hex digits of FNV-1a over the canonical form with the output directory blanked.
std::string config_hash(const ExperimentConfig& c);

// Initial data on a given grid (the config grid, or a refinement grid).
Field initial_field(const ExperimentConfig& c, const Grid& g);

} // namespace fzk::cli
