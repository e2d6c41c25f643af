#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace fzk::cli {

// Runs the experiment and its refinement companions, writing into the output
// directory: records.csv, summary.json, final.ckpt (unless disabled) and
// records_N<points>.csv per companion. Progress lines go to `log`.
nlohmann::json run_experiment(const ExperimentConfig& c, std::ostream& log);

// Machine-readable error record printed by `fzk run` on failure.
nlohmann::json error_record(const std::string& kind, const std::vector<std::string>& messages);

} // namespace fzk::cli
