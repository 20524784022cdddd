#pragma once

#include <optional>
#include <string>

#include "core/config.hpp"

namespace sgsde {

struct RunOptions {
    std::optional<std::uint64_t> seed_override;
    int threads = 0;  // 0: hardware concurrency
};

std::string small_gain_report_json(const SmallGainReport& rep);

// Dispatches one of check | simulate | pullback | equilibrium | stationary,
// writing artifacts into out_dir. Throws ValidationError for configuration
// problems and NumericError for method failures.
void run_command(const std::string& command, const RunConfig& cfg, const std::string& out_dir,
                 const RunOptions& opts = {});

// Runs the full pipeline on a built-in preset and writes a comparison report
// against its reference bounds.
void run_example(const std::string& preset_id, const std::string& out_dir,
                 const RunOptions& opts = {});

}  // namespace sgsde
