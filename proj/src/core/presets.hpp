#pragma once

#include <string>
#include <vector>

#include "core/system.hpp"

namespace sgsde {

// Built-in example systems with their closed-form spectral bounds and gains.
struct Preset {
    std::string id;
    std::string title;
    SystemSpec spec;
    double dt = 0.0;
    double t_past = 0.0;
    double t_fwd = 0.0;
    std::uint64_t seed = 0;
    double expected_lambda = 0.0;
    double expected_gain = 0.0;  // NaN when the small-gain route does not apply
    bool expect_cooperative = false;
};

Preset make_preset(const std::string& id);
std::vector<std::string> preset_ids();

}  // namespace sgsde
