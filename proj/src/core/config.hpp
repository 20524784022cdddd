#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "core/stationary.hpp"
#include "core/system.hpp"

namespace sgsde {

struct GridSpec {
    double dt = 0.0;
    double t_past = 0.0;
    double t_fwd = 0.0;
};

struct SeedSpec {
    std::uint64_t base = 7;
    std::int64_t count = 1;
};

struct CheckParams {
    double t_max = 0.0;  // 0: default 20/|lambda|
    int n_points = 2000;
};

struct SimulateParams {
    Vector x0;
    double t0 = 0.0;
    double t1 = 0.0;
};

struct PullbackParams {
    Vector x;
    double t_max = 0.0;
};

struct EquilibriumParams {
    double tol = 1e-10;
    int max_iter = 200;
};

struct DensityGridParams {
    double min = 0.0;
    double max = 0.0;
    int points = 0;
};

struct StationaryParams {
    SamplingMode mode = SamplingMode::EnsemblePullback;
    std::int64_t samples = 10000;
    double burn_in = -1.0;
    int bins = 0;  // 0: Freedman-Diaconis
    std::optional<DensityGridParams> density;
};

// Fully validated configuration; unknown keys are rejected at parse time and
// numeric fields are checked against their preconditions before any
// computation starts.
struct RunConfig {
    SystemSpec system;
    GridSpec grid;
    SeedSpec seeds;
    CheckParams check;
    std::optional<SimulateParams> simulate;
    std::optional<PullbackParams> pullback;
    EquilibriumParams equilibrium;
    StationaryParams stationary;

    explicit RunConfig(SystemSpec s) : system(std::move(s)) {}
};

RunConfig parse_config(const std::string& json_text);

// Config document equivalent to a built-in preset (round-trips through
// parse_config); shipped under configs/ for reference.
std::string preset_config_json(const std::string& preset_id);

}  // namespace sgsde
