#pragma once

#include <cstdint>

#include "core/linalg.hpp"

namespace sgsde {

struct TrajectoryMeta {
    std::uint64_t seed = 0;
    double dt = 0.0;
    Vector x0;
    double t0 = 0.0;
};

// Uniformly gridded states aligned with the noise-path grid.
struct Trajectory {
    std::int64_t k0 = 0;  // first grid step; times are (k0 + i) * dt
    double dt = 0.0;
    Matrix states;        // n x d
    TrajectoryMeta meta;

    std::int64_t size() const { return states.rows(); }
    int dim() const { return static_cast<int>(states.cols()); }
    double time(std::int64_t i) const { return static_cast<double>(k0 + i) * dt; }
    Vector state(std::int64_t i) const { return states.row(i).transpose(); }
    Vector final_state() const { return states.row(states.rows() - 1).transpose(); }

    // Row index of grid step k; caller guarantees k is inside the window.
    std::int64_t row_of_step(std::int64_t k) const { return k - k0; }
};

}  // namespace sgsde
