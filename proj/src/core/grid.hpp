#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "core/errors.hpp"

namespace sgsde {

// All time bookkeeping is done in integer grid steps so that paths, inputs
// and trajectories align exactly. A time t is grid-aligned when t/dt is an
// integer up to relative slack 1e-9.
inline std::int64_t to_step(double t, double dt, const std::string& field) {
    const double q = t / dt;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) {
        throw ValidationError(field + " = " + std::to_string(t) +
                                  " is not a multiple of dt = " + std::to_string(dt),
                              field);
    }
    return static_cast<std::int64_t>(r);
}

inline double ceil_to_grid(double t, double dt) {
    return std::ceil(t / dt - 1e-9) * dt;
}

}  // namespace sgsde
