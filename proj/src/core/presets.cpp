#include "core/presets.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace sgsde {
namespace {

Preset cooperative_5_1() {
    Matrix a(3, 3);
    a << -1, 1, 0,
          1, -2, 0,
          0, 1, -1;
    // h_i(x_i) = 1 / (6 + (pi/2 - atan x_i)), increasing, L <= 1/36
    OutputFunction h(OutputKind::ReciprocalArctan, {{0}, {1}, {2}},
                     {{6.0, 1.0}, {6.0, 1.0}, {6.0, 1.0}}, Monotonicity::OrderPreserving);
    Preset p{"5.1",
             "stochastic cooperative system",
             SystemSpec(a, 0.2 * Matrix::Identity(3, 3), h, 1.0 / 36.0),
             0.01,
             60.0,
             10.0,
             7,
             (-3.0 + std::sqrt(5.0)) / 2.0,
             1.0 / (2.0 * (3.0 - std::sqrt(5.0))),
             true};
    return p;
}

Preset competitive_5_2() {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 0) = -1;
    a(1, 1) = -2;
    a(2, 2) = -3;
    // h_i(x_{i-1}) = 1 / (5 + tanh x_{i-1}) = 1 / (4 + (1 + tanh)), decreasing, L <= 1/16
    OutputFunction h(OutputKind::ReciprocalTanh, {{2}, {0}, {1}},
                     {{4.0, 1.0}, {4.0, 1.0}, {4.0, 1.0}}, Monotonicity::AntiOrderPreserving);
    Preset p{"5.2",
             "stochastic competitive system",
             SystemSpec(a, 0.2 * Matrix::Identity(3, 3), h, 1.0 / 16.0),
             0.01,
             30.0,
             5.0,
             7,
             -1.0,
             9.0 / 16.0,
             true};
    return p;
}

Preset predator_prey_5_3() {
    const double c = std::cbrt(2.0);
    Matrix a(3, 3);
    a << -1, c, 0,
          0, -2, c,
          c, 0, -4;
    // h_i(x_{i-1}) = 1 / (4 + pi/2 + atan x_{i-1}), decreasing, L <= 1/16
    OutputFunction h(OutputKind::ReciprocalArctanShift, {{2}, {0}, {1}},
                     {{4.0, 1.0}, {4.0, 1.0}, {4.0, 1.0}}, Monotonicity::AntiOrderPreserving);
    Preset p{"5.3",
             "stochastic predator-prey system",
             SystemSpec(a, 0.2 * Matrix::Identity(3, 3), h, 1.0 / 16.0),
             0.01,
             60.0,
             5.0,
             7,
             -2.0 + std::sqrt(2.0),
             9.0 / (16.0 * (2.0 - std::sqrt(2.0))),
             true};
    return p;
}

Preset rotation_6_1() {
    Matrix a(2, 2);
    a << -1, -1,
          1, -1;
    // h_i(x_i) = 1 / (2 + 2 (1 + tanh x_i)); declared global bound L = 1/2 < a = 1
    OutputFunction h(OutputKind::ReciprocalTanh, {{0}, {1}}, {{2.0, 2.0}, {2.0, 2.0}},
                     Monotonicity::AntiOrderPreserving);
    Preset p{"6.1",
             "non-cooperative rotation system",
             SystemSpec(a, 0.1 * Matrix::Identity(2, 2), h, 0.5),
             0.01,
             25.0,
             5.0,
             7,
             -1.0,
             std::numeric_limits<double>::quiet_NaN(),
             false};
    return p;
}

}  // namespace

Preset make_preset(const std::string& id) {
    if (id == "5.1") return cooperative_5_1();
    if (id == "5.2") return competitive_5_2();
    if (id == "5.3") return predator_prey_5_3();
    if (id == "6.1") return rotation_6_1();
    throw ValidationError("unknown preset '" + id + "'; available: 5.1, 5.2, 5.3, 6.1");
}

std::vector<std::string> preset_ids() {
    return {"5.1", "5.2", "5.3", "6.1"};
}

}  // namespace sgsde
