#pragma once

#include <string>
#include <vector>

#include "core/linalg.hpp"

namespace sgsde {

// Built-in catalog of scalar output nonlinearities. Each output coordinate
// h_i applies the catalog function to the sum of the state coordinates
// selected by its wiring entry.
enum class OutputKind {
    Constant,              // h(y) = c
    AffineClamped,         // h(y) = clamp(a*y + b, 0, n)
    ReciprocalArctan,      // h(y) = 1 / (c0 + c1*(pi/2 - atan y))
    ReciprocalTanh,        // h(y) = 1 / (c0 + c1*(1 + tanh y))
    ReciprocalArctanShift  // h(y) = 1 / (c0 + c1*(pi/2 + atan y))
};

enum class Monotonicity { OrderPreserving, AntiOrderPreserving };

OutputKind output_kind_from_string(const std::string& s);
std::string to_string(OutputKind kind);
std::string to_string(Monotonicity m);

class OutputFunction {
public:
    // Validates parameters at construction: a reciprocal denominator that can
    // vanish on the reachable range is a configuration error here, never an
    // evaluation-time surprise. Also checks the declared monotonicity against
    // sampled derivative signs.
    OutputFunction(OutputKind kind,
                   std::vector<std::vector<int>> wiring,
                   std::vector<std::vector<double>> params,
                   Monotonicity monotonicity);

    int dim() const { return static_cast<int>(wiring_.size()); }
    OutputKind kind() const { return kind_; }
    Monotonicity monotonicity() const { return monotonicity_; }
    const Vector& bound() const { return bound_; }  // componentwise sup N
    const std::vector<std::vector<int>>& wiring() const { return wiring_; }
    const std::vector<std::vector<double>>& params() const { return params_; }

    // Scalar catalog function for output coordinate i.
    double scalar(int i, double y) const;

    // h(x): y_i = sum of x over wiring[i], then the scalar function.
    Vector evaluate(const Vector& x) const;

private:
    void validate() const;

    OutputKind kind_;
    std::vector<std::vector<int>> wiring_;
    std::vector<std::vector<double>> params_;
    Monotonicity monotonicity_;
    Vector bound_;
};

}  // namespace sgsde
