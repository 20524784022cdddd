#include "core/output_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/errors.hpp"

namespace sgsde {
namespace {

constexpr double kPi = std::numbers::pi;

// Open range of the inner function g for each reciprocal kind.
void inner_range(OutputKind kind, double& lo, double& hi) {
    switch (kind) {
        case OutputKind::ReciprocalArctan:       // pi/2 - atan y
        case OutputKind::ReciprocalArctanShift:  // pi/2 + atan y
            lo = 0.0;
            hi = kPi;
            return;
        case OutputKind::ReciprocalTanh:  // 1 + tanh y
            lo = 0.0;
            hi = 2.0;
            return;
        default:
            lo = hi = 0.0;
            return;
    }
}

bool is_reciprocal(OutputKind kind) {
    return kind == OutputKind::ReciprocalArctan || kind == OutputKind::ReciprocalTanh ||
           kind == OutputKind::ReciprocalArctanShift;
}

std::size_t param_count(OutputKind kind) {
    switch (kind) {
        case OutputKind::Constant: return 1;
        case OutputKind::AffineClamped: return 3;
        default: return 2;
    }
}

}  // namespace

OutputKind output_kind_from_string(const std::string& s) {
    if (s == "constant") return OutputKind::Constant;
    if (s == "affine-clamped") return OutputKind::AffineClamped;
    if (s == "reciprocal-offset-arctan") return OutputKind::ReciprocalArctan;
    if (s == "reciprocal-offset-tanh") return OutputKind::ReciprocalTanh;
    if (s == "reciprocal-offset-atan-shifted") return OutputKind::ReciprocalArctanShift;
    throw ValidationError("unknown output function kind '" + s + "'");
}

std::string to_string(OutputKind kind) {
    switch (kind) {
        case OutputKind::Constant: return "constant";
        case OutputKind::AffineClamped: return "affine-clamped";
        case OutputKind::ReciprocalArctan: return "reciprocal-offset-arctan";
        case OutputKind::ReciprocalTanh: return "reciprocal-offset-tanh";
        case OutputKind::ReciprocalArctanShift: return "reciprocal-offset-atan-shifted";
    }
    return "?";
}

std::string to_string(Monotonicity m) {
    return m == Monotonicity::OrderPreserving ? "order-preserving" : "anti-order-preserving";
}

OutputFunction::OutputFunction(OutputKind kind,
                               std::vector<std::vector<int>> wiring,
                               std::vector<std::vector<double>> params,
                               Monotonicity monotonicity)
    : kind_(kind),
      wiring_(std::move(wiring)),
      params_(std::move(params)),
      monotonicity_(monotonicity) {
    validate();
    const int d = dim();
    bound_ = Vector::Zero(d);
    for (int i = 0; i < d; ++i) {
        const auto& p = params_[i];
        switch (kind_) {
            case OutputKind::Constant:
                bound_(i) = p[0];
                break;
            case OutputKind::AffineClamped:
                bound_(i) = p[2];
                break;
            default: {
                double glo, ghi;
                inner_range(kind_, glo, ghi);
                const double den_a = p[0] + p[1] * glo;
                const double den_b = p[0] + p[1] * ghi;
                bound_(i) = 1.0 / std::min(den_a, den_b);
                break;
            }
        }
    }
}

double OutputFunction::scalar(int i, double y) const {
    const auto& p = params_[i];
    switch (kind_) {
        case OutputKind::Constant:
            return p[0];
        case OutputKind::AffineClamped:
            return std::clamp(p[0] * y + p[1], 0.0, p[2]);
        case OutputKind::ReciprocalArctan:
            return 1.0 / (p[0] + p[1] * (kPi / 2 - std::atan(y)));
        case OutputKind::ReciprocalTanh:
            return 1.0 / (p[0] + p[1] * (1.0 + std::tanh(y)));
        case OutputKind::ReciprocalArctanShift:
            return 1.0 / (p[0] + p[1] * (kPi / 2 + std::atan(y)));
    }
    return 0.0;
}

Vector OutputFunction::evaluate(const Vector& x) const {
    const int d = dim();
    Vector out(d);
    for (int i = 0; i < d; ++i) {
        double y = 0.0;
        for (int j : wiring_[i]) y += x(j);
        out(i) = scalar(i, y);
    }
    return out;
}

void OutputFunction::validate() const {
    const int d = dim();
    if (d == 0) throw ValidationError("output function has no coordinates");
    if (params_.size() != static_cast<std::size_t>(d)) {
        throw ValidationError("output function params must have one entry per coordinate");
    }
    for (int i = 0; i < d; ++i) {
        if (wiring_[i].empty()) {
            throw ValidationError("wiring for output " + std::to_string(i) + " is empty");
        }
        for (int j : wiring_[i]) {
            if (j < 0 || j >= d) {
                throw ValidationError("wiring index " + std::to_string(j) + " for output " +
                                      std::to_string(i) + " out of range [0, " +
                                      std::to_string(d) + ")");
            }
        }
        const auto& p = params_[i];
        if (p.size() != param_count(kind_)) {
            throw ValidationError("output " + std::to_string(i) + ": kind " + to_string(kind_) +
                                  " expects " + std::to_string(param_count(kind_)) +
                                  " parameters, got " + std::to_string(p.size()));
        }
        for (double v : p) {
            if (!std::isfinite(v)) {
                throw ValidationError("output " + std::to_string(i) + ": non-finite parameter");
            }
        }
        if (kind_ == OutputKind::Constant && p[0] < 0.0) {
            throw ValidationError("constant output must be nonnegative");
        }
        if (kind_ == OutputKind::AffineClamped && p[2] < 0.0) {
            throw ValidationError("affine-clamped upper bound must be nonnegative");
        }
        if (is_reciprocal(kind_)) {
            double glo, ghi;
            inner_range(kind_, glo, ghi);
            const double den_a = p[0] + p[1] * glo;
            const double den_b = p[0] + p[1] * ghi;
            if (std::min(den_a, den_b) <= 1e-12) {
                throw ValidationError("output " + std::to_string(i) +
                                      ": denominator can vanish on the reachable range "
                                      "(params c0=" + std::to_string(p[0]) +
                                      ", c1=" + std::to_string(p[1]) + ")");
            }
        }
    }
    // Declared monotonicity must match the sampled derivative sign pattern.
    const double step = 1e-5;
    for (int i = 0; i < d; ++i) {
        for (int s = 0; s <= 64; ++s) {
            const double y = -16.0 + 0.5 * s;
            const double der = (scalar(i, y + step) - scalar(i, y - step)) / (2 * step);
            if (monotonicity_ == Monotonicity::OrderPreserving && der < -1e-9) {
                throw ValidationError("output " + std::to_string(i) +
                                      " declared order-preserving but has negative slope at y=" +
                                      std::to_string(y));
            }
            if (monotonicity_ == Monotonicity::AntiOrderPreserving && der > 1e-9) {
                throw ValidationError("output " + std::to_string(i) +
                                      " declared anti-order-preserving but has positive slope at y=" +
                                      std::to_string(y));
            }
        }
    }
}

}  // namespace sgsde
