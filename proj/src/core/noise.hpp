#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "core/linalg.hpp"

namespace sgsde {

// A discretized two-sided Wiener path on the uniform grid k*dt,
// k in [-k_past, k_fwd], anchored at W(0) = 0. The increments are the
// primary objects (they carry the counter-generator keying); the cumulative
// values are their anchored sums. Immutable after creation.
struct NoisePath {
    double dt = 0.0;
    std::int64_t k_past = 0;  // grid covers [-t_past, t_fwd]
    std::int64_t k_fwd = 0;
    int m = 0;
    std::uint64_t seed = 0;
    bool generated = true;  // false for paths loaded from CSV
    Matrix values;          // (k_past + k_fwd + 1) x m, row r = W((r - k_past) * dt)
    Matrix increments;      // (k_past + k_fwd) x m, row r = W over step r - k_past

    double t_past() const { return static_cast<double>(k_past) * dt; }
    double t_fwd() const { return static_cast<double>(k_fwd) * dt; }

    Eigen::RowVectorXd w(std::int64_t k) const { return values.row(k + k_past); }
    Eigen::RowVectorXd dw(std::int64_t k) const { return increments.row(k + k_past); }
};

// Read-only view of a path under the shift theta_s: value at r is
// W(s + r) - W(s). Views compose: shifting by s then s' gives offset s + s'.
class PathView {
public:
    explicit PathView(std::shared_ptr<const NoisePath> base, std::int64_t offset_steps = 0);

    double dt() const { return base_->dt; }
    int noise_dim() const { return base_->m; }
    std::int64_t offset_steps() const { return offset_; }
    const NoisePath& base() const { return *base_; }
    std::shared_ptr<const NoisePath> base_ptr() const { return base_; }

    // Available window in view steps.
    std::int64_t first_step() const { return -base_->k_past - offset_; }
    std::int64_t last_step() const { return base_->k_fwd - offset_; }

    Vector value(std::int64_t r) const;      // W(offset + r) - W(offset)
    Vector increment(std::int64_t r) const;  // W over [r, r+1) in view time

    PathView shifted_steps(std::int64_t s) const;
    PathView shifted(double s) const;

private:
    void require_step(std::int64_t r) const;

    std::shared_ptr<const NoisePath> base_;
    std::int64_t offset_;
};

// Draws a path with i.i.d. N(0, dt) increments from the counter generator
// keyed by (seed, component, absolute step index). Horizons must be
// multiples of dt.
std::shared_ptr<const NoisePath> sample_path(std::uint64_t seed, double dt, double t_past,
                                             double t_fwd, int m);

PathView shift(const PathView& view, double s);
PathView shift(const std::shared_ptr<const NoisePath>& path, double s);

// Raw N(0, dt) increment for (seed, component, absolute step) without
// materializing a path; sample_path is the cumulative sum of these.
double path_increment(std::uint64_t seed, int component, std::int64_t step, double dt);

// N(t) = int_{from}^t Phi(t - s) sigma dW(s) by the exact-propagator
// recursion N(t_{k+1}) = Phi(dt) (N(t_k) + sigma dW_k), N(from) = 0.
// `from` defaults to the left edge of the view window.
Vector stochastic_convolution(const Matrix& a, const Matrix& sigma, const PathView& view,
                              double t);
Vector stochastic_convolution(const Matrix& a, const Matrix& sigma, const PathView& view,
                              double t, double from);

// A priori bound e^{lambda (t - from)} * maxabs(sigma) on the mass lost by
// truncating the convolution's lower limit at `from`.
double convolution_truncation_bound(double lambda, const Matrix& sigma, double t, double from);

// Smallest grid multiple of dt with e^{lambda t} < 1e-8 (the default
// truncation horizon and warm-up length).
double recommended_t_past(double lambda, double dt);

void save_path_csv(const NoisePath& path, const std::string& filename);
std::shared_ptr<const NoisePath> load_path_csv(const std::string& filename);

}  // namespace sgsde
