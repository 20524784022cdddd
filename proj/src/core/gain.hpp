#pragma once

#include <string>
#include <vector>

#include "core/dynamics.hpp"
#include "core/noise.hpp"
#include "core/system.hpp"
#include "core/trajectory.hpp"

namespace sgsde {

// A random input realized along one noise orbit: values(k) stands for
// u(theta_{t_k} omega) on the grid, confined to [0, N] componentwise.
struct InputProcess {
    std::int64_t k0 = 0;
    double dt = 0.0;
    Matrix values;  // n x d
    Vector bound;   // componentwise N

    std::int64_t size() const { return values.rows(); }
    int dim() const { return static_cast<int>(values.cols()); }
    double time(std::int64_t i) const { return static_cast<double>(k0 + i) * dt; }
    Vector value(std::int64_t i) const { return values.row(i).transpose(); }

    void validate() const;
};

struct FixedPointResult {
    InputProcess u_star;
    int iterations = 0;
    std::vector<double> residuals;  // sup-norm distances between successive iterates
    double rate_estimate = 0.0;     // geometric mean of residual ratios
    Trajectory equilibrium;         // X*(t) = [K(u*)](theta_t omega) on the grid
};

struct VerifyResult {
    double max_deviation = 0.0;  // equilibrium-invariance gap over [t0, t1]
    double pullback_gap = 0.0;   // max over spread initial conditions
};

// Pathwise realization of the input-to-state operator and the gain operator
// on one noise window. The recursion weights match integrate_forward exactly,
// and all metrics (the sup metric rho, stopping rules) are restricted to the
// post-warmup part of the grid, where the truncation of the lower integral
// limit has decayed below tolerance.
class GainOperator {
public:
    // warmup < 0 selects the default: e^{lambda w} < 1e-8, capped at half the
    // available past so short windows keep a nonempty trusted region.
    GainOperator(const SystemSpec& spec, PathView view, double warmup = -1.0);

    const SystemSpec& spec() const { return *spec_; }
    const PathView& view() const { return view_; }
    double dt() const { return view_.dt(); }
    double warmup() const { return static_cast<double>(warmup_steps_) * dt(); }
    std::int64_t warmup_steps() const { return warmup_steps_; }
    double gain() const { return gain_; }  // -L d^2 / lambda

    // X(t) = [K(u)](theta_t omega) over the full window, from X = 0 at the
    // left edge; only values past the warmup are trusted.
    Trajectory apply_K(const InputProcess& u) const;

    // K^h = h after K.
    InputProcess apply_gain(const InputProcess& u) const;

    // sup over post-warmup grid times of the max-norm difference.
    double rho(const InputProcess& a, const InputProcess& b) const;

    double contraction_ratio(const InputProcess& u1, const InputProcess& u2) const;

    FixedPointResult iterate_fixed_point(const InputProcess& u0, double tol, int max_iter) const;

    VerifyResult verify_equilibrium(const FixedPointResult& result, double t0, double t1) const;

    InputProcess constant_input(const Vector& c) const;
    InputProcess zero_input() const;
    InputProcess bound_input() const;    // u = N
    InputProcess default_initial_guess() const;  // h(0), clipped to [0, N]
    InputProcess random_input(std::uint64_t seed) const;  // i.i.d. uniform in [0, N]

private:
    void check_grid(const InputProcess& u) const;

    const SystemSpec* spec_;
    PathView view_;
    Propagator prop_;
    double lambda_ = 0.0;
    double gain_ = 0.0;
    std::int64_t warmup_steps_ = 0;
};

// Free-function forms of the operator surface.
Trajectory apply_K(const SystemSpec& spec, const PathView& view, const InputProcess& u);
InputProcess apply_gain(const SystemSpec& spec, const PathView& view, const InputProcess& u);
double contraction_ratio(const SystemSpec& spec, const PathView& view, const InputProcess& u1,
                         const InputProcess& u2);
FixedPointResult iterate_fixed_point(const SystemSpec& spec, const PathView& view,
                                     const InputProcess& u0, double tol, int max_iter);
VerifyResult verify_equilibrium(const SystemSpec& spec, const PathView& view,
                                const FixedPointResult& result, double t0, double t1);

// Diagnostic: max contraction ratio over random input pairs across several
// independent paths; the sup over one orbit realizes only part of the
// idealized sup over the whole probability space.
double max_contraction_ratio(const SystemSpec& spec, double dt, double t_past, double t_fwd,
                             int n_seeds, int pairs_per_seed, std::uint64_t base_seed);

void save_input_csv(const InputProcess& u, const std::string& filename);
void save_fixed_point_json(const FixedPointResult& result, double gain,
                           const std::string& filename);

}  // namespace sgsde
