#include "core/dynamics.hpp"

#include <cmath>
#include <fstream>

#include "core/errors.hpp"
#include "core/grid.hpp"
#include "core/jsonio.hpp"

namespace sgsde {
namespace {

constexpr double kDivergenceBound = 1e8;

void check_finite_state(const Vector& x, double t) {
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceBound) {
        throw NumericError("trajectory diverged at t = " + std::to_string(t) +
                           " (|state| exceeded 1e8); check the small-gain report");
    }
}

}  // namespace

Propagator Propagator::make(const Matrix& a, double dt) {
    Propagator p;
    p.phi = matrix_exponential(a, dt);
    p.psi = drift_integral(a, dt);
    p.dt = dt;
    return p;
}

Trajectory integrate_forward(const SystemSpec& spec, const PathView& view, const Vector& x0,
                             double t0, double t1, Scheme scheme) {
    const double dt = view.dt();
    const std::int64_t k0 = to_step(t0, dt, "t0");
    const std::int64_t k1 = to_step(t1, dt, "t1");
    if (k0 >= k1) throw ValidationError("integrate_forward requires t0 < t1");
    if (x0.size() != spec.d) throw ValidationError("initial condition has wrong dimension");

    const Propagator prop = Propagator::make(spec.a, dt);
    Trajectory traj;
    traj.k0 = k0;
    traj.dt = dt;
    traj.states = Matrix::Zero(k1 - k0 + 1, spec.d);
    traj.meta = {view.base().seed, dt, x0, t0};
    Vector x = x0;
    traj.states.row(0) = x.transpose();
    for (std::int64_t k = k0; k < k1; ++k) {
        const Vector dw = view.increment(k);
        if (scheme == Scheme::ExponentialEuler) {
            x = prop.phi * x + prop.psi * spec.h.evaluate(x) + prop.phi * (spec.sigma * dw);
        } else {
            x = x + (spec.a * x + spec.h.evaluate(x)) * dt + spec.sigma * dw;
        }
        check_finite_state(x, static_cast<double>(k + 1) * dt);
        traj.states.row(k + 1 - k0) = x.transpose();
    }
    return traj;
}

namespace {

// Final-state-only integration; pullback sweeps call this in a loop.
Vector integrate_final(const SystemSpec& spec, const Propagator& prop, const PathView& view,
                       Vector x, std::int64_t k0, std::int64_t k1) {
    for (std::int64_t k = k0; k < k1; ++k) {
        const Vector dw = view.increment(k);
        x = prop.phi * x + prop.psi * spec.h.evaluate(x) + prop.phi * (spec.sigma * dw);
        check_finite_state(x, static_cast<double>(k + 1) * prop.dt);
    }
    return x;
}

}  // namespace

Vector pullback(const SystemSpec& spec, const PathView& view, const Vector& x, double t) {
    const double dt = view.dt();
    const std::int64_t steps = to_step(t, dt, "t");
    if (steps < 0) throw ValidationError("pullback requires t >= 0");
    if (x.size() != spec.d) throw ValidationError("pullback point has wrong dimension");
    if (steps == 0) return x;
    const PathView shifted_view = view.shifted_steps(-steps);
    const Propagator prop = Propagator::make(spec.a, dt);
    return integrate_final(spec, prop, shifted_view, x, 0, steps);
}

double voc_residual(const SystemSpec& spec, const PathView& view, const Vector& x0, double t1) {
    const double dt = view.dt();
    const std::int64_t n = to_step(t1, dt, "t1");
    if (n < 1) throw ValidationError("voc_residual requires t1 >= dt");
    const Trajectory traj = integrate_forward(spec, view, x0, 0.0, t1);
    const Propagator prop = Propagator::make(spec.a, dt);

    Vector drift = Vector::Zero(spec.d);  // sum of int Phi(t-s) ds over past steps
    Vector conv = Vector::Zero(spec.d);   // noise convolution started at 0
    double residual = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
        drift = prop.phi * drift + prop.psi * spec.h.evaluate(traj.state(k + 1));
        conv = prop.phi * (conv + spec.sigma * view.increment(k));
        const double t = static_cast<double>(k + 1) * dt;
        const Vector reference = matrix_exponential(spec.a, t) * x0 + drift + conv;
        residual = std::max(residual, (traj.state(k + 1) - reference).cwiseAbs().maxCoeff());
    }
    return residual;
}

TailEnvelope tail_envelopes(const SystemSpec& spec, const PathView& view, const Vector& x,
                            double tau, double horizon, bool under_h) {
    const double dt = view.dt();
    const std::int64_t k_tau = to_step(tau, dt, "tau");
    const std::int64_t k_hor = to_step(horizon, dt, "horizon");
    if (k_tau < 0 || k_tau >= k_hor) {
        throw ValidationError("tail_envelopes requires 0 <= tau < horizon");
    }
    const Propagator prop = Propagator::make(spec.a, dt);
    TailEnvelope env;
    env.tau = tau;
    env.horizon = horizon;
    env.under_h = under_h;
    // Tail grid is [tau, horizon): horizon = tau + dt samples exactly one point.
    for (std::int64_t k = k_tau; k < k_hor; ++k) {
        const PathView shifted_view = view.shifted_steps(-k);
        Vector v = integrate_final(spec, prop, shifted_view, x, 0, k);
        if (under_h) v = spec.h.evaluate(v);
        if (k == k_tau) {
            env.lower = v;
            env.upper = v;
        } else {
            env.lower = env.lower.cwiseMin(v);
            env.upper = env.upper.cwiseMax(v);
        }
    }
    return env;
}

void save_trajectory_csv(const Trajectory& traj, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw IoError("cannot open '" + filename + "' for writing");
    out << "t";
    for (int j = 0; j < traj.dim(); ++j) out << ",x_" << (j + 1);
    out << "\n";
    for (std::int64_t i = 0; i < traj.size(); ++i) {
        out << g17(traj.time(i));
        for (int j = 0; j < traj.dim(); ++j) out << ',' << g17(traj.states(i, j));
        out << "\n";
    }
}

void save_trajectory_meta_json(const Trajectory& traj, const std::string& filename) {
    JsonWriter w;
    w.begin_object();
    w.key("seed").value(traj.meta.seed);
    w.key("dt").value(traj.meta.dt);
    w.key("t0").value(traj.meta.t0);
    w.key("x0").value(traj.meta.x0);
    w.key("points").value(static_cast<std::int64_t>(traj.size()));
    w.end_object();
    write_text_file(filename, w.str() + "\n");
}

}  // namespace sgsde
