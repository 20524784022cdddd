#pragma once

#include <string>

#include "core/noise.hpp"
#include "core/system.hpp"
#include "core/trajectory.hpp"

namespace sgsde {

// Exponential-Euler is the default: the stiff linear part is propagated
// exactly, so the variation-of-constants residual isolates the h-quadrature
// error. Plain Euler-Maruyama stays available for cross-checks.
enum class Scheme { ExponentialEuler, EulerMaruyama };

// Per-(A, dt) weights of the exponential-Euler step
//   X_{k+1} = Phi X_k + Psi h(X_k) + Phi sigma dW_k,
// with Phi = e^{A dt} and Psi = int_0^dt e^{As} ds.
struct Propagator {
    Matrix phi;
    Matrix psi;
    double dt = 0.0;

    static Propagator make(const Matrix& a, double dt);
};

Trajectory integrate_forward(const SystemSpec& spec, const PathView& view, const Vector& x0,
                             double t0, double t1, Scheme scheme = Scheme::ExponentialEuler);

// State at time 0 of the solution started at x at time -t on the same path:
// integrate_forward on shift(path, -t) over [0, t].
Vector pullback(const SystemSpec& spec, const PathView& view, const Vector& x, double t);

// Max over grid t in [0, t1] of the gap between the simulated state and the
// variation-of-constants form Phi(t)x0 + drift quadrature + convolution.
// The drift quadrature uses the exact kernel weights int Phi(t-s) ds with h
// evaluated at the right endpoint (the left endpoint reproduces the scheme
// identically and measures nothing).
double voc_residual(const SystemSpec& spec, const PathView& view, const Vector& x0, double t1);

struct TailEnvelope {
    double tau = 0.0;
    double horizon = 0.0;
    Vector lower;  // componentwise inf over the sampled tail
    Vector upper;  // componentwise sup
    bool under_h = false;
};

// Finite-horizon surrogate of the tail envelopes: componentwise inf/sup of
// pullback(x, t) (or of h thereof) for grid t in [tau, horizon].
TailEnvelope tail_envelopes(const SystemSpec& spec, const PathView& view, const Vector& x,
                            double tau, double horizon, bool under_h);

void save_trajectory_csv(const Trajectory& traj, const std::string& filename);
void save_trajectory_meta_json(const Trajectory& traj, const std::string& filename);

}  // namespace sgsde
