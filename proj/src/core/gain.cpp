#include "core/gain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/grid.hpp"
#include "core/jsonio.hpp"
#include "core/rng.hpp"

namespace sgsde {

void InputProcess::validate() const {
    if (values.cols() != bound.size()) {
        throw ValidationError("input process dimension does not match its bound");
    }
    for (std::int64_t i = 0; i < size(); ++i) {
        for (int j = 0; j < dim(); ++j) {
            const double v = values(i, j);
            if (!(v >= -1e-12 && v <= bound(j) + 1e-12)) {
                throw ValidationError("input value " + std::to_string(v) + " at t = " +
                                      std::to_string(time(i)) + " leaves [0, N]");
            }
        }
    }
}

GainOperator::GainOperator(const SystemSpec& spec, PathView view, double warmup)
    : spec_(&spec), view_(std::move(view)), prop_(Propagator::make(spec.a, view_.dt())) {
    lambda_ = spectral_abscissa(spec.a);
    if (!(lambda_ < 0.0)) {
        throw ValidationError("gain operator requires a stable A (spectral abscissa " +
                              std::to_string(lambda_) + " >= 0)");
    }
    gain_ = -spec.lipschitz * spec.d * spec.d / lambda_;
    const double dt = view_.dt();
    const double span_past = -static_cast<double>(view_.first_step()) * dt;
    if (warmup < 0.0) {
        warmup = std::min(recommended_t_past(lambda_, dt), ceil_to_grid(span_past / 2.0, dt));
    }
    warmup_steps_ = to_step(warmup, dt, "warmup");
    if (warmup_steps_ < 0 || view_.first_step() + warmup_steps_ > view_.last_step()) {
        throw ValidationError("warmup " + std::to_string(warmup) +
                              " leaves no trusted grid window");
    }
}

void GainOperator::check_grid(const InputProcess& u) const {
    const std::int64_t n = view_.last_step() - view_.first_step() + 1;
    if (u.k0 != view_.first_step() || u.size() != n || u.dim() != spec_->d ||
        u.dt != view_.dt()) {
        throw ValidationError("input process grid does not match the path window");
    }
}

Trajectory GainOperator::apply_K(const InputProcess& u) const {
    check_grid(u);
    const std::int64_t first = view_.first_step();
    const std::int64_t last = view_.last_step();
    Trajectory traj;
    traj.k0 = first;
    traj.dt = view_.dt();
    traj.states = Matrix::Zero(last - first + 1, spec_->d);
    traj.meta = {view_.base().seed, view_.dt(), Vector::Zero(spec_->d),
                 static_cast<double>(first) * view_.dt()};
    Vector x = Vector::Zero(spec_->d);
    for (std::int64_t k = first; k < last; ++k) {
        x = prop_.phi * x + prop_.psi * u.value(k - first) +
            prop_.phi * (spec_->sigma * view_.increment(k));
        traj.states.row(k + 1 - first) = x.transpose();
    }
    return traj;
}

InputProcess GainOperator::apply_gain(const InputProcess& u) const {
    const Trajectory x = apply_K(u);
    InputProcess out;
    out.k0 = u.k0;
    out.dt = u.dt;
    out.bound = spec_->h.bound();
    out.values = Matrix::Zero(u.size(), spec_->d);
    for (std::int64_t i = 0; i < u.size(); ++i) {
        out.values.row(i) = spec_->h.evaluate(x.state(i)).transpose();
    }
    return out;
}

double GainOperator::rho(const InputProcess& a, const InputProcess& b) const {
    if (a.k0 != b.k0 || a.size() != b.size()) {
        throw ValidationError("rho: mismatched input grids");
    }
    const std::int64_t start = warmup_steps_;
    double sup = 0.0;
    for (std::int64_t i = start; i < a.size(); ++i) {
        sup = std::max(sup, (a.values.row(i) - b.values.row(i)).cwiseAbs().maxCoeff());
    }
    return sup;
}

double GainOperator::contraction_ratio(const InputProcess& u1, const InputProcess& u2) const {
    const double denom = rho(u1, u2);
    if (denom == 0.0) {
        throw ValidationError("contraction ratio undefined: inputs coincide on the "
                              "post-warmup grid");
    }
    return rho(apply_gain(u1), apply_gain(u2)) / denom;
}

FixedPointResult GainOperator::iterate_fixed_point(const InputProcess& u0, double tol,
                                                   int max_iter) const {
    if (!(tol > 0.0)) throw ValidationError("iterate_fixed_point requires tol > 0");
    if (max_iter < 1) throw ValidationError("iterate_fixed_point requires max_iter >= 1");
    if (!(gain_ < 1.0)) {
        throw ValidationError("gain " + std::to_string(gain_) +
                              " is not < 1; consult the small-gain report before iterating");
    }
    check_grid(u0);
    FixedPointResult res;
    InputProcess u = u0;
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        InputProcess next = apply_gain(u);
        const double r = rho(next, u);
        res.residuals.push_back(r);
        u = std::move(next);
        res.iterations = it + 1;
        if (r <= tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "fixed-point iteration did not reach tol = " << tol << " within "
           << max_iter << " iterations; residuals:";
        for (double r : res.residuals) os << ' ' << g17(r);
        throw NumericError(os.str());
    }
    const std::size_t n = res.residuals.size();
    if (n >= 2 && res.residuals.front() > 0.0 && res.residuals.back() > 0.0) {
        res.rate_estimate = std::pow(res.residuals.back() / res.residuals.front(),
                                     1.0 / static_cast<double>(n - 1));
    } else {
        res.rate_estimate = 0.0;
    }
    res.u_star = u;
    res.equilibrium = apply_K(u);
    return res;
}

VerifyResult GainOperator::verify_equilibrium(const FixedPointResult& result, double t0,
                                              double t1) const {
    const double dt = view_.dt();
    const std::int64_t k0 = to_step(t0, dt, "t0");
    const std::int64_t k1 = to_step(t1, dt, "t1");
    const Trajectory& eq = result.equilibrium;
    if (k0 < eq.k0 + warmup_steps_ || k1 > eq.k0 + eq.size() - 1 || k0 >= k1) {
        throw ValidationError("verify window [" + std::to_string(t0) + ", " +
                              std::to_string(t1) + "] is not inside the post-warmup grid");
    }
    VerifyResult out;
    const Trajectory fwd =
        integrate_forward(*spec_, view_, eq.state(eq.row_of_step(k0)), t0, t1);
    for (std::int64_t k = k0; k <= k1; ++k) {
        const double dev =
            (fwd.state(fwd.row_of_step(k)) - eq.state(eq.row_of_step(k))).cwiseAbs().maxCoeff();
        out.max_deviation = std::max(out.max_deviation, dev);
    }

    const double t_pull =
        (-static_cast<double>(view_.first_step()) - static_cast<double>(warmup_steps_)) * dt;
    const Vector x_star0 = eq.state(eq.row_of_step(0));
    std::vector<Vector> starts;
    starts.push_back(Vector::Zero(spec_->d));
    Vector e1 = Vector::Zero(spec_->d);
    e1(0) = 5.0;
    starts.push_back(e1);
    starts.push_back(-e1);
    starts.push_back(Vector::Constant(spec_->d, 5.0));
    starts.push_back(Vector::Constant(spec_->d, -5.0));
    for (const Vector& x : starts) {
        const Vector p = pullback(*spec_, view_, x, t_pull);
        out.pullback_gap = std::max(out.pullback_gap, (p - x_star0).cwiseAbs().maxCoeff());
    }
    return out;
}

InputProcess GainOperator::constant_input(const Vector& c) const {
    InputProcess u;
    u.k0 = view_.first_step();
    u.dt = view_.dt();
    u.bound = spec_->h.bound();
    const std::int64_t n = view_.last_step() - view_.first_step() + 1;
    u.values = Matrix::Zero(n, spec_->d);
    for (std::int64_t i = 0; i < n; ++i) u.values.row(i) = c.transpose();
    u.validate();
    return u;
}

InputProcess GainOperator::zero_input() const {
    return constant_input(Vector::Zero(spec_->d));
}

InputProcess GainOperator::bound_input() const {
    return constant_input(spec_->h.bound());
}

InputProcess GainOperator::default_initial_guess() const {
    Vector c = spec_->h.evaluate(Vector::Zero(spec_->d));
    c = c.cwiseMax(Vector::Zero(spec_->d)).cwiseMin(spec_->h.bound());
    return constant_input(c);
}

InputProcess GainOperator::random_input(std::uint64_t seed) const {
    InputProcess u;
    u.k0 = view_.first_step();
    u.dt = view_.dt();
    u.bound = spec_->h.bound();
    const std::int64_t n = view_.last_step() - view_.first_step() + 1;
    u.values = Matrix::Zero(n, spec_->d);
    for (int j = 0; j < spec_->d; ++j) {
        const CounterRng rng(seed, 0x10000u + static_cast<std::uint64_t>(j));
        for (std::int64_t i = 0; i < n; ++i) {
            u.values(i, j) = u.bound(j) * rng.uniform(static_cast<std::uint64_t>(i));
        }
    }
    return u;
}

Trajectory apply_K(const SystemSpec& spec, const PathView& view, const InputProcess& u) {
    return GainOperator(spec, view).apply_K(u);
}

InputProcess apply_gain(const SystemSpec& spec, const PathView& view, const InputProcess& u) {
    return GainOperator(spec, view).apply_gain(u);
}

double contraction_ratio(const SystemSpec& spec, const PathView& view, const InputProcess& u1,
                         const InputProcess& u2) {
    return GainOperator(spec, view).contraction_ratio(u1, u2);
}

FixedPointResult iterate_fixed_point(const SystemSpec& spec, const PathView& view,
                                     const InputProcess& u0, double tol, int max_iter) {
    return GainOperator(spec, view).iterate_fixed_point(u0, tol, max_iter);
}

VerifyResult verify_equilibrium(const SystemSpec& spec, const PathView& view,
                                const FixedPointResult& result, double t0, double t1) {
    return GainOperator(spec, view).verify_equilibrium(result, t0, t1);
}

double max_contraction_ratio(const SystemSpec& spec, double dt, double t_past, double t_fwd,
                             int n_seeds, int pairs_per_seed, std::uint64_t base_seed) {
    double worst = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
        const auto path = sample_path(base_seed + s, dt, t_past, t_fwd, spec.m);
        const GainOperator op(spec, PathView(path));
        for (int p = 0; p < pairs_per_seed; ++p) {
            const InputProcess u1 = op.random_input(base_seed + 1000003ull * (2 * p + 1));
            const InputProcess u2 = op.random_input(base_seed + 1000003ull * (2 * p + 2));
            worst = std::max(worst, op.contraction_ratio(u1, u2));
        }
    }
    return worst;
}

void save_input_csv(const InputProcess& u, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw IoError("cannot open '" + filename + "' for writing");
    out << "t";
    for (int j = 0; j < u.dim(); ++j) out << ",u_" << (j + 1);
    out << "\n";
    for (std::int64_t i = 0; i < u.size(); ++i) {
        out << g17(u.time(i));
        for (int j = 0; j < u.dim(); ++j) out << ',' << g17(u.values(i, j));
        out << "\n";
    }
}

void save_fixed_point_json(const FixedPointResult& result, double gain,
                           const std::string& filename) {
    JsonWriter w;
    w.begin_object();
    w.key("iterations").value(result.iterations);
    w.key("rate_estimate").value(result.rate_estimate);
    w.key("gain").value(gain);
    w.key("residuals").value(result.residuals);
    w.end_object();
    write_text_file(filename, w.str() + "\n");
}

}  // namespace sgsde
