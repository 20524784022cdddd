#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/gain.hpp"
#include "core/grid.hpp"
#include "core/presets.hpp"
#include "core/rng.hpp"
#include "core/system.hpp"

using namespace sgsde;

namespace {

SystemSpec constant_h_system(const Matrix& a, const Matrix& sigma, const Vector& c) {
    const int d = static_cast<int>(a.rows());
    std::vector<std::vector<int>> wiring;
    std::vector<std::vector<double>> params;
    for (int i = 0; i < d; ++i) {
        wiring.push_back({i});
        params.push_back({c(i)});
    }
    OutputFunction h(OutputKind::Constant, wiring, params, Monotonicity::OrderPreserving);
    return SystemSpec(a, sigma, h, 0.0);
}

SystemSpec with_sigma(const SystemSpec& spec, const Matrix& sigma) {
    return SystemSpec(spec.a, sigma, spec.h, spec.lipschitz);
}

double fit_slope(const std::vector<double>& ts, const std::vector<double>& logs) {
    const double n = static_cast<double>(ts.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += logs[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * logs[i];
    }
    return (n * stl - st * sl) / (n * stt - st * st);
}

}  // namespace

TEST_CASE("apply_K basics") {
    SUBCASE("zero input and zero noise stay at zero") {
        const auto p = make_preset("5.2");
        const SystemSpec spec = with_sigma(p.spec, Matrix::Zero(3, 3));
        const auto path = sample_path(1, 0.01, 25.0, 2.0, 3);
        const GainOperator op(spec, PathView(path));
        const Trajectory x = op.apply_K(op.zero_input());
        CHECK(x.states.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("constant input settles at the linear solve after warmup") {
        const auto p = make_preset("5.2");
        const SystemSpec spec = with_sigma(p.spec, Matrix::Zero(3, 3));
        const auto path = sample_path(1, 0.01, 30.0, 1.0, 3);
        const GainOperator op(spec, PathView(path));
        Vector c(3);
        c << 0.2, 0.25, 0.15;
        const Trajectory x = op.apply_K(op.constant_input(c));
        const Vector oracle = spec.a.partialPivLu().solve(Vector(-c));
        for (std::int64_t i = op.warmup_steps(); i < x.size(); ++i) {
            CHECK((x.state(i) - oracle).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
    SUBCASE("zero input reproduces the stochastic convolution") {
        const auto p = make_preset("5.2");
        const auto path = sample_path(17, 0.01, 25.0, 2.0, 3);
        const PathView view(path);
        const GainOperator op(p.spec, view);
        const Trajectory x = op.apply_K(op.zero_input());
        for (double t : {-10.0, -2.5, 0.0, 2.0}) {
            const Vector conv = stochastic_convolution(p.spec.a, p.spec.sigma, view, t);
            const Vector at = x.state(x.row_of_step(to_step(t, 0.01, "t")));
            CHECK((at - conv).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
    SUBCASE("mismatched grids are a shape error") {
        const auto p = make_preset("5.2");
        const auto path = sample_path(1, 0.01, 25.0, 1.0, 3);
        const auto other = sample_path(1, 0.01, 20.0, 1.0, 3);
        const GainOperator op(p.spec, PathView(path));
        const GainOperator op2(p.spec, PathView(other));
        CHECK_THROWS_WITH_AS(op.apply_K(op2.zero_input()), doctest::Contains("grid"),
                             ValidationError);
    }
}

TEST_CASE("gain operator output") {
    SUBCASE("constant catalog output is constant for every input") {
        Vector c(2);
        c << 0.4, 0.9;
        const SystemSpec spec =
            constant_h_system(Matrix(-Matrix::Identity(2, 2)), Matrix::Identity(2, 2), c);
        const auto path = sample_path(3, 0.01, 20.0, 1.0, 2);
        const GainOperator op(spec, PathView(path));
        for (std::uint64_t s : {1u, 2u}) {
            const InputProcess out = op.apply_gain(op.random_input(s));
            for (std::int64_t i = 0; i < out.size(); ++i) {
                CHECK(out.value(i) == c);
            }
        }
    }
    SUBCASE("competitive example maps anything into [1/6, 1/4]") {
        const auto p = make_preset("5.2");
        const auto path = sample_path(23, 0.01, 25.0, 1.0, 3);
        const GainOperator op(p.spec, PathView(path));
        const InputProcess out = op.apply_gain(op.zero_input());
        CHECK(out.values.minCoeff() >= 1.0 / 6.0);
        CHECK(out.values.maxCoeff() <= 0.25);
    }
    SUBCASE("order-preserving output on a cooperative system preserves input order") {
        const auto p = make_preset("5.1");
        const auto path = sample_path(29, 0.01, 52.0, 1.0, 3);
        const GainOperator op(p.spec, PathView(path));
        const CounterRng rng(4, 9);
        std::uint64_t ctr = 0;
        for (int rep = 0; rep < 5; ++rep) {
            InputProcess u = op.random_input(100 + rep);
            InputProcess v = u;
            for (std::int64_t i = 0; i < v.size(); ++i) {
                for (int j = 0; j < 3; ++j) {
                    v.values(i, j) += (v.bound(j) - v.values(i, j)) * rng.uniform(ctr++);
                }
            }
            const InputProcess ku = op.apply_gain(u);
            const InputProcess kv = op.apply_gain(v);
            CHECK((kv.values - ku.values).minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("contraction ratio") {
    SUBCASE("identical inputs are rejected") {
        const auto p = make_preset("5.2");
        const auto path = sample_path(1, 0.01, 25.0, 1.0, 3);
        const GainOperator op(p.spec, PathView(path));
        const InputProcess u = op.random_input(1);
        CHECK_THROWS_WITH_AS(op.contraction_ratio(u, u), doctest::Contains("undefined"),
                             ValidationError);
    }
    SUBCASE("constant output contracts to zero in one step") {
        Vector c(2);
        c << 0.4, 0.9;
        const SystemSpec spec =
            constant_h_system(Matrix(-Matrix::Identity(2, 2)), Matrix::Identity(2, 2), c);
        const auto path = sample_path(3, 0.01, 20.0, 1.0, 2);
        const GainOperator op(spec, PathView(path));
        CHECK(op.contraction_ratio(op.random_input(1), op.random_input(2)) == 0.0);
    }
    SUBCASE("competitive example stays below its gain on random pairs") {
        const auto p = make_preset("5.2");
        const auto path = sample_path(31, 0.005, 40.0, 1.0, 3);
        const GainOperator op(p.spec, PathView(path));
        for (int rep = 0; rep < 20; ++rep) {
            const double r =
                op.contraction_ratio(op.random_input(2 * rep), op.random_input(2 * rep + 1));
            CHECK(r <= 9.0 / 16.0 + 1e-6);
        }
    }
    SUBCASE("multi-seed aggregation diagnostic") {
        const auto p = make_preset("5.2");
        const double worst = max_contraction_ratio(p.spec, 0.01, 25.0, 1.0, 3, 4, 99);
        CHECK(worst > 0.0);
        CHECK(worst <= 9.0 / 16.0 + 1e-6);
    }
}

TEST_CASE("fixed-point iteration") {
    SUBCASE("constant output converges in one iteration") {
        Vector c(2);
        c << 0.4, 0.9;
        Matrix a(2, 2);
        a << -1.0, 0.5, 0.0, -2.0;
        const SystemSpec spec = constant_h_system(a, 0.3 * Matrix::Identity(2, 2), c);
        const auto path = sample_path(3, 0.01, 20.0, 1.0, 2);
        const GainOperator op(spec, PathView(path));
        const FixedPointResult res =
            op.iterate_fixed_point(op.default_initial_guess(), 1e-12, 50);
        CHECK(res.iterations == 1);
        CHECK(res.residuals.front() == 0.0);
        // equilibrium = -A^{-1} c + the Ornstein-Uhlenbeck convolution
        const Vector oracle = a.partialPivLu().solve(Vector(-c)) +
                              stochastic_convolution(a, spec.sigma, PathView(path), 0.0);
        const Vector x0 = res.equilibrium.state(res.equilibrium.row_of_step(0));
        CHECK((x0 - oracle).cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("competitive example: geometric residuals within the closed-form gain") {
        const auto p = make_preset("5.2");
        const auto path = sample_path(7, 0.005, 40.0, 2.0, 3);
        const GainOperator op(p.spec, PathView(path));
        const double tol = 1e-10;
        const FixedPointResult res = op.iterate_fixed_point(op.zero_input(), tol, 200);
        REQUIRE(res.residuals.size() >= 3);
        const double rho0 = res.residuals.front();
        const int bound =
            static_cast<int>(std::ceil(std::log(tol / rho0) / std::log(op.gain()))) + 2;
        CHECK(res.iterations <= bound);
        for (std::size_t i = 1; i + 1 < res.residuals.size(); ++i) {
            CHECK(res.residuals[i + 1] < res.residuals[i]);
            CHECK(res.residuals[i + 1] / res.residuals[i] <= op.gain() + 0.05);
        }
        CHECK(res.rate_estimate <= op.gain() + 0.05);
        CHECK(res.residuals.back() <= tol);
        for (std::int64_t i = 0; i < res.u_star.size(); ++i) {
            for (int j = 0; j < 3; ++j) {
                CHECK(res.u_star.values(i, j) >= 0.0);
                CHECK(res.u_star.values(i, j) <= res.u_star.bound(j));
            }
        }
    }
    SUBCASE("the fixed point does not depend on the initial guess") {
        const auto p = make_preset("5.2");
        const auto path = sample_path(19, 0.005, 40.0, 2.0, 3);
        const GainOperator op(p.spec, PathView(path));
        const double tol = 1e-10;
        const FixedPointResult lo = op.iterate_fixed_point(op.zero_input(), tol, 200);
        const FixedPointResult hi = op.iterate_fixed_point(op.bound_input(), tol, 200);
        CHECK(op.rho(lo.u_star, hi.u_star) <= 2.0 * tol);
    }
    SUBCASE("gain >= 1 is refused with a pointer to the report") {
        const auto p = make_preset("6.1");
        const auto path = sample_path(1, 0.01, 25.0, 1.0, 2);
        const GainOperator op(p.spec, PathView(path));
        CHECK_THROWS_WITH_AS(op.iterate_fixed_point(op.zero_input(), 1e-8, 50),
                             doctest::Contains("small-gain report"), ValidationError);
    }
    SUBCASE("non-convergence carries the residual history") {
        const auto p = make_preset("5.2");
        const auto path = sample_path(1, 0.01, 25.0, 1.0, 3);
        const GainOperator op(p.spec, PathView(path));
        CHECK_THROWS_WITH_AS(op.iterate_fixed_point(op.zero_input(), 1e-14, 2),
                             doctest::Contains("residuals"), NumericError);
    }
}

TEST_CASE("equilibrium verification") {
    SUBCASE("deterministic constant system") {
        Vector c(2);
        c << 0.4, 0.9;
        Matrix a(2, 2);
        a << -1.0, 0.5, 0.0, -2.0;
        const SystemSpec spec = constant_h_system(a, Matrix::Zero(2, 2), c);
        const auto path = sample_path(3, 0.01, 45.0, 5.0, 2);
        const GainOperator op(spec, PathView(path));
        const FixedPointResult res =
            op.iterate_fixed_point(op.default_initial_guess(), 1e-12, 50);
        const VerifyResult v = op.verify_equilibrium(res, 0.0, 5.0);
        CHECK(v.max_deviation <= 1e-8);
        CHECK(v.pullback_gap <= 1e-6);
    }
    SUBCASE("competitive example with noise") {
        const auto p = make_preset("5.2");
        const auto path = sample_path(7, 0.01, 45.0, 5.0, 3);
        const GainOperator op(p.spec, PathView(path));
        const FixedPointResult res = op.iterate_fixed_point(op.zero_input(), 1e-10, 200);
        const VerifyResult v = op.verify_equilibrium(res, 0.0, 5.0);
        CHECK(v.max_deviation < 5e-3);
        CHECK(v.pullback_gap <= 1e-2);
    }
}

TEST_CASE("monotone sandwich around the fixed point") {
    // Noiseless bracket: tail envelopes of h from two starts straddle the
    // fixed point, and even gain-operator iterates nest onto it.
    const auto p = make_preset("5.1");
    const SystemSpec spec = with_sigma(p.spec, Matrix::Zero(3, 3));
    const auto path = sample_path(1, 0.01, 70.0, 2.0, 3);
    const PathView view(path);
    const GainOperator op(spec, view);
    const FixedPointResult fp = op.iterate_fixed_point(op.zero_input(), 1e-12, 200);

    for (const Vector& x : {Vector(Vector::Zero(3)), Vector(Vector::Constant(3, 5.0))}) {
        const TailEnvelope env = tail_envelopes(spec, view, x, 10.0, 40.0, true);
        InputProcess lo = op.constant_input(env.lower);
        InputProcess hi = op.constant_input(env.upper);
        for (int k = 1; k <= 5; ++k) {
            lo = op.apply_gain(op.apply_gain(lo));
            hi = op.apply_gain(op.apply_gain(hi));
            for (std::int64_t i = op.warmup_steps(); i < lo.size(); ++i) {
                CHECK((fp.u_star.values.row(i) - lo.values.row(i)).minCoeff() >= -1e-8);
                CHECK((hi.values.row(i) - fp.u_star.values.row(i)).minCoeff() >= -1e-8);
            }
        }
    }
}

TEST_CASE("sandwich bounds the pullback state") {
    // K(a_tau^h)(0) <= pullback(x, T) <= K(b_tau^h)(0) within 1e-2, with noise.
    for (const char* id : {"5.1", "5.2", "5.3"}) {
        const auto p = make_preset(id);
        const auto path = sample_path(7, 0.01, p.t_past + 20.0, 1.0, 3);
        const PathView view(path);
        const GainOperator op(p.spec, view);
        const double lambda = spectral_abscissa(p.spec.a);
        const double tau = 5.0;
        const double t_pull = tau + std::ceil(10.0 / std::abs(lambda));
        Vector x(3);
        x << 3.0, -3.0, 1.0;
        const TailEnvelope env = tail_envelopes(p.spec, view, x, tau, t_pull, true);
        const Trajectory klo = op.apply_K(op.constant_input(env.lower));
        const Trajectory khi = op.apply_K(op.constant_input(env.upper));
        const Vector k_lo = klo.state(klo.row_of_step(0));
        const Vector k_hi = khi.state(khi.row_of_step(0));
        const Vector pb = pullback(p.spec, view, x, t_pull);
        CHECK((pb - k_lo).minCoeff() >= -1e-2);
        CHECK((k_hi - pb).minCoeff() >= -1e-2);
    }
}

TEST_CASE("pullback gaps decay at least as fast as the guaranteed rate") {
    const auto p = make_preset("5.2");
    const auto rep = small_gain_report(p.spec);
    const double guaranteed = rep.lambda + p.spec.lipschitz * 9.0;  // lambda + L d^2
    REQUIRE(guaranteed < 0.0);
    const auto path = sample_path(41, 0.01, 25.0, 0.0, 3);
    const PathView view(path);
    const Vector x = Vector::Constant(3, 5.0);
    std::vector<double> ts, logs;
    for (double t = 5.0; t <= 20.0; t += 1.0) {
        const Vector g = pullback(p.spec, view, x, t + 1.0) - pullback(p.spec, view, x, t);
        const double gap = g.cwiseAbs().maxCoeff();
        if (gap > 1e-13) {
            ts.push_back(t);
            logs.push_back(std::log(gap));
        }
    }
    REQUIRE(ts.size() >= 8);
    CHECK(fit_slope(ts, logs) <= 0.7 * guaranteed);
}

TEST_CASE("equilibrium law is invariant along the orbit") {
    const auto p = make_preset("5.2");
    const int n_seeds = 1000;
    Vector sum = Vector::Zero(3), sumsq = Vector::Zero(3);
    for (int s = 0; s < n_seeds; ++s) {
        const auto path = sample_path(5000 + s, 0.02, 30.0, 6.0, 3);
        const GainOperator op(p.spec, PathView(path));
        const FixedPointResult res =
            op.iterate_fixed_point(op.default_initial_guess(), 1e-8, 100);
        const Trajectory& eq = res.equilibrium;
        const Vector diff =
            eq.state(eq.row_of_step(0)) - eq.state(eq.row_of_step(to_step(5.0, 0.02, "t")));
        sum += diff;
        sumsq += diff.cwiseProduct(diff);
    }
    for (int i = 0; i < 3; ++i) {
        const double mean = sum(i) / n_seeds;
        const double sd = std::sqrt(sumsq(i) / n_seeds - mean * mean);
        CHECK(std::abs(mean) <= 3.0 * sd / std::sqrt(static_cast<double>(n_seeds)));
    }
}
