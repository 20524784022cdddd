#include <doctest.h>

#include <cmath>

#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/grid.hpp"
#include "core/parallel.hpp"
#include "core/presets.hpp"
#include "core/stationary.hpp"

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

SystemSpec scalar_tanh_system(double a, double sigma) {
    // dx = (a x + 1/(5 + tanh x)) dt + sigma dW
    Matrix am(1, 1), sm(1, 1);
    am << a;
    sm << sigma;
    OutputFunction h(OutputKind::ReciprocalTanh, {{0}}, {{4.0, 1.0}},
                     Monotonicity::AntiOrderPreserving);
    return SystemSpec(am, sm, h, 1.0 / 16.0);
}

double l1_distance(const StationaryEstimate& est, const DensityGrid& grid) {
    // piecewise-constant histogram density against the quadrature density
    const Histogram& h = est.histograms[0];
    double l1 = 0.0;
    double covered = 0.0;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double lo = h.edges(static_cast<Eigen::Index>(b));
        const double hi = h.edges(static_cast<Eigen::Index>(b + 1));
        const double p_hat = static_cast<double>(h.counts[b]) /
                             (static_cast<double>(est.samples) * (hi - lo));
        // trapezoid mass of the exact density over [lo, hi]
        double mass = 0.0;
        const Eigen::Index n = grid.xs.size();
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            const double a = std::max(lo, grid.xs(i));
            const double bb = std::min(hi, grid.xs(i + 1));
            if (bb <= a) continue;
            const double cell = grid.xs(i + 1) - grid.xs(i);
            const double fa =
                grid.density(i) + (grid.density(i + 1) - grid.density(i)) * (a - grid.xs(i)) / cell;
            const double fb =
                grid.density(i) + (grid.density(i + 1) - grid.density(i)) * (bb - grid.xs(i)) / cell;
            mass += 0.5 * (fa + fb) * (bb - a);
        }
        l1 += std::abs(p_hat * (hi - lo) - mass);
        covered += mass;
    }
    return l1 + (1.0 - covered);  // mass the histogram never covers counts fully
}

}  // namespace

TEST_CASE("lyapunov_covariance residual on the catalog") {
    for (const char* id : {"5.1", "5.2", "5.3", "6.1"}) {
        const auto p = make_preset(id);
        const Matrix cov = lyapunov_covariance(p.spec.a, p.spec.sigma);
        const Matrix q = p.spec.sigma * p.spec.sigma.transpose();
        CHECK(max_abs(p.spec.a * cov + cov * p.spec.a.transpose() + q) <= 1e-10);
        CHECK(max_abs(cov - cov.transpose()) <= 1e-12);
    }
}

TEST_CASE("deterministic equilibrium solves Ax + h(x) = 0") {
    for (const char* id : {"5.1", "5.2", "5.3"}) {
        const auto p = make_preset(id);
        const Vector x = deterministic_equilibrium(p.spec);
        CHECK((p.spec.a * x + p.spec.evaluate_h(x)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("ensemble sampling matches the linear Gaussian reference") {
    const Matrix a = make_preset("5.1").spec.a;
    Vector c(3);
    c << 0.13, 0.13, 0.13;
    const SystemSpec spec = constant_h_system(a, 0.2 * Matrix::Identity(3, 3), c);
    McOptions opts;
    opts.dt = 0.01;
    opts.base_seed = 42;
    const StationaryEstimate est =
        mc_stationary(spec, 4000, SamplingMode::EnsemblePullback, opts);
    const Vector mean_oracle = spec.a.partialPivLu().solve(Vector(-c));
    const Matrix cov_oracle = lyapunov_covariance(spec.a, spec.sigma);
    for (int i = 0; i < 3; ++i) {
        const double se = std::sqrt(est.covariance(i, i) / static_cast<double>(est.samples));
        CHECK(std::abs(est.mean(i) - mean_oracle(i)) <= 3.0 * se);
    }
    CHECK((est.covariance - cov_oracle).norm() <= 0.10 * cov_oracle.norm());
    CHECK(max_abs(est.covariance - est.covariance.transpose()) <= 1e-10);
    // PSD within tolerance
    Eigen::SelfAdjointEigenSolver<Matrix> es(est.covariance);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("scalar OU moments from the ergodic time average") {
    Matrix a(1, 1), s(1, 1);
    a << -1.0;
    s << 0.8;
    Vector c(1);
    c << 0.5;
    const SystemSpec spec = constant_h_system(a, s, c);
    McOptions opts;
    opts.dt = 0.01;
    opts.base_seed = 7;
    const StationaryEstimate est =
        mc_stationary(spec, 100000, SamplingMode::ErgodicTimeAverage, opts);
    // mean -> c/|a|, variance -> sigma^2/2 within 3 standard errors
    const double var = est.covariance(0, 0);
    // thinning at 1/|lambda| leaves correlation e^{-1}; inflate the SE
    const double neff = est.samples * (1 - std::exp(-1.0)) / (1 + std::exp(-1.0));
    const double se_mean = std::sqrt(var / neff);
    CHECK(std::abs(est.mean(0) - 0.5) <= 3.0 * se_mean);
    const double se_var = var * std::sqrt(2.0 / neff);
    CHECK(std::abs(var - 0.32) <= 3.0 * se_var);
}

TEST_CASE("the two sampling modes agree on the competitive example") {
    const auto p = make_preset("5.2");
    McOptions opts;
    opts.dt = 0.01;
    opts.base_seed = 11;
    const StationaryEstimate ens =
        mc_stationary(p.spec, 4000, SamplingMode::EnsemblePullback, opts);
    opts.base_seed = 12;
    const StationaryEstimate erg =
        mc_stationary(p.spec, 4000, SamplingMode::ErgodicTimeAverage, opts);
    for (int i = 0; i < 3; ++i) {
        const double se = std::sqrt(ens.covariance(i, i) / ens.samples +
                                    3.0 * erg.covariance(i, i) / erg.samples);
        CHECK(std::abs(ens.mean(i) - erg.mean(i)) <= 3.0 * se);
    }
}

TEST_CASE("ergodic sampling equals forward integration on a materialized path") {
    // The ergodic mode streams increments straight from the counter
    // generator; the result must match integrating on a sampled path
    // bit for bit.
    const auto p = make_preset("5.2");
    McOptions opts;
    opts.dt = 0.02;
    opts.base_seed = 31;
    opts.burn_in = 10.0;
    const std::int64_t n = 20;
    const StationaryEstimate est =
        mc_stationary(p.spec, n, SamplingMode::ErgodicTimeAverage, opts);

    const Vector x0 = deterministic_equilibrium(p.spec);
    const auto path = sample_path(31, 0.02, 0.02, 31.0, 3);
    const Trajectory traj = integrate_forward(p.spec, PathView(path), x0, 0.0, 31.0);
    Matrix samples(n, 3);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t k = to_step(10.0 + (i + 1) * 1.0, 0.02, "t");
        samples.row(i) = traj.states.row(traj.row_of_step(k));
    }
    const Vector manual_mean =
        pairwise_sum(std::int64_t{0}, n,
                     [&](std::int64_t i) { return Vector(samples.row(i).transpose()); },
                     Vector(Vector::Zero(3))) /
        static_cast<double>(n);
    CHECK(est.mean == manual_mean);
}

TEST_CASE("histogram counts sum to the sample count") {
    const auto p = make_preset("5.2");
    McOptions opts;
    opts.dt = 0.02;
    const StationaryEstimate est =
        mc_stationary(p.spec, 500, SamplingMode::EnsemblePullback, opts);
    for (const Histogram& h : est.histograms) {
        std::int64_t total = 0;
        for (std::int64_t c : h.counts) total += c;
        CHECK(total == est.samples);
    }
}

TEST_CASE("standard error shrinks like the square root of the sample count") {
    const auto p = make_preset("5.2");
    McOptions opts;
    opts.dt = 0.02;
    opts.base_seed = 100;
    const auto small = mc_stationary(p.spec, 2000, SamplingMode::EnsemblePullback, opts);
    const auto big = mc_stationary(p.spec, 4000, SamplingMode::EnsemblePullback, opts);
    const double se_small = std::sqrt(small.covariance(0, 0) / small.samples);
    const double se_big = std::sqrt(big.covariance(0, 0) / big.samples);
    CHECK(se_small / se_big == doctest::Approx(std::sqrt(2.0)).epsilon(0.20));
}

TEST_CASE("closed-form stationary density in one dimension") {
    SUBCASE("zero output gives the centered OU Gaussian") {
        Matrix a(1, 1);
        a << -1.0;
        OutputFunction h0(OutputKind::Constant, {{0}}, {{0.0}}, Monotonicity::OrderPreserving);
        const double sigma = 0.5;
        const double sd = sigma / std::sqrt(2.0);
        const int n = 40001;
        Vector xs(n);
        for (int i = 0; i < n; ++i) xs(i) = -6.0 * sd + 12.0 * sd * i / (n - 1);
        const DensityGrid grid = exact_density_1d(-1.0, h0, sigma, xs);
        CHECK(grid.normalization == doctest::Approx(1.0).epsilon(1e-9));
        for (int i = 0; i < n; i += 500) {
            const double x = xs(i);
            if (std::abs(x) > 5.0 * sd) continue;
            const double gauss =
                std::exp(-x * x / (2.0 * sd * sd)) / (sd * std::sqrt(2.0 * std::numbers::pi));
            CHECK(grid.density(i) == doctest::Approx(gauss).epsilon(1e-8));
        }
    }
    SUBCASE("constant output shifts the Gaussian") {
        Matrix a(1, 1);
        a << -2.0;
        OutputFunction hc(OutputKind::Constant, {{0}}, {{1.0}}, Monotonicity::OrderPreserving);
        const double sigma = 0.6;
        const double sd = sigma / std::sqrt(2.0 * 2.0);
        const int n = 40001;
        Vector xs(n);
        for (int i = 0; i < n; ++i) xs(i) = 0.5 - 7.0 * sd + 14.0 * sd * i / (n - 1);
        const DensityGrid grid = exact_density_1d(-2.0, hc, sigma, xs);
        for (int i = 0; i < n; i += 1000) {
            const double x = xs(i);
            if (std::abs(x - 0.5) > 5.0 * sd) continue;
            const double gauss = std::exp(-(x - 0.5) * (x - 0.5) / (2.0 * sd * sd)) /
                                 (sd * std::sqrt(2.0 * std::numbers::pi));
            CHECK(grid.density(i) == doctest::Approx(gauss).epsilon(1e-8));
        }
    }
    SUBCASE("a grid that clips the support is rejected") {
        Matrix a(1, 1);
        a << -1.0;
        OutputFunction h0(OutputKind::Constant, {{0}}, {{0.0}}, Monotonicity::OrderPreserving);
        Vector xs(101);
        for (int i = 0; i < 101; ++i) xs(i) = -0.1 + 0.2 * i / 100.0;
        CHECK_THROWS_WITH_AS(exact_density_1d(-1.0, h0, 1.0, xs), doctest::Contains("widen"),
                             ValidationError);
    }
    SUBCASE("Monte Carlo histogram matches the quadrature density") {
        const SystemSpec spec = scalar_tanh_system(-1.0, 0.5);
        McOptions opts;
        opts.dt = 0.01;
        opts.base_seed = 3;
        const StationaryEstimate est =
            mc_stationary(spec, 100000, SamplingMode::ErgodicTimeAverage, opts);
        const int n = 4001;
        Vector xs(n);
        for (int i = 0; i < n; ++i) xs(i) = -2.0 + 4.5 * i / (n - 1);
        const DensityGrid grid = exact_density_1d(-1.0, spec.h, 0.5, xs);
        CHECK(l1_distance(est, grid) <= 0.05);
    }
}

TEST_CASE("drift condition check") {
    SUBCASE("rotation example passes with the declared bound") {
        const auto p = make_preset("6.1");
        const DriftCheckResult r = drift_check(p.spec, 0.1, 10.0, 10000);
        CHECK(r.ok);
        CHECK(r.worst_margin <= 0.0);
    }
    SUBCASE("margins match the explicit quadratic for the pure OU case") {
        Matrix a = -Matrix::Identity(2, 2);
        const SystemSpec spec =
            constant_h_system(a, 0.3 * Matrix::Identity(2, 2), Vector::Zero(2));
        const double eps = 0.5;
        const double radius = 1.0;  // >= sigma sqrt(d)
        const DriftCheckResult r = drift_check(spec, eps, radius, 2000);
        CHECK(r.ok);
        // LV + (1-eps)/2 |x|^2 = trace/2 - |x|^2 + 0.25 |x|^2 <= trace/2 - 0.75 R^2
        CHECK(r.worst_margin <= 0.5 * 2 * 0.09 - 0.75 * radius * radius + 1e-12);
    }
    SUBCASE("the guard refuses L >= lambda - epsilon") {
        const auto base = make_preset("6.1");
        SystemSpec bad(base.spec.a, base.spec.sigma, base.spec.h, 1.0);  // L = lambda
        CHECK_THROWS_WITH_AS(drift_check(bad, 0.1, 10.0, 100), doctest::Contains("exceed"),
                             ValidationError);
    }
    SUBCASE("off-diagonal sigma is rejected") {
        Matrix a = -Matrix::Identity(2, 2);
        Matrix sigma(2, 2);
        sigma << 0.1, 0.05, 0.0, 0.1;
        const SystemSpec spec = constant_h_system(a, sigma, Vector::Zero(2));
        CHECK_THROWS_WITH_AS(drift_check(spec, 0.1, 1.0, 10), doctest::Contains("diagonal"),
                             ValidationError);
    }
    SUBCASE("margin is decreasing in the radius") {
        const auto p = make_preset("6.1");
        const DriftCheckResult r10 = drift_check(p.spec, 0.1, 10.0, 4000);
        const DriftCheckResult r20 = drift_check(p.spec, 0.1, 20.0, 4000);
        CHECK(r20.worst_margin <= r10.worst_margin);
    }
}

TEST_CASE("small-noise concentration") {
    const auto p = make_preset("5.2");
    McOptions opts;
    opts.dt = 0.01;
    opts.base_seed = 21;
    const auto points = small_noise_concentration(p.spec, {1.0, 0.5, 0.25, 0.0}, 1500, opts);
    REQUIRE(points.size() == 4);
    CHECK(points[0].cov_trace > points[1].cov_trace);
    CHECK(points[1].cov_trace > points[2].cov_trace);
    CHECK(points[2].cov_trace > points[3].cov_trace);
    // quadratic scaling of the covariance trace
    CHECK(points[1].cov_trace / points[0].cov_trace == doctest::Approx(0.25).epsilon(0.30));
    CHECK(points[2].cov_trace / points[0].cov_trace == doctest::Approx(0.0625).epsilon(0.30));
    // deterministic limit collapses onto the equilibrium
    CHECK(points[3].mean_dist <= 1e-6);
    CHECK(points[3].cov_trace <= 1e-12);
}

TEST_CASE("mc_stationary preconditions") {
    const auto p = make_preset("5.2");
    SUBCASE("burn-in below the mixing scale is rejected") {
        McOptions opts;
        opts.burn_in = 1.0;  // below 10/|lambda| = 10
        CHECK_THROWS_WITH_AS(mc_stationary(p.spec, 100, SamplingMode::EnsemblePullback, opts),
                             doctest::Contains("burn_in"), ValidationError);
    }
    SUBCASE("systems with neither route available are refused") {
        Matrix a(1, 1);
        a << -0.5;
        OutputFunction h(OutputKind::ReciprocalTanh, {{0}}, {{1.0, 1.0}},
                         Monotonicity::AntiOrderPreserving);
        const SystemSpec spec(a, Matrix::Identity(1, 1), h, 1.0);  // gain 2, L > |lambda|
        CHECK_THROWS_AS(mc_stationary(spec, 100, SamplingMode::EnsemblePullback, {}),
                        ValidationError);
    }
}
