#include "core/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/grid.hpp"
#include "core/jsonio.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace sgsde {

Matrix lyapunov_covariance(const Matrix& a, const Matrix& sigma) {
    return solve_lyapunov(a, sigma * sigma.transpose());
}

std::string to_string(SamplingMode m) {
    return m == SamplingMode::EnsemblePullback ? "ensemble-pullback" : "ergodic-time-average";
}

SamplingMode sampling_mode_from_string(const std::string& s) {
    if (s == "ensemble-pullback") return SamplingMode::EnsemblePullback;
    if (s == "ergodic-time-average") return SamplingMode::ErgodicTimeAverage;
    throw ValidationError("unknown sampling mode '" + s + "'");
}

namespace {

// Exponential-Euler span with increments streamed straight from the counter
// generator; equivalent to integrating on a materialized path with the same
// seed, without storing 10^8 grid points for long ergodic runs.
Vector simulate_span_streaming(const SystemSpec& spec, const Propagator& prop,
                               std::uint64_t seed, std::int64_t k0, std::int64_t k1, Vector x,
                               double sqrt_dt) {
    std::vector<CounterRng> rngs;
    rngs.reserve(spec.m);
    for (int c = 0; c < spec.m; ++c) rngs.emplace_back(seed, static_cast<std::uint64_t>(c));
    Vector dw(spec.m);
    for (std::int64_t k = k0; k < k1; ++k) {
        for (int c = 0; c < spec.m; ++c) {
            dw(c) = rngs[c].normal(static_cast<std::uint64_t>(k)) * sqrt_dt;
        }
        x = prop.phi * x + prop.psi * spec.h.evaluate(x) + prop.phi * (spec.sigma * dw);
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e8) {
            throw NumericError("stationary sampling diverged at step " + std::to_string(k));
        }
    }
    return x;
}

Histogram make_histogram(std::vector<double> column, int fixed_bins) {
    Histogram h;
    const std::int64_t n = static_cast<std::int64_t>(column.size());
    std::sort(column.begin(), column.end());
    const double lo = column.front();
    const double hi = column.back();
    int bins;
    if (fixed_bins > 0) {
        bins = fixed_bins;
    } else {
        // Freedman-Diaconis; degenerate spreads collapse to one bin.
        const double q1 = column[static_cast<std::size_t>(0.25 * (n - 1))];
        const double q3 = column[static_cast<std::size_t>(0.75 * (n - 1))];
        const double width = 2.0 * (q3 - q1) / std::cbrt(static_cast<double>(n));
        bins = (width > 0.0 && hi > lo)
                   ? static_cast<int>(std::clamp((hi - lo) / width, 1.0, 10000.0))
                   : 1;
    }
    const double span = hi > lo ? hi - lo : 1.0;
    h.edges = Vector::Zero(bins + 1);
    for (int b = 0; b <= bins; ++b) h.edges(b) = lo + span * b / bins;
    h.counts.assign(bins, 0);
    for (double v : column) {
        int b = static_cast<int>((v - lo) / span * bins);
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[b];
    }
    return h;
}

StationaryEstimate reduce_samples(const Matrix& samples, SamplingMode mode, int fixed_bins) {
    const std::int64_t n = samples.rows();
    const int d = static_cast<int>(samples.cols());
    StationaryEstimate est;
    est.samples = n;
    est.mode = mode;
    est.mean = pairwise_sum(std::int64_t{0}, n,
                            [&](std::int64_t i) { return Vector(samples.row(i).transpose()); },
                            Vector(Vector::Zero(d))) /
               static_cast<double>(n);
    est.covariance =
        pairwise_sum(std::int64_t{0}, n,
                     [&](std::int64_t i) {
                         const Vector c = samples.row(i).transpose() - est.mean;
                         return Matrix(c * c.transpose());
                     },
                     Matrix(Matrix::Zero(d, d))) /
        static_cast<double>(std::max<std::int64_t>(n - 1, 1));
    est.covariance = 0.5 * (est.covariance + est.covariance.transpose());
    for (int j = 0; j < d; ++j) {
        std::vector<double> col(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = samples(i, j);
        est.histograms.push_back(make_histogram(std::move(col), fixed_bins));
    }
    return est;
}

}  // namespace

Vector deterministic_equilibrium(const SystemSpec& spec) {
    const auto lu = spec.a.partialPivLu();
    Vector x = Vector::Zero(spec.d);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 500; ++it) {
        const Vector next = lu.solve(-spec.h.evaluate(x));
        const double delta = (next - x).cwiseAbs().maxCoeff();
        x = next;
        if (delta <= 1e-14 * (1.0 + x.cwiseAbs().maxCoeff())) return x;
        if (it > 50 && delta > prev) {
            throw ValidationError("deterministic equilibrium solve does not contract; "
                                  "check the small-gain report");
        }
        prev = delta;
    }
    throw ValidationError("deterministic equilibrium solve did not converge in 500 iterations");
}

StationaryEstimate mc_stationary(const SystemSpec& spec, std::int64_t n_samples,
                                 SamplingMode mode, const McOptions& opts) {
    if (n_samples < 2) throw ValidationError("mc_stationary requires at least 2 samples");
    const double lambda = spectral_abscissa(spec.a);
    if (!(lambda < 0.0)) throw ValidationError("mc_stationary requires a stable A");
    const double gain = -spec.lipschitz * spec.d * spec.d / lambda;
    if (!(gain < 1.0) && !(spec.lipschitz < -lambda)) {
        throw ValidationError("mc_stationary requires the small-gain condition or L < |lambda|");
    }
    const double dt = opts.dt;
    double burn_in = opts.burn_in >= 0.0 ? opts.burn_in : 10.0 / std::abs(lambda);
    if (burn_in < 10.0 / std::abs(lambda) - 1e-9) {
        throw ValidationError("burn_in must be at least 10/|lambda|");
    }
    burn_in = ceil_to_grid(burn_in, dt);

    Vector x_start = Vector::Zero(spec.d);
    try {
        x_start = deterministic_equilibrium(spec);
    } catch (const ValidationError&) {
        // fall back to the origin; the burn-in absorbs the transient
    }

    const Propagator prop = Propagator::make(spec.a, dt);
    const double sqrt_dt = std::sqrt(dt);
    Matrix samples(n_samples, spec.d);

    if (mode == SamplingMode::EnsemblePullback) {
        const double horizon = std::max(burn_in, recommended_t_past(lambda, dt));
        const std::int64_t steps = to_step(horizon, dt, "burn_in");
        parallel_for(n_samples, opts.threads, [&](std::int64_t i) {
            const Vector x =
                simulate_span_streaming(spec, prop, opts.base_seed + static_cast<std::uint64_t>(i),
                                        -steps, 0, x_start, sqrt_dt);
            samples.row(i) = x.transpose();
        });
    } else {
        const std::int64_t burn_steps = to_step(burn_in, dt, "burn_in");
        const std::int64_t spacing =
            std::max<std::int64_t>(1, to_step(ceil_to_grid(1.0 / std::abs(lambda), dt), dt, "spacing"));
        Vector x = simulate_span_streaming(spec, prop, opts.base_seed, 0, burn_steps, x_start,
                                           sqrt_dt);
        std::int64_t k = burn_steps;
        for (std::int64_t i = 0; i < n_samples; ++i) {
            x = simulate_span_streaming(spec, prop, opts.base_seed, k, k + spacing, x, sqrt_dt);
            k += spacing;
            samples.row(i) = x.transpose();
        }
    }
    return reduce_samples(samples, mode, opts.fixed_bins);
}

DensityGrid exact_density_1d(double a, const OutputFunction& h, double sigma, const Vector& xs) {
    if (h.dim() != 1) throw ValidationError("exact_density_1d requires a 1-D output function");
    if (!(a < 0.0)) throw ValidationError("exact_density_1d requires a < 0");
    if (!(sigma > 0.0)) throw ValidationError("exact_density_1d requires sigma > 0");
    const Eigen::Index n = xs.size();
    if (n < 3) throw ValidationError("density grid needs at least 3 points");
    for (Eigen::Index i = 1; i < n; ++i) {
        if (!(xs(i) > xs(i - 1))) throw ValidationError("density grid must be increasing");
    }
    auto drift = [&](double y) { return a * y + h.scalar(0, y); };
    // Cumulative trapezoid of the drift gives the log-density potential.
    Vector potential(n);
    potential(0) = 0.0;
    for (Eigen::Index i = 1; i < n; ++i) {
        potential(i) =
            potential(i - 1) + 0.5 * (drift(xs(i - 1)) + drift(xs(i))) * (xs(i) - xs(i - 1));
    }
    potential *= 2.0 / (sigma * sigma);
    const double peak = potential.maxCoeff();
    Vector density(n);
    for (Eigen::Index i = 0; i < n; ++i) density(i) = std::exp(potential(i) - peak);
    auto trapezoid = [&](const Vector& f) {
        double s = 0.0;
        for (Eigen::Index i = 1; i < n; ++i) s += 0.5 * (f(i - 1) + f(i)) * (xs(i) - xs(i - 1));
        return s;
    };
    const double z = trapezoid(density);
    density /= z;
    const double edge_mass = 0.5 * (density(0) + density(1)) * (xs(1) - xs(0)) +
                             0.5 * (density(n - 2) + density(n - 1)) * (xs(n - 1) - xs(n - 2));
    if (edge_mass > 1e-4) {
        throw ValidationError("density grid too narrow: edge cells carry mass " +
                              g17(edge_mass) + "; widen the grid");
    }
    DensityGrid grid;
    grid.xs = xs;
    grid.density = density;
    grid.normalization = trapezoid(density);
    return grid;
}

DriftCheckResult drift_check(const SystemSpec& spec, double epsilon, double radius,
                             int n_samples, std::uint64_t seed) {
    if (!(epsilon > 0.0) || !(radius > 0.0) || n_samples < 1) {
        throw ValidationError("drift_check requires epsilon > 0, R > 0, n_samples >= 1");
    }
    if (spec.m != spec.d) {
        throw ValidationError("drift_check requires diagonal sigma (m == d)");
    }
    for (int i = 0; i < spec.d; ++i) {
        for (int j = 0; j < spec.m; ++j) {
            if (i != j && spec.sigma(i, j) != 0.0) {
                throw ValidationError("drift_check requires diagonal sigma");
            }
        }
    }
    const double lam = -spectral_abscissa(spec.a);
    if (!(lam > spec.lipschitz + epsilon)) {
        throw ValidationError("drift_check precondition violated: |lambda| = " + g17(lam) +
                              " must exceed L + epsilon = " + g17(spec.lipschitz) + " + " +
                              g17(epsilon));
    }
    const Matrix q = spec.sigma * spec.sigma.transpose();
    const double trace_term = 0.5 * q.diagonal().sum();
    const double coeff = 0.5 * (lam - epsilon - spec.lipschitz);
    const CounterRng rng(seed, 0u);
    std::uint64_t ctr = 0;
    DriftCheckResult out;
    out.ok = true;
    out.worst_margin = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_samples; ++s) {
        Vector dir(spec.d);
        do {
            for (int i = 0; i < spec.d; ++i) {
                const double u1 = rng.uniform_open(ctr++);
                const double u2 = rng.uniform(ctr++);
                dir(i) = std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(2.0 * std::numbers::pi * u2);
            }
        } while (dir.norm() == 0.0);
        const double r = radius * (1.0 + 9.0 * rng.uniform(ctr++));
        const Vector x = dir * (r / dir.norm());
        const double lv = trace_term + x.dot(spec.a * x + spec.h.evaluate(x));
        const double margin = lv + coeff * x.squaredNorm();
        out.worst_margin = std::max(out.worst_margin, margin);
        if (margin > 0.0) out.ok = false;
    }
    return out;
}

std::vector<ConcentrationPoint> small_noise_concentration(const SystemSpec& spec,
                                                          const std::vector<double>& scales,
                                                          std::int64_t n_seeds,
                                                          const McOptions& opts) {
    const double lambda = spectral_abscissa(spec.a);
    if (!(lambda < 0.0) || !(-spec.lipschitz * spec.d * spec.d / lambda < 1.0)) {
        throw ValidationError("small_noise_concentration requires the small-gain condition");
    }
    const Vector x_bar = deterministic_equilibrium(spec);
    std::vector<ConcentrationPoint> out;
    for (double s : scales) {
        if (s < 0.0) throw ValidationError("sigma scale must be nonnegative");
        SystemSpec scaled(spec.a, spec.sigma * s, spec.h, spec.lipschitz);
        const StationaryEstimate est =
            mc_stationary(scaled, n_seeds, SamplingMode::EnsemblePullback, opts);
        ConcentrationPoint p;
        p.scale = s;
        p.mean_dist = (est.mean - x_bar).norm();
        p.cov_trace = est.covariance.trace();
        out.push_back(p);
    }
    return out;
}

void save_estimate_json(const StationaryEstimate& est, const std::string& filename) {
    JsonWriter w;
    w.begin_object();
    w.key("mode").value(to_string(est.mode));
    w.key("samples").value(est.samples);
    w.key("mean").value(est.mean);
    w.key("covariance").value(est.covariance);
    w.end_object();
    write_text_file(filename, w.str() + "\n");
}

void save_histograms_csv(const StationaryEstimate& est, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw IoError("cannot open '" + filename + "' for writing");
    out << "coordinate,bin_lo,bin_hi,count\n";
    for (std::size_t j = 0; j < est.histograms.size(); ++j) {
        const Histogram& h = est.histograms[j];
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            out << (j + 1) << ',' << g17(h.edges(static_cast<Eigen::Index>(b))) << ','
                << g17(h.edges(static_cast<Eigen::Index>(b + 1))) << ',' << h.counts[b] << "\n";
        }
    }
}

void save_density_csv(const DensityGrid& grid, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw IoError("cannot open '" + filename + "' for writing");
    out << "x,p\n";
    for (Eigen::Index i = 0; i < grid.xs.size(); ++i) {
        out << g17(grid.xs(i)) << ',' << g17(grid.density(i)) << "\n";
    }
}

}  // namespace sgsde
