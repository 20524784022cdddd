#include "core/system.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace sgsde {

SystemSpec::SystemSpec(Matrix a_, Matrix sigma_, OutputFunction h_, double lipschitz_)
    : a(std::move(a_)), sigma(std::move(sigma_)), h(std::move(h_)), lipschitz(lipschitz_) {
    d = static_cast<int>(a.rows());
    m = static_cast<int>(sigma.cols());
    if (d < 1 || a.cols() != d) {
        throw ValidationError("A must be a square matrix of dimension >= 1");
    }
    if (sigma.rows() != d || m < 1) {
        throw ValidationError("sigma must be d x m with m >= 1");
    }
    if (!a.allFinite() || !sigma.allFinite()) {
        throw ValidationError("A and sigma must have finite entries");
    }
    if (h.dim() != d) {
        throw ValidationError("output function dimension " + std::to_string(h.dim()) +
                              " does not match state dimension " + std::to_string(d));
    }
    if (!(lipschitz >= 0.0)) {
        throw ValidationError("declared Lipschitz bound L must be nonnegative");
    }
}

Vector SystemSpec::evaluate_h(const Vector& x) const {
    if (!x.allFinite()) throw ValidationError("evaluate_h: non-finite state");
    return h.evaluate(x);
}

double spectral_abscissa(const SystemSpec& spec) {
    return spectral_abscissa(spec.a);
}

bool check_cooperative(const Matrix& a) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (i != j && a(i, j) < 0.0) return false;
        }
    }
    return true;
}

Matrix fundamental_matrix(const Matrix& a, double t) {
    if (t < 0.0) throw ValidationError("fundamental_matrix requires t >= 0");
    return matrix_exponential(a, t);
}

NormBoundResult check_norm_bound(const Matrix& a, double lambda, double t_max, int n_points) {
    if (!(lambda < 0.0)) throw ValidationError("check_norm_bound requires lambda < 0");
    if (!(t_max > 0.0)) throw ValidationError("check_norm_bound requires t_max > 0");
    if (n_points < 2) throw ValidationError("check_norm_bound requires n_points >= 2");
    const double dt = t_max / (n_points - 1);
    double max_ratio = 0.0;
    for (int k = 0; k < n_points; ++k) {
        const double t = k * dt;
        const double ratio = max_abs(matrix_exponential(a, t)) * std::exp(-lambda * t);
        max_ratio = std::max(max_ratio, ratio);
    }
    return {max_ratio <= 1.0 + 1e-9, max_ratio};
}

double estimate_lipschitz(const SystemSpec& spec, double box_lo, double box_hi, int n_samples) {
    if (n_samples < 1) throw ValidationError("estimate_lipschitz requires n_samples >= 1");
    if (!(box_hi > box_lo)) throw ValidationError("estimate_lipschitz: empty sampling box");
    const double step = 1e-5;
    const CounterRng rng(/*seed=*/0x11u, /*stream=*/0u);
    double best = 0.0;
    std::uint64_t ctr = 0;
    for (int s = 0; s < n_samples; ++s) {
        Vector x(spec.d);
        for (int i = 0; i < spec.d; ++i) {
            x(i) = box_lo + (box_hi - box_lo) * rng.uniform(ctr++);
        }
        for (int j = 0; j < spec.d; ++j) {
            Vector xp = x, xm = x;
            xp(j) += step;
            xm(j) -= step;
            const Vector der = (spec.h.evaluate(xp) - spec.h.evaluate(xm)) / (2 * step);
            for (int i = 0; i < spec.d; ++i) {
                const double g = std::abs(der(i));
                if (g > best) best = g;
                if (g > spec.lipschitz + 1e-9) {
                    std::ostringstream os;
                    os << "sampled |dh_" << i << "/dx_" << j << "| = " << g
                       << " exceeds declared L = " << spec.lipschitz << " at x = ["
                       << x.transpose() << "]";
                    throw ValidationError(os.str());
                }
            }
        }
    }
    return best;
}

SmallGainReport small_gain_report(const SystemSpec& spec, double t_max, int n_points) {
    SmallGainReport rep;
    rep.lipschitz = spec.lipschitz;
    rep.cooperative = check_cooperative(spec.a);
    const double alpha = spectral_abscissa(spec.a);
    rep.lambda = alpha;
    rep.stable = alpha < 0.0;
    if (!rep.stable) {
        rep.gain = std::numeric_limits<double>::quiet_NaN();
        rep.gain_row_sum = std::numeric_limits<double>::quiet_NaN();
        rep.small_gain_ok = false;
        rep.reason = "spectral abscissa " + std::to_string(alpha) +
                     " is nonnegative; gain undefined";
        return rep;
    }
    if (t_max <= 0.0) t_max = 20.0 / std::abs(alpha);

    // Condition (A) only asks for existence of a valid lambda; if the exact
    // abscissa fails the entrywise bound, loosen it slightly.
    const double deltas[] = {0.0, 0.01, 0.05, 0.1};
    NormBoundResult nb{};
    double lambda_used = alpha;
    for (double delta : deltas) {
        lambda_used = alpha * (1.0 - delta);
        nb = check_norm_bound(spec.a, lambda_used, t_max, n_points);
        if (nb.ok) break;
    }
    if (!nb.ok) {
        lambda_used = alpha;
        nb = check_norm_bound(spec.a, lambda_used, t_max, n_points);
    }
    rep.lambda = lambda_used;
    rep.norm_bound_max_ratio = nb.max_ratio;
    rep.norm_bound_ok = nb.ok;
    rep.gain = -spec.lipschitz * spec.d * spec.d / lambda_used;

    // Informational only: replace the d*maxabs crossing with the actual
    // max row sum of Phi relative to exp(lambda t).
    const double dt = t_max / (n_points - 1);
    double row_factor = 0.0;
    for (int k = 0; k < n_points; ++k) {
        const double t = k * dt;
        row_factor = std::max(
            row_factor, max_row_sum(matrix_exponential(spec.a, t)) * std::exp(-lambda_used * t));
    }
    rep.gain_row_sum = -spec.lipschitz * spec.d * row_factor / lambda_used;

    rep.small_gain_ok = rep.stable && rep.gain < 1.0;
    if (!rep.small_gain_ok) {
        rep.reason = "gain " + std::to_string(rep.gain) + " is not < 1";
    }
    return rep;
}

}  // namespace sgsde
