#pragma once

#include <optional>
#include <string>

#include "core/linalg.hpp"
#include "core/output_function.hpp"

namespace sgsde {

// The tuple (d, m, A, sigma, h, L) defining dX = [AX + h(X)]dt + sigma dW.
// L is a declared global bound on all partial derivatives of h, validated by
// sampling (estimate_lipschitz), not derived symbolically.
struct SystemSpec {
    int d = 0;
    int m = 0;
    Matrix a;           // d x d drift matrix
    Matrix sigma;       // d x m diffusion matrix
    OutputFunction h;
    double lipschitz = 0.0;

    SystemSpec(Matrix a_, Matrix sigma_, OutputFunction h_, double lipschitz_);

    Vector evaluate_h(const Vector& x) const;
};

struct SmallGainReport {
    double lambda = 0.0;            // spectral bound used for the checks (< 0 when stable)
    bool cooperative = false;
    bool stable = false;
    double norm_bound_max_ratio = 0.0;  // max_t maxabs(Phi(t)) * exp(-lambda t)
    bool norm_bound_ok = false;
    double lipschitz = 0.0;
    double gain = 0.0;              // -L d^2 / lambda; NaN when lambda >= 0
    double gain_row_sum = 0.0;      // informational sharper estimate, not used for the verdict
    bool small_gain_ok = false;
    std::string reason;             // set when small_gain_ok is false
};

double spectral_abscissa(const SystemSpec& spec);

// True iff every off-diagonal entry of A is nonnegative.
bool check_cooperative(const Matrix& a);

Matrix fundamental_matrix(const Matrix& a, double t);

struct NormBoundResult {
    bool ok = false;
    double max_ratio = 0.0;
};

// Evaluates max_t maxabs(Phi(t)) * exp(-lambda t) on a uniform grid over
// [0, t_max] and compares against 1 + 1e-9.
NormBoundResult check_norm_bound(const Matrix& a, double lambda, double t_max, int n_points);

// Max over sampled x in [box_lo, box_hi]^d and all (i, j) of |dh_i/dx_j|,
// by central finite differences with step 1e-5. Throws when the estimate
// exceeds the declared L, reporting the offending sample point.
double estimate_lipschitz(const SystemSpec& spec, double box_lo, double box_hi, int n_samples);

// Populates every report field. When the norm bound fails at the exact
// spectral abscissa, retries with lambda*(1-delta) for delta in
// {0.01, 0.05, 0.1} and reports the first lambda that passes.
SmallGainReport small_gain_report(const SystemSpec& spec, double t_max = 0.0, int n_points = 2000);

}  // namespace sgsde
