#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/output_function.hpp"
#include "core/system.hpp"

namespace sgsde {

// Stationary covariance of the linear system: solves A S + S A^T + sigma sigma^T = 0.
Matrix lyapunov_covariance(const Matrix& a, const Matrix& sigma);

enum class SamplingMode { EnsemblePullback, ErgodicTimeAverage };

std::string to_string(SamplingMode m);
SamplingMode sampling_mode_from_string(const std::string& s);

struct Histogram {
    Vector edges;                     // n_bins + 1 increasing edges
    std::vector<std::int64_t> counts; // n_bins
};

struct StationaryEstimate {
    std::int64_t samples = 0;
    Vector mean;
    Matrix covariance;
    std::vector<Histogram> histograms;  // one per coordinate
    SamplingMode mode = SamplingMode::EnsemblePullback;
};

struct McOptions {
    double dt = 0.01;
    double burn_in = -1.0;       // default 10/|lambda|
    int threads = 0;             // 0: hardware concurrency
    std::uint64_t base_seed = 1;
    int fixed_bins = 0;          // 0: Freedman-Diaconis binning
};

// Monte Carlo stationary estimate. Ensemble mode draws one pullback sample
// per seed; ergodic mode thins one long trajectory at spacing 1/|lambda|
// after the burn-in. Requires the small-gain condition, or the weaker
// L < |lambda| of the drift-condition route.
StationaryEstimate mc_stationary(const SystemSpec& spec, std::int64_t n_samples,
                                 SamplingMode mode, const McOptions& opts = {});

struct DensityGrid {
    Vector xs;
    Vector density;
    double normalization = 0.0;  // trapezoid integral after normalizing
};

// Closed-form stationary density of the 1-D SDE dx = (a x + h(x)) dt + sigma dW:
// p(x) proportional to exp((2/sigma^2) * int_0^x (a y + h(y)) dy).
DensityGrid exact_density_1d(double a, const OutputFunction& h, double sigma, const Vector& xs);

struct DriftCheckResult {
    bool ok = false;
    double worst_margin = 0.0;  // max over samples of LV(x) + (lam-eps-L)|x|^2/2
};

// Khasminskii drift condition for V = |x|^2/2 on sampled |x| in [radius, 10 radius].
// Requires diagonal sigma and lam := |spectral abscissa| > L + epsilon.
DriftCheckResult drift_check(const SystemSpec& spec, double epsilon, double radius,
                             int n_samples, std::uint64_t seed = 2024);

struct ConcentrationPoint {
    double scale = 0.0;
    double mean_dist = 0.0;  // |empirical mean - deterministic equilibrium|_2
    double cov_trace = 0.0;
};

std::vector<ConcentrationPoint> small_noise_concentration(const SystemSpec& spec,
                                                          const std::vector<double>& scales,
                                                          std::int64_t n_seeds,
                                                          const McOptions& opts = {});

// Solves A x + h(x) = 0 by the fixed-point iteration x <- -A^{-1} h(x),
// which contracts under the small-gain condition.
Vector deterministic_equilibrium(const SystemSpec& spec);

void save_estimate_json(const StationaryEstimate& est, const std::string& filename);
void save_histograms_csv(const StationaryEstimate& est, const std::string& filename);
void save_density_csv(const DensityGrid& grid, const std::string& filename);

}  // namespace sgsde
