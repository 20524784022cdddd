#include "core/noise.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "core/errors.hpp"
#include "core/grid.hpp"
#include "core/jsonio.hpp"
#include "core/rng.hpp"

namespace sgsde {

PathView::PathView(std::shared_ptr<const NoisePath> base, std::int64_t offset_steps)
    : base_(std::move(base)), offset_(offset_steps) {
    if (!base_) throw ValidationError("PathView requires a path");
    if (offset_ < -base_->k_past || offset_ > base_->k_fwd) {
        throw ValidationError("shift anchor " + std::to_string(offset_ * base_->dt) +
                              " lies outside the path grid [" + std::to_string(-base_->t_past()) +
                              ", " + std::to_string(base_->t_fwd()) + "]");
    }
}

void PathView::require_step(std::int64_t r) const {
    const std::int64_t k = offset_ + r;
    if (k < -base_->k_past || k > base_->k_fwd) {
        std::ostringstream os;
        os << "time " << r * base_->dt << " (shifted by " << offset_ * base_->dt
           << ") escapes the path window; regenerate with t_past >= "
           << (k < -base_->k_past ? -k * base_->dt : 0.0) << " and t_fwd >= "
           << (k > base_->k_fwd ? k * base_->dt : base_->t_fwd());
        throw ValidationError(os.str());
    }
}

Vector PathView::value(std::int64_t r) const {
    require_step(r);
    return (base_->w(offset_ + r) - base_->w(offset_)).transpose();
}

Vector PathView::increment(std::int64_t r) const {
    require_step(r);
    require_step(r + 1);
    return base_->dw(offset_ + r).transpose();
}

PathView PathView::shifted_steps(std::int64_t s) const {
    return PathView(base_, offset_ + s);
}

PathView PathView::shifted(double s) const {
    return shifted_steps(to_step(s, base_->dt, "shift"));
}

double path_increment(std::uint64_t seed, int component, std::int64_t step, double dt) {
    const CounterRng rng(seed, static_cast<std::uint64_t>(component));
    return rng.normal(static_cast<std::uint64_t>(step)) * std::sqrt(dt);
}

std::shared_ptr<const NoisePath> sample_path(std::uint64_t seed, double dt, double t_past,
                                             double t_fwd, int m) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive", "dt");
    if (m < 1) throw ValidationError("noise dimension m must be >= 1", "m");
    if (!(t_past > 0.0)) throw ValidationError("t_past must be positive", "t_past");
    if (t_fwd < 0.0) throw ValidationError("t_fwd must be nonnegative", "t_fwd");
    auto path = std::make_shared<NoisePath>();
    path->dt = dt;
    path->k_past = to_step(t_past, dt, "t_past");
    path->k_fwd = to_step(t_fwd, dt, "t_fwd");
    path->m = m;
    path->seed = seed;
    const std::int64_t n = path->k_past + path->k_fwd + 1;
    path->values = Matrix::Zero(n, m);
    path->increments = Matrix::Zero(n - 1, m);
    const double sqrt_dt = std::sqrt(dt);
    for (int c = 0; c < m; ++c) {
        const CounterRng rng(seed, static_cast<std::uint64_t>(c));
        for (std::int64_t k = -path->k_past; k < path->k_fwd; ++k) {
            path->increments(path->k_past + k, c) =
                rng.normal(static_cast<std::uint64_t>(k)) * sqrt_dt;
        }
        // Cumulative sums away from the anchor W(0) = 0 in both directions.
        for (std::int64_t k = 0; k < path->k_fwd; ++k) {
            path->values(path->k_past + k + 1, c) =
                path->values(path->k_past + k, c) + path->increments(path->k_past + k, c);
        }
        for (std::int64_t k = 0; k > -path->k_past; --k) {
            path->values(path->k_past + k - 1, c) =
                path->values(path->k_past + k, c) - path->increments(path->k_past + k - 1, c);
        }
    }
    return path;
}

PathView shift(const PathView& view, double s) {
    return view.shifted(s);
}

PathView shift(const std::shared_ptr<const NoisePath>& path, double s) {
    return PathView(path).shifted(s);
}

Vector stochastic_convolution(const Matrix& a, const Matrix& sigma, const PathView& view,
                              double t) {
    return stochastic_convolution(a, sigma, view, t,
                                  static_cast<double>(view.first_step()) * view.dt());
}

Vector stochastic_convolution(const Matrix& a, const Matrix& sigma, const PathView& view,
                              double t, double from) {
    const double dt = view.dt();
    const std::int64_t k_end = to_step(t, dt, "t");
    const std::int64_t k0 = to_step(from, dt, "from");
    if (k0 < view.first_step() || k_end > view.last_step() || k0 > k_end) {
        throw ValidationError("convolution window [" + std::to_string(from) + ", " +
                              std::to_string(t) + "] escapes the path grid");
    }
    const Matrix phi_dt = matrix_exponential(a, dt);
    Vector n = Vector::Zero(a.rows());
    for (std::int64_t k = k0; k < k_end; ++k) {
        n = phi_dt * (n + sigma * view.increment(k));
    }
    return n;
}

double convolution_truncation_bound(double lambda, const Matrix& sigma, double t, double from) {
    return std::exp(lambda * (t - from)) * max_abs(sigma);
}

double recommended_t_past(double lambda, double dt) {
    if (!(lambda < 0.0)) throw ValidationError("recommended_t_past requires lambda < 0");
    return ceil_to_grid(18.5 / std::abs(lambda), dt);
}

void save_path_csv(const NoisePath& path, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw IoError("cannot open '" + filename + "' for writing");
    out << "t";
    for (int c = 0; c < path.m; ++c) out << ",W_" << (c + 1);
    out << "\n";
    for (std::int64_t k = -path.k_past; k <= path.k_fwd; ++k) {
        out << g17(static_cast<double>(k) * path.dt);
        for (int c = 0; c < path.m; ++c) out << ',' << g17(path.values(k + path.k_past, c));
        out << "\n";
    }
}

std::shared_ptr<const NoisePath> load_path_csv(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw IoError("cannot open '" + filename + "' for reading");
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("path CSV is empty");
    std::vector<double> times;
    std::vector<std::vector<double>> rows;
    int m = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> fields;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t next = line.find(',', pos);
            const std::string tok = line.substr(pos, next == std::string::npos ? next : next - pos);
            fields.push_back(std::stod(tok));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (fields.size() < 2) throw ValidationError("path CSV row with fewer than 2 columns");
        if (m < 0) m = static_cast<int>(fields.size()) - 1;
        if (static_cast<int>(fields.size()) - 1 != m) {
            throw ValidationError("inconsistent column count in path CSV");
        }
        times.push_back(fields[0]);
        rows.push_back(std::vector<double>(fields.begin() + 1, fields.end()));
    }
    if (times.size() < 2) throw ValidationError("path CSV needs at least two rows");
    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) throw ValidationError("path CSV times must be strictly increasing");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * std::max(1.0, std::abs(times[i]))) {
            throw ValidationError("path CSV grid is not uniform near t = " +
                                  std::to_string(times[i]));
        }
    }
    auto path = std::make_shared<NoisePath>();
    path->dt = dt;
    path->m = m;
    path->seed = 0;
    path->generated = false;
    path->k_past = to_step(-times.front(), dt, "t_past");
    path->k_fwd = to_step(times.back(), dt, "t_fwd");
    if (path->k_past < 0 || path->k_fwd < 0) {
        throw ValidationError("path CSV must cover [-t_past, t_fwd] around 0");
    }
    path->values = Matrix::Zero(path->k_past + path->k_fwd + 1, m);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int c = 0; c < m; ++c) path->values(static_cast<Eigen::Index>(i), c) = rows[i][c];
    }
    for (int c = 0; c < m; ++c) {
        if (path->values(path->k_past, c) != 0.0) {
            throw ValidationError("path CSV is not anchored: W(0) must be exactly 0");
        }
    }
    path->increments = path->values.bottomRows(path->values.rows() - 1) -
                       path->values.topRows(path->values.rows() - 1);
    return path;
}

}  // namespace sgsde
