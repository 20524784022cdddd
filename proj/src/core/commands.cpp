#include "core/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/gain.hpp"
#include "core/grid.hpp"
#include "core/jsonio.hpp"
#include "core/noise.hpp"
#include "core/presets.hpp"

namespace sgsde {
namespace {

namespace fs = std::filesystem;

std::string artifact(const std::string& out_dir, const std::string& name) {
    fs::create_directories(out_dir);
    return (fs::path(out_dir) / name).string();
}

std::uint64_t effective_seed(const RunConfig& cfg, const RunOptions& opts) {
    return opts.seed_override.value_or(cfg.seeds.base);
}

void cmd_check(const RunConfig& cfg, const std::string& out_dir) {
    const SmallGainReport rep =
        small_gain_report(cfg.system, cfg.check.t_max, cfg.check.n_points);
    write_text_file(artifact(out_dir, "report.json"), small_gain_report_json(rep) + "\n");
}

void cmd_simulate(const RunConfig& cfg, const std::string& out_dir, const RunOptions& opts) {
    if (!cfg.simulate) throw ValidationError("config has no 'simulate' section", "/simulate");
    const auto path = sample_path(effective_seed(cfg, opts), cfg.grid.dt, cfg.grid.t_past,
                                  cfg.grid.t_fwd, cfg.system.m);
    const Trajectory traj = integrate_forward(cfg.system, PathView(path), cfg.simulate->x0,
                                              cfg.simulate->t0, cfg.simulate->t1);
    save_trajectory_csv(traj, artifact(out_dir, "trajectory.csv"));
    save_trajectory_meta_json(traj, artifact(out_dir, "trajectory_meta.json"));
}

void cmd_pullback(const RunConfig& cfg, const std::string& out_dir, const RunOptions& opts) {
    if (!cfg.pullback) throw ValidationError("config has no 'pullback' section", "/pullback");
    const auto path = sample_path(effective_seed(cfg, opts), cfg.grid.dt, cfg.grid.t_past,
                                  cfg.grid.t_fwd, cfg.system.m);
    const PathView view(path);
    const std::int64_t n = to_step(cfg.pullback->t_max, cfg.grid.dt, "/pullback/t_max");
    std::ofstream out(artifact(out_dir, "pullback.csv"));
    if (!out) throw IoError("cannot write pullback.csv");
    out << "t";
    for (int j = 0; j < cfg.system.d; ++j) out << ",x_" << (j + 1);
    out << "\n";
    for (std::int64_t k = 0; k <= n; ++k) {
        const Vector v = pullback(cfg.system, view, cfg.pullback->x, k * cfg.grid.dt);
        out << g17(k * cfg.grid.dt);
        for (int j = 0; j < cfg.system.d; ++j) out << ',' << g17(v(j));
        out << "\n";
    }
}

void cmd_equilibrium(const RunConfig& cfg, const std::string& out_dir, const RunOptions& opts) {
    const auto path = sample_path(effective_seed(cfg, opts), cfg.grid.dt, cfg.grid.t_past,
                                  cfg.grid.t_fwd, cfg.system.m);
    const GainOperator op(cfg.system, PathView(path));
    const FixedPointResult res = op.iterate_fixed_point(
        op.default_initial_guess(), cfg.equilibrium.tol, cfg.equilibrium.max_iter);
    save_fixed_point_json(res, op.gain(), artifact(out_dir, "fixed_point.json"));
    save_input_csv(res.u_star, artifact(out_dir, "u_star.csv"));
    save_trajectory_csv(res.equilibrium, artifact(out_dir, "equilibrium.csv"));
}

void cmd_stationary(const RunConfig& cfg, const std::string& out_dir, const RunOptions& opts) {
    McOptions mc;
    mc.dt = cfg.grid.dt;
    mc.burn_in = cfg.stationary.burn_in;
    mc.threads = opts.threads;
    mc.base_seed = effective_seed(cfg, opts);
    mc.fixed_bins = cfg.stationary.bins;
    const StationaryEstimate est =
        mc_stationary(cfg.system, cfg.stationary.samples, cfg.stationary.mode, mc);
    save_estimate_json(est, artifact(out_dir, "stationary.json"));
    save_histograms_csv(est, artifact(out_dir, "histograms.csv"));
    if (cfg.stationary.density) {
        const auto& dg = *cfg.stationary.density;
        Vector xs(dg.points);
        for (int i = 0; i < dg.points; ++i) {
            xs(i) = dg.min + (dg.max - dg.min) * i / (dg.points - 1);
        }
        const DensityGrid grid =
            exact_density_1d(cfg.system.a(0, 0), cfg.system.h, cfg.system.sigma(0, 0), xs);
        save_density_csv(grid, artifact(out_dir, "density.csv"));
    }
}

}  // namespace

std::string small_gain_report_json(const SmallGainReport& rep) {
    JsonWriter w;
    w.begin_object();
    w.key("lambda").value(rep.lambda);
    w.key("cooperative").value(rep.cooperative);
    w.key("stable").value(rep.stable);
    w.key("norm_bound_max_ratio").value(rep.norm_bound_max_ratio);
    w.key("norm_bound_ok").value(rep.norm_bound_ok);
    w.key("L").value(rep.lipschitz);
    w.key("gain").value(rep.gain);               // null when lambda >= 0
    w.key("gain_row_sum").value(rep.gain_row_sum);  // informational sharper estimate
    w.key("small_gain_ok").value(rep.small_gain_ok);
    if (!rep.reason.empty()) w.key("reason").value(rep.reason);
    w.end_object();
    return w.str();
}

void run_command(const std::string& command, const RunConfig& cfg, const std::string& out_dir,
                 const RunOptions& opts) {
    if (command == "check") {
        cmd_check(cfg, out_dir);
    } else if (command == "simulate") {
        cmd_simulate(cfg, out_dir, opts);
    } else if (command == "pullback") {
        cmd_pullback(cfg, out_dir, opts);
    } else if (command == "equilibrium") {
        cmd_equilibrium(cfg, out_dir, opts);
    } else if (command == "stationary") {
        cmd_stationary(cfg, out_dir, opts);
    } else {
        throw ValidationError("unknown command '" + command +
                              "'; expected check|simulate|pullback|equilibrium|stationary");
    }
}

void run_example(const std::string& preset_id, const std::string& out_dir,
                 const RunOptions& opts) {
    const Preset p = make_preset(preset_id);
    const std::uint64_t seed = opts.seed_override.value_or(p.seed);
    const SmallGainReport rep = small_gain_report(p.spec);

    JsonWriter out;
    out.begin_object();
    out.key("example").value(p.id);
    out.key("title").value(p.title);
    out.key("check").begin_object();
    out.key("lambda").value(rep.lambda);
    out.key("cooperative").value(rep.cooperative);
    out.key("stable").value(rep.stable);
    out.key("norm_bound_max_ratio").value(rep.norm_bound_max_ratio);
    out.key("norm_bound_ok").value(rep.norm_bound_ok);
    out.key("L").value(rep.lipschitz);
    out.key("gain").value(rep.gain);
    out.key("gain_row_sum").value(rep.gain_row_sum);
    out.key("small_gain_ok").value(rep.small_gain_ok);
    out.end_object();

    out.key("reference").begin_object();
    out.key("lambda").value(p.expected_lambda);
    if (std::isfinite(p.expected_gain)) {
        out.key("gain").value(p.expected_gain);
    } else {
        out.key("gain").null_value();
    }
    out.key("cooperative").value(p.expect_cooperative);
    out.end_object();

    bool matches = rep.cooperative == p.expect_cooperative &&
                   std::abs(rep.lambda - p.expected_lambda) <=
                       1e-9 * std::max(1.0, std::abs(p.expected_lambda));
    out.key("relative_error").begin_object();
    out.key("lambda").value(std::abs(rep.lambda - p.expected_lambda) /
                            std::max(1e-300, std::abs(p.expected_lambda)));
    if (std::isfinite(p.expected_gain)) {
        const double gerr = std::abs(rep.gain - p.expected_gain) / p.expected_gain;
        out.key("gain").value(gerr);
        matches = matches && gerr <= 1e-9;
    } else {
        out.key("gain").null_value();
    }
    out.end_object();
    out.key("matches_reference_bounds").value(matches);

    if (rep.small_gain_ok) {
        const auto path = sample_path(seed, p.dt, p.t_past, p.t_fwd, p.spec.m);
        const GainOperator op(p.spec, PathView(path));
        const FixedPointResult res =
            op.iterate_fixed_point(op.default_initial_guess(), 1e-10, 200);
        const double t1 = std::min(5.0, p.t_fwd);
        const VerifyResult ver = op.verify_equilibrium(res, 0.0, t1);
        out.key("equilibrium").begin_object();
        out.key("iterations").value(res.iterations);
        out.key("rate_estimate").value(res.rate_estimate);
        out.key("final_residual").value(res.residuals.back());
        out.key("max_deviation").value(ver.max_deviation);
        out.key("pullback_gap").value(ver.pullback_gap);
        out.end_object();
        save_fixed_point_json(res, op.gain(), artifact(out_dir, "fixed_point.json"));
        save_input_csv(res.u_star, artifact(out_dir, "u_star.csv"));
        save_trajectory_csv(res.equilibrium, artifact(out_dir, "equilibrium.csv"));
    } else {
        out.key("note").value(
            "A is not cooperative or the gain is not < 1; the fixed-point pipeline is "
            "skipped and the drift condition is checked instead");
        const DriftCheckResult drift = drift_check(p.spec, 0.1, 10.0, 10000);
        out.key("drift_check").begin_object();
        out.key("ok").value(drift.ok);
        out.key("worst_margin").value(drift.worst_margin);
        out.key("epsilon").value(0.1);
        out.key("radius").value(10.0);
        out.key("samples").value(10000);
        out.end_object();
    }
    out.end_object();
    write_text_file(artifact(out_dir, "example_report.json"), out.str() + "\n");
}

}  // namespace sgsde
