#include "sgsde/sgsde.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "core/commands.hpp"
#include "core/jsonio.hpp"
#include "core/config.hpp"
#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/gain.hpp"
#include "core/noise.hpp"
#include "core/presets.hpp"

struct sgsde_system {
    sgsde::SystemSpec spec;
};

struct sgsde_path {
    std::shared_ptr<const sgsde::NoisePath> path;
};

struct sgsde_trajectory {
    sgsde::Trajectory traj;
};

namespace {

thread_local std::string g_last_error = "";

sgsde_status set_error(sgsde_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

// Runs fn, translating the C++ error taxonomy into status codes.
template <typename Fn>
sgsde_status guarded(Fn&& fn) {
    try {
        fn();
        return SGSDE_OK;
    } catch (const sgsde::ValidationError& e) {
        return set_error(SGSDE_ERROR_VALIDATION, e.what());
    } catch (const sgsde::NumericError& e) {
        return set_error(SGSDE_ERROR_NUMERIC, e.what());
    } catch (const sgsde::IoError& e) {
        return set_error(SGSDE_ERROR_IO, e.what());
    } catch (const std::exception& e) {
        return set_error(SGSDE_ERROR_VALIDATION, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

sgsde::RunOptions to_run_options(const sgsde_run_options* opts) {
    sgsde::RunOptions ro;
    if (opts) {
        if (opts->has_seed) ro.seed_override = opts->seed;
        ro.threads = opts->threads;
    }
    return ro;
}

}  // namespace

extern "C" {

const char* sgsde_version(void) {
    return "0.1.0";
}

const char* sgsde_last_error(void) {
    return g_last_error.c_str();
}

void sgsde_string_free(char* s) {
    std::free(s);
}

sgsde_status sgsde_system_from_json(const char* json_text, sgsde_system** out) {
    if (!json_text || !out) return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    return guarded([&] {
        // Accept either a bare system object or a full run configuration.
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(json_text);
        } catch (const nlohmann::json::parse_error& e) {
            throw sgsde::ValidationError(std::string("not well-formed JSON: ") + e.what());
        }
        std::string config_text;
        if (doc.is_object() && doc.contains("system")) {
            config_text = json_text;
        } else {
            nlohmann::json wrapper;
            wrapper["system"] = doc;
            wrapper["grid"] = {{"dt", 0.01}, {"t_past", 1.0}, {"t_fwd", 0.0}};
            config_text = wrapper.dump();
        }
        sgsde::RunConfig cfg = sgsde::parse_config(config_text);
        *out = new sgsde_system{std::move(cfg.system)};
    });
}

sgsde_status sgsde_system_preset(const char* id, sgsde_system** out) {
    if (!id || !out) return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    return guarded([&] { *out = new sgsde_system{sgsde::make_preset(id).spec}; });
}

void sgsde_system_free(sgsde_system* sys) {
    delete sys;
}

int sgsde_system_dim(const sgsde_system* sys) {
    return sys ? sys->spec.d : 0;
}

int sgsde_system_noise_dim(const sgsde_system* sys) {
    return sys ? sys->spec.m : 0;
}

sgsde_status sgsde_small_gain_report_json(const sgsde_system* sys, double t_max,
                                          char** out_json) {
    if (!sys || !out_json) return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    return guarded([&] {
        const sgsde::SmallGainReport rep = sgsde::small_gain_report(sys->spec, t_max);
        *out_json = dup_string(sgsde::small_gain_report_json(rep));
    });
}

sgsde_status sgsde_path_sample(uint64_t seed, double dt, double t_past, double t_fwd, int m,
                               sgsde_path** out) {
    if (!out) return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    return guarded([&] { *out = new sgsde_path{sgsde::sample_path(seed, dt, t_past, t_fwd, m)}; });
}

void sgsde_path_free(sgsde_path* path) {
    delete path;
}

sgsde_status sgsde_path_save_csv(const sgsde_path* path, const char* filename) {
    if (!path || !filename) return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    return guarded([&] { sgsde::save_path_csv(*path->path, filename); });
}

void sgsde_trajectory_free(sgsde_trajectory* traj) {
    delete traj;
}

int64_t sgsde_trajectory_size(const sgsde_trajectory* traj) {
    return traj ? traj->traj.size() : 0;
}

int sgsde_trajectory_dim(const sgsde_trajectory* traj) {
    return traj ? traj->traj.dim() : 0;
}

double sgsde_trajectory_time(const sgsde_trajectory* traj, int64_t i) {
    return traj ? traj->traj.time(i) : 0.0;
}

sgsde_status sgsde_trajectory_state(const sgsde_trajectory* traj, int64_t i, double* out_state) {
    if (!traj || !out_state) return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    if (i < 0 || i >= traj->traj.size()) {
        return set_error(SGSDE_ERROR_VALIDATION, "trajectory index out of range");
    }
    const sgsde::Vector v = traj->traj.state(i);
    for (int j = 0; j < traj->traj.dim(); ++j) out_state[j] = v(j);
    return SGSDE_OK;
}

sgsde_status sgsde_trajectory_save_csv(const sgsde_trajectory* traj, const char* filename) {
    if (!traj || !filename) return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    return guarded([&] { sgsde::save_trajectory_csv(traj->traj, filename); });
}

sgsde_status sgsde_simulate(const sgsde_system* sys, const sgsde_path* path, const double* x0,
                            double t0, double t1, sgsde_trajectory** out) {
    if (!sys || !path || !x0 || !out) return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    return guarded([&] {
        sgsde::Vector x(sys->spec.d);
        for (int j = 0; j < sys->spec.d; ++j) x(j) = x0[j];
        *out = new sgsde_trajectory{
            sgsde::integrate_forward(sys->spec, sgsde::PathView(path->path), x, t0, t1)};
    });
}

sgsde_status sgsde_pullback(const sgsde_system* sys, const sgsde_path* path, const double* x,
                            double t, double* out_state) {
    if (!sys || !path || !x || !out_state) {
        return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    }
    return guarded([&] {
        sgsde::Vector v(sys->spec.d);
        for (int j = 0; j < sys->spec.d; ++j) v(j) = x[j];
        const sgsde::Vector p = sgsde::pullback(sys->spec, sgsde::PathView(path->path), v, t);
        for (int j = 0; j < sys->spec.d; ++j) out_state[j] = p(j);
    });
}

sgsde_status sgsde_equilibrium(const sgsde_system* sys, const sgsde_path* path, double tol,
                               int max_iter, sgsde_trajectory** out_equilibrium,
                               char** out_json) {
    if (!sys || !path) return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    return guarded([&] {
        const sgsde::GainOperator op(sys->spec, sgsde::PathView(path->path));
        const sgsde::FixedPointResult res =
            op.iterate_fixed_point(op.default_initial_guess(), tol, max_iter);
        if (out_json) {
            sgsde::JsonWriter w;
            w.begin_object();
            w.key("iterations").value(res.iterations);
            w.key("rate_estimate").value(res.rate_estimate);
            w.key("gain").value(op.gain());
            w.key("residuals").value(res.residuals);
            w.end_object();
            *out_json = dup_string(w.str());
        }
        if (out_equilibrium) *out_equilibrium = new sgsde_trajectory{res.equilibrium};
    });
}

sgsde_status sgsde_run_command(const char* command, const char* config_json, const char* out_dir,
                               const sgsde_run_options* opts) {
    if (!command || !config_json || !out_dir) {
        return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    }
    return guarded([&] {
        const sgsde::RunConfig cfg = sgsde::parse_config(config_json);
        sgsde::run_command(command, cfg, out_dir, to_run_options(opts));
    });
}

sgsde_status sgsde_run_example(const char* preset_id, const char* out_dir,
                               const sgsde_run_options* opts) {
    if (!preset_id || !out_dir) return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    return guarded([&] { sgsde::run_example(preset_id, out_dir, to_run_options(opts)); });
}

sgsde_status sgsde_preset_config_json(const char* preset_id, char** out_json) {
    if (!preset_id || !out_json) return set_error(SGSDE_ERROR_ARGUMENT, "null argument");
    return guarded([&] { *out_json = dup_string(sgsde::preset_config_json(preset_id)); });
}

}  // extern "C"
