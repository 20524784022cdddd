/* Public C API of the sgsde shared library.
 *
 * The library verifies small-gain hypotheses for additive-noise systems
 * dX = [AX + h(X)]dt + sigma dW, constructs the random equilibrium by
 * fixed-point iteration of the gain operator, and estimates stationary
 * distributions. All state lives behind opaque handles; every call returns
 * a status code and a thread-local message is kept for the last failure.
 */
#ifndef SGSDE_H
#define SGSDE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SGSDE_API __declspec(dllexport)
#else
#define SGSDE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgsde_status {
    SGSDE_OK = 0,
    SGSDE_ERROR_VALIDATION = 1, /* bad configuration or misuse */
    SGSDE_ERROR_NUMERIC = 2,    /* divergence, non-convergence */
    SGSDE_ERROR_IO = 3,
    SGSDE_ERROR_ARGUMENT = 4    /* null handle / null output pointer */
} sgsde_status;

typedef struct sgsde_system sgsde_system;
typedef struct sgsde_path sgsde_path;
typedef struct sgsde_trajectory sgsde_trajectory;

typedef struct sgsde_run_options {
    int has_seed;       /* nonzero: seed overrides the config */
    uint64_t seed;
    int threads;        /* 0: hardware concurrency */
} sgsde_run_options;

SGSDE_API const char* sgsde_version(void);

/* Message for the most recent failure on this thread; never NULL. */
SGSDE_API const char* sgsde_last_error(void);

/* Frees strings returned through char** out parameters. */
SGSDE_API void sgsde_string_free(char* s);

/* ---- systems ---- */

/* Builds a system from the "system" schema used in run configurations:
 * {"A": [[..]], "sigma": [[..]], "h": {...}, "L": ..}, or a full run
 * configuration (the system section is extracted). */
SGSDE_API sgsde_status sgsde_system_from_json(const char* json_text, sgsde_system** out);

/* Built-in example systems: "5.1", "5.2", "5.3", "6.1". */
SGSDE_API sgsde_status sgsde_system_preset(const char* id, sgsde_system** out);

SGSDE_API void sgsde_system_free(sgsde_system* sys);

SGSDE_API int sgsde_system_dim(const sgsde_system* sys);
SGSDE_API int sgsde_system_noise_dim(const sgsde_system* sys);

/* Small-gain report as a JSON document (caller frees via sgsde_string_free).
 * t_max <= 0 selects the default horizon 20/|lambda|. */
SGSDE_API sgsde_status sgsde_small_gain_report_json(const sgsde_system* sys, double t_max,
                                                    char** out_json);

/* ---- noise paths ---- */

SGSDE_API sgsde_status sgsde_path_sample(uint64_t seed, double dt, double t_past, double t_fwd,
                                         int m, sgsde_path** out);
SGSDE_API void sgsde_path_free(sgsde_path* path);
SGSDE_API sgsde_status sgsde_path_save_csv(const sgsde_path* path, const char* filename);

/* ---- trajectories ---- */

SGSDE_API void sgsde_trajectory_free(sgsde_trajectory* traj);
SGSDE_API int64_t sgsde_trajectory_size(const sgsde_trajectory* traj);
SGSDE_API int sgsde_trajectory_dim(const sgsde_trajectory* traj);
SGSDE_API double sgsde_trajectory_time(const sgsde_trajectory* traj, int64_t i);
/* Copies state i into out_state (dim doubles). */
SGSDE_API sgsde_status sgsde_trajectory_state(const sgsde_trajectory* traj, int64_t i,
                                              double* out_state);
SGSDE_API sgsde_status sgsde_trajectory_save_csv(const sgsde_trajectory* traj,
                                                 const char* filename);

/* ---- dynamics ---- */

SGSDE_API sgsde_status sgsde_simulate(const sgsde_system* sys, const sgsde_path* path,
                                      const double* x0, double t0, double t1,
                                      sgsde_trajectory** out);

/* State at time 0 of the solution started at x at time -t on the same path. */
SGSDE_API sgsde_status sgsde_pullback(const sgsde_system* sys, const sgsde_path* path,
                                      const double* x, double t, double* out_state);

/* ---- gain operator ---- */

/* Runs the fixed-point iteration of the gain operator and writes the
 * equilibrium trajectory handle plus a JSON summary (iterations, residual
 * history, rate estimate). Either output pointer may be NULL. */
SGSDE_API sgsde_status sgsde_equilibrium(const sgsde_system* sys, const sgsde_path* path,
                                         double tol, int max_iter,
                                         sgsde_trajectory** out_equilibrium, char** out_json);

/* ---- command runner (the CLI is a thin shell over these) ---- */

/* command: check | simulate | pullback | equilibrium | stationary.
 * config_json is a full run configuration; artifacts land in out_dir. */
SGSDE_API sgsde_status sgsde_run_command(const char* command, const char* config_json,
                                         const char* out_dir, const sgsde_run_options* opts);

/* Full pipeline on a built-in preset with a comparison report against its
 * reference bounds. */
SGSDE_API sgsde_status sgsde_run_example(const char* preset_id, const char* out_dir,
                                         const sgsde_run_options* opts);

/* Config document equivalent to a built-in preset. */
SGSDE_API sgsde_status sgsde_preset_config_json(const char* preset_id, char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SGSDE_H */
