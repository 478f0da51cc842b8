/* C interface to the fvpnet simulator. Every function returns a status code;
 * on failure fvp_last_error() describes the problem for the calling thread. */
#ifndef FVPNET_FVPNET_H
#define FVPNET_FVPNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FVP_API __declspec(dllexport)
#else
#define FVP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fvp_status {
  FVP_OK = 0,
  FVP_ERR_NULL = 1,
  FVP_ERR_CONFIG = 2,
  FVP_ERR_INVALID_ARGUMENT = 3,
  FVP_ERR_NUMERIC = 4,
  FVP_ERR_IO = 5,
  FVP_ERR_CHECK_FAILED = 6,
  FVP_ERR_INTERNAL = 7
} fvp_status;

typedef enum fvp_variant { FVP_VARIANT_CUCKER = 0, FVP_VARIANT_LOG = 1 } fvp_variant;

typedef struct fvp_scenario fvp_scenario;
typedef struct fvp_trajectory fvp_trajectory;
typedef struct fvp_reports fvp_reports;
typedef struct fvp_curve fvp_curve;

FVP_API const char* fvp_version(void);
/* Message of the last failed call on this thread; "" if none. */
FVP_API const char* fvp_last_error(void);

/* ---- scenarios ---- */
FVP_API fvp_status fvp_scenario_from_file(const char* path, fvp_scenario** out);
FVP_API fvp_status fvp_scenario_from_string(const char* text, const char* base_dir, fvp_scenario** out);
FVP_API fvp_status fvp_scenario_example1(fvp_variant variant, uint64_t seed, size_t horizon, fvp_scenario** out);
FVP_API fvp_status fvp_scenario_set_seed(fvp_scenario* s, uint64_t seed);
FVP_API fvp_status fvp_scenario_set_horizon(fvp_scenario* s, size_t horizon);
/* Overrides output.dump_mixing. */
FVP_API fvp_status fvp_scenario_set_dump_mixing(fvp_scenario* s, int enabled);
FVP_API fvp_status fvp_scenario_shape(const fvp_scenario* s, size_t* agents, size_t* dim);
/* Writes min(len, dim) entries of the consensus optimum s*. */
FVP_API fvp_status fvp_scenario_reference(const fvp_scenario* s, double* out, size_t len);
/* Output directory named in the config ("out" when unset). */
FVP_API const char* fvp_scenario_output_dir(const fvp_scenario* s);
/* output.plots from the config (1 when unset). */
FVP_API int fvp_scenario_plots(const fvp_scenario* s);
FVP_API void fvp_scenario_free(fvp_scenario* s);

/* ---- runs ---- */
FVP_API fvp_status fvp_run(const fvp_scenario* s, fvp_trajectory** out);
/* Number of records, horizon + 1. */
FVP_API size_t fvp_trajectory_length(const fvp_trajectory* t);
FVP_API fvp_status fvp_trajectory_error(const fvp_trajectory* t, size_t index, double* out);
FVP_API fvp_status fvp_trajectory_residual(const fvp_trajectory* t, size_t index, double* out);
/* Copies min(len, agents*dim) entries of x_T, agent-major. */
FVP_API fvp_status fvp_trajectory_final_state(const fvp_trajectory* t, double* out, size_t len);
/* Writes trajectory.csv and metrics.csv (and mixing.csv when enabled) into dir,
 * plus the SVG figures when plots is nonzero. */
FVP_API fvp_status fvp_trajectory_write(const fvp_trajectory* t, const fvp_scenario* s, const char* dir,
                                        int plots);
FVP_API void fvp_trajectory_free(fvp_trajectory* t);

/* ---- checks ---- */
/* Returns FVP_OK when every selected check passes, FVP_ERR_CHECK_FAILED
 * otherwise; *out is set in both cases. */
FVP_API fvp_status fvp_check(const fvp_scenario* s, fvp_reports** out);
FVP_API size_t fvp_reports_count(const fvp_reports* r);
FVP_API const char* fvp_reports_name(const fvp_reports* r, size_t index);
FVP_API int fvp_reports_passed(const fvp_reports* r, size_t index);
FVP_API double fvp_reports_worst_margin(const fvp_reports* r, size_t index);
/* Full human-readable listing. */
FVP_API const char* fvp_reports_text(const fvp_reports* r);
/* Writes checks.csv and checks.txt into dir. */
FVP_API fvp_status fvp_reports_write(const fvp_reports* r, const char* dir);
FVP_API void fvp_reports_free(fvp_reports* r);

/* ---- Monte-Carlo ---- */
/* threads = 0 uses the hardware concurrency. */
FVP_API fvp_status fvp_mc(const fvp_scenario* s, size_t runs, size_t horizon, size_t threads, fvp_curve** out);
FVP_API size_t fvp_curve_length(const fvp_curve* c);
FVP_API fvp_status fvp_curve_value(const fvp_curve* c, size_t t, double* mean, double* half_width);
/* Writes mean_square.csv (and mean_square.svg when plots is nonzero). */
FVP_API fvp_status fvp_curve_write(const fvp_curve* c, const char* dir, int plots);
FVP_API void fvp_curve_free(fvp_curve* c);

/* Regenerates the SVG figures from a trajectory CSV. */
FVP_API fvp_status fvp_render_plots(const char* trajectory_csv, const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* FVPNET_FVPNET_H */
