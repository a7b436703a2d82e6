/*
 * dmnls: C interface to the dispersion-managed NLS laboratory.
 *
 * All functions return a dmnls_status. On failure, dmnls_last_error() returns a
 * description of the most recent error on the calling thread. Strings handed
 * out through char** parameters are owned by the caller and must be released
 * with dmnls_string_free().
 */
#ifndef DMNLS_DMNLS_H
#define DMNLS_DMNLS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DMNLS_BUILDING_LIBRARY)
#define DMNLS_API __declspec(dllexport)
#else
#define DMNLS_API __declspec(dllimport)
#endif
#else
#define DMNLS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dmnls_status {
  DMNLS_OK = 0,
  DMNLS_ERR_INVALID_ARGUMENT = 1,
  DMNLS_ERR_CONFIG = 2,
  DMNLS_ERR_IO = 3,
  DMNLS_ERR_SOLVER = 4,
  DMNLS_ERR_WRAPAROUND = 5,
  DMNLS_ERR_INTERNAL = 99
} dmnls_status;

typedef struct dmnls_config dmnls_config;
typedef struct dmnls_run dmnls_run;

/* Number of values per row returned by dmnls_run_norms:
 * t, mass, grad_l2, j_l2, sup, x_norm_partial, s_norm_partial. */
#define DMNLS_NORM_COLUMNS 7

DMNLS_API const char* dmnls_version(void);
DMNLS_API const char* dmnls_last_error(void);
DMNLS_API const char* dmnls_status_name(dmnls_status status);
DMNLS_API void dmnls_string_free(char* str);

/* Configuration */
DMNLS_API dmnls_status dmnls_config_default(dmnls_config** out);
DMNLS_API dmnls_status dmnls_config_load(const char* path, dmnls_config** out);
DMNLS_API dmnls_status dmnls_config_parse(const char* text, dmnls_config** out);
DMNLS_API dmnls_status dmnls_config_set(dmnls_config* config, const char* key, const char* value);
/* Canonical value text for key. */
DMNLS_API dmnls_status dmnls_config_get(const dmnls_config* config, const char* key, char** out);
DMNLS_API dmnls_status dmnls_config_to_text(const dmnls_config* config, char** out);
DMNLS_API dmnls_status dmnls_config_validate(const dmnls_config* config);
DMNLS_API void dmnls_config_free(dmnls_config* config);

/* Simulation. A run that aborts inside the solver still yields a handle
 * (truncated) and returns the solver's error status. */
DMNLS_API dmnls_status dmnls_simulate(const dmnls_config* config, dmnls_run** out);
DMNLS_API int dmnls_run_truncated(const dmnls_run* run);
DMNLS_API size_t dmnls_run_observation_count(const dmnls_run* run);
DMNLS_API dmnls_status dmnls_run_norms(const dmnls_run* run, size_t index, double out[DMNLS_NORM_COLUMNS]);
DMNLS_API dmnls_status dmnls_run_summary_json(const dmnls_run* run, char** out);
DMNLS_API dmnls_status dmnls_run_profile_json(const dmnls_run* run, char** out);
/* Writes norms.csv, profile.json, residuals.csv, run.json and snapshots/. */
DMNLS_API dmnls_status dmnls_run_write(const dmnls_run* run, const char* directory);
DMNLS_API void dmnls_run_free(dmnls_run* run);

/* Analysis */
DMNLS_API dmnls_status dmnls_fit_power_law(const double* t, const double* y, size_t n, double t_min,
                                           double t_max, double* slope, double* intercept, double* r2);
/* Fits log sup vs log t from a norms.csv file over [t_min, t_max]. */
DMNLS_API dmnls_status dmnls_fit_decay_csv(const char* norms_csv, double t_min, double t_max,
                                           char** out_json);
DMNLS_API dmnls_status dmnls_verify_identities(const dmnls_config* config, size_t cases, char** out_json);
DMNLS_API dmnls_status dmnls_compare(const dmnls_config* config, char** out_json);

/* Field snapshots (binary DMNLS1 format). values holds 2*n doubles (re, im). */
DMNLS_API dmnls_status dmnls_snapshot_write(const char* path, size_t n, double half_width, double t,
                                            const double* values);
DMNLS_API dmnls_status dmnls_snapshot_read(const char* path, size_t* n, double* half_width, double* t,
                                           double** values);
DMNLS_API void dmnls_buffer_free(double* values);

#ifdef __cplusplus
}
#endif

#endif /* DMNLS_DMNLS_H */
