#ifndef FOCALFORGE_CAPI_H
#define FOCALFORGE_CAPI_H

/* C interface to the focalforge experiment runner. All entry points are
 * thread-compatible: distinct handles may be used from distinct threads.
 * Strings returned by ff_* functions are owned by the handle (or are
 * static) and stay valid until the next call on the same handle. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ff_experiment ff_experiment;

typedef enum ff_status {
  FF_OK = 0,             /* ran clean */
  FF_FINDINGS = 1,       /* ran, reports carry findings */
  FF_INVALID_CONFIG = 2, /* schema violation; see ff_experiment_error */
  FF_RUNTIME_ERROR = 3   /* failed to run */
} ff_status;

/* Library version string, static storage. */
const char* ff_version(void);

/* JSON array describing the built-in scenarios; static storage. */
const char* ff_list_scenarios(void);

/* Create an experiment from a JSON configuration document. On failure
 * returns the error status and, when `out` is non-null, leaves a handle
 * carrying the error message (destroy it as usual). */
ff_status ff_experiment_create(const char* config_json, ff_experiment** out);
ff_status ff_experiment_create_from_file(const char* path, ff_experiment** out);

void ff_experiment_destroy(ff_experiment* handle);

/* Overrides applied after creation (CLI flags). */
ff_status ff_experiment_set_seed(ff_experiment* handle, uint64_t seed);
ff_status ff_experiment_set_out_dir(ff_experiment* handle, const char* dir);
ff_status ff_experiment_set_tol_scale(ff_experiment* handle, double scale);

/* Run: writes the manifest and per-operation reports under the configured
 * output directory. Returns FF_OK, FF_FINDINGS, or an error status. */
ff_status ff_experiment_run(ff_experiment* handle);

/* Last error message for the handle; empty string when none. */
const char* ff_experiment_error(const ff_experiment* handle);

/* Serialized result report of the last run ("" before a successful run). */
const char* ff_experiment_report(const ff_experiment* handle);

/* Newline-separated list of files written by the last run. */
const char* ff_experiment_files(const ff_experiment* handle);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FOCALFORGE_CAPI_H */
