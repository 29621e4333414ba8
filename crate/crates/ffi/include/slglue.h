#ifndef SLGLUE_H
#define SLGLUE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SlgStatus {
  SLG_STATUS_OK = 0,
  SLG_STATUS_NULL_POINTER = 1,
  SLG_STATUS_INVALID_UTF8 = 2,
  SLG_STATUS_INVALID_PARAMETER = 3,
  SLG_STATUS_CONFIG_PARSE = 4,
  SLG_STATUS_CONFIG_INVALID = 5,
  SLG_STATUS_NO_CONVERGENCE = 6,
  SLG_STATUS_NO_REGION = 7,
  SLG_STATUS_IO = 8,
  SLG_STATUS_INTERNAL = 9,
  SLG_STATUS_PANIC = 10,
} SlgStatus;

// Parsed and validated experiment configuration.
typedef struct SlgConfig SlgConfig;

// Model parameters for single evaluations.
typedef struct SlgParams SlgParams;

// Result of a suite run.
typedef struct SlgReport SlgReport;

typedef struct SlgCounts {
  size_t total;
  size_t passed;
  size_t failed;
  size_t exploratory;
} SlgCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a successful call.
// The pointer stays valid until the next call into the library from this thread.
const char *slg_last_error(void);

// Parses configuration text (`key = value` lines) into a new handle.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum SlgStatus slg_config_parse(const char *text, struct SlgConfig **out);

// # Safety
// `cfg` must come from [`slg_config_parse`] and not be used afterwards; null is ignored.
void slg_config_free(struct SlgConfig *cfg);

// Number of load-time warnings of the configuration.
//
// # Safety
// `cfg` must be a live handle or null.
size_t slg_config_warning_count(const struct SlgConfig *cfg);

// Runs the configured suite.
//
// # Safety
// `cfg` must be a live handle and `out` a valid pointer.
enum SlgStatus slg_run_suite(const struct SlgConfig *cfg, struct SlgReport **out);

// # Safety
// `rep` must come from [`slg_run_suite`] and not be used afterwards; null is ignored.
void slg_report_free(struct SlgReport *rep);

// # Safety
// `rep` must be a live handle and `out` a valid pointer.
enum SlgStatus slg_report_counts(const struct SlgReport *rep, struct SlgCounts *out);

// The summary as JSON text; release it with [`slg_string_free`].
//
// # Safety
// `rep` must be a live handle and `out` a valid pointer.
enum SlgStatus slg_report_summary_json(const struct SlgReport *rep, char **out);

// Writes the curves, summary and table files into `dir`.
//
// # Safety
// `rep` must be a live handle and `dir` a NUL-terminated string.
enum SlgStatus slg_report_emit(const struct SlgReport *rep, const char *dir);

// # Safety
// `s` must come from this library and not be used afterwards; null is ignored.
void slg_string_free(char *s);

// Default model parameters.
struct SlgParams *slg_params_default(void);

// # Safety
// `p` must come from [`slg_params_default`] and not be used afterwards; null is ignored.
void slg_params_free(struct SlgParams *p);

// Sets a numeric field by name (`m`, `a`, `l`, `r0`, `r0_prime`, `c1`, `c2`, `kappa`,
// `eta1`, `eta2`, `c_eta1`, `c_eta2`, `part_a`, `part_b`, `quad_tol`, `fit_tol`).
// Invariants are checked by [`slg_params_validate`].
//
// # Safety
// `p` must be a live handle and `key` a NUL-terminated string.
enum SlgStatus slg_params_set(struct SlgParams *p, const char *key, double value);

// Checks every parameter invariant; the message lists all violations.
//
// # Safety
// `p` must be a live handle.
enum SlgStatus slg_params_validate(const struct SlgParams *p);

// Table exponent of a phase quantity (`epsL65_Q`, `depsL6_P`, ...) at `(c1, c2, m)`.
//
// # Safety
// `tag` must be a NUL-terminated string and `out` a valid pointer.
enum SlgStatus slg_predicted_exponent(const char *tag,
                                      double c1,
                                      double c2,
                                      uint32_t m,
                                      double *out);

// One sample of a phase quantity at `t`.
//
// # Safety
// `p` must be a live handle, `tag` a NUL-terminated string and `out` a valid pointer.
enum SlgStatus slg_phase_value(const struct SlgParams *p, const char *tag, double t, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SLGLUE_H */
