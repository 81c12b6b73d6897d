#ifndef RSMA_H
#define RSMA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define RSMA_FRAMEWORK_PROPOSED 0

#define RSMA_FRAMEWORK_BENCHMARK1 1

#define RSMA_FRAMEWORK_BENCHMARK2 2

typedef enum RsmaStatus {
  RSMA_STATUS_OK = 0,
  RSMA_STATUS_NULL_POINTER = 1,
  RSMA_STATUS_INVALID_ARGUMENT = 2,
  RSMA_STATUS_INVALID_CONFIG = 3,
  RSMA_STATUS_DOMAIN = 4,
  RSMA_STATUS_PARSE = 5,
  RSMA_STATUS_IO = 6,
  RSMA_STATUS_PANIC = 7,
} RsmaStatus;

/**
 * Scenario configuration.
 */
typedef struct RsmaConfig RsmaConfig;

/**
 * Result of one solve.
 */
typedef struct RsmaReport RsmaReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *rsma_last_error_message(void);

const char *rsma_version(void);

/**
 * Default scenario. Free with [`rsma_config_free`].
 */
struct RsmaConfig *rsma_config_new(void);

/**
 * Parses `key = value` lines over the defaults.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RsmaStatus rsma_config_from_kv(const char *text_ptr, struct RsmaConfig **out);

/**
 * Sets one key. The scenario is left unchanged on failure.
 *
 * # Safety
 * `cfg` must come from this library; `key` and `value` must be
 * NUL-terminated strings.
 */
enum RsmaStatus rsma_config_set(struct RsmaConfig *cfg, const char *key, const char *value);

/**
 * # Safety
 * `cfg` must be null or come from this library and not be freed already.
 */
void rsma_config_free(struct RsmaConfig *cfg);

/**
 * Draws trial `trial` of the scenario and solves it with `framework`.
 *
 * # Safety
 * `cfg` must come from this library and `out` must be writable.
 */
enum RsmaStatus rsma_solve(const struct RsmaConfig *cfg,
                           uint32_t framework_code,
                           uint64_t trial,
                           struct RsmaReport **out);

/**
 * # Safety
 * `report` must be null or come from [`rsma_solve`] and not be freed already.
 */
void rsma_report_free(struct RsmaReport *report);

/**
 * Sum rate in bits/s, or NaN for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
double rsma_report_sum_rate(const struct RsmaReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
size_t rsma_report_iterations(const struct RsmaReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
bool rsma_report_converged(const struct RsmaReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
bool rsma_report_infeasible(const struct RsmaReport *report);

/**
 * Largest relative constraint residual, or NaN for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
double rsma_report_max_residual(const struct RsmaReport *report);

/**
 * Writes the beam count and block count.
 *
 * # Safety
 * `report` must be a live handle; `beams` and `blocks` must be writable.
 */
enum RsmaStatus rsma_report_dims(const struct RsmaReport *report, size_t *beams, size_t *blocks);

/**
 * Power in watts of `beam` on `block`.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum RsmaStatus rsma_report_beam_power(const struct RsmaReport *report,
                                       size_t beam,
                                       size_t block,
                                       double *out);

/**
 * Number of recorded multiplier trace rows.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t rsma_report_trace_len(const struct RsmaReport *report);

/**
 * Multiplier norms of trace row `row`: `lambda` receives the five values
 * `|l1|, |l2|, |l3|, |l4|, l5`.
 *
 * # Safety
 * `report` must be a live handle and `lambda` must point to 5 writable doubles.
 */
enum RsmaStatus rsma_report_trace_row(const struct RsmaReport *report, size_t row, double *lambda);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RSMA_H */
