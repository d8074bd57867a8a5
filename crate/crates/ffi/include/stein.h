/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef STEIN_H
#define STEIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum SteinStatus {
  STEIN_STATUS_OK = 0,
  STEIN_STATUS_INVALID_PARAMETER = 1,
  STEIN_STATUS_INVALID_DISTRIBUTION = 2,
  STEIN_STATUS_QUADRATURE = 3,
  STEIN_STATUS_INSUFFICIENT_SAMPLES = 4,
  STEIN_STATUS_ORACLE_INFEASIBLE = 5,
  STEIN_STATUS_MODEL_BUG = 6,
  STEIN_STATUS_UNKNOWN = 7,
  STEIN_STATUS_CONFIG = 8,
  STEIN_STATUS_IO = 9,
  STEIN_STATUS_NULL_POINTER = 10,
  STEIN_STATUS_INVALID_UTF8 = 11,
  STEIN_STATUS_PANIC = 12,
} SteinStatus;

/**
 * Metric of a bound report.
 */
typedef enum SteinMetric {
  STEIN_METRIC_TOTAL_VARIATION = 0,
  STEIN_METRIC_KOLMOGOROV = 1,
  STEIN_METRIC_WASSERSTEIN = 2,
} SteinMetric;

/**
 * A bound evaluated by name.
 */
typedef struct SteinBound SteinBound;

/**
 * A probability mass function on a run of consecutive integers.
 */
typedef struct SteinPmf SteinPmf;

/**
 * One experiment run: bound, measured distance and its interval.
 */
typedef struct SteinVerifyResult {
  double bound;
  double distance;
  double ci_low;
  double ci_high;
  bool exact;
  bool sound;
} SteinVerifyResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *stein_version(void);

/**
 * Message of the last failed call on this thread; empty after a success. Returns the full
 * message length; at most `len − 1` bytes are written.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t stein_last_error_message(char *buf, size_t len);

/**
 * A pmf with P(offset + i) = probs[i]; `tail_mass` is probability not represented.
 *
 * # Safety
 * `probs` must point to `len` doubles; `out` must be writable.
 */
enum SteinStatus stein_pmf_new(int64_t offset,
                               const double *probs,
                               size_t len,
                               double tail_mass,
                               struct SteinPmf **out);

/**
 * Bin(n, p).
 *
 * # Safety
 * `out` must be writable.
 */
enum SteinStatus stein_pmf_binomial(uint64_t n, double p, struct SteinPmf **out);

/**
 * Po(λ), truncated where the remaining mass drops below `tol` (kept as tail mass).
 *
 * # Safety
 * `out` must be writable.
 */
enum SteinStatus stein_pmf_poisson(double lambda, double tol, struct SteinPmf **out);

/**
 * Release a pmf; null is ignored.
 *
 * # Safety
 * `pmf` must come from a `stein_pmf_*` constructor and not be used afterwards.
 */
void stein_pmf_free(struct SteinPmf *pmf);

/**
 * Mean and variance of a pmf.
 *
 * # Safety
 * `pmf` must be a live handle; the out-pointers must be writable.
 */
enum SteinStatus stein_pmf_moments(const struct SteinPmf *pmf, double *mean, double *variance);

/**
 * P(X = k).
 *
 * # Safety
 * `pmf` must be a live handle; `out` must be writable.
 */
enum SteinStatus stein_pmf_mass(const struct SteinPmf *pmf, int64_t k, double *out);

/**
 * Distance between two pmfs (tail mass charged as an upper correction). `metric` is a
 * `SteinMetric` value, taken as an integer so that out-of-range codes are reported.
 *
 * # Safety
 * `p` and `q` must be live handles; `out` must be writable.
 */
enum SteinStatus stein_pmf_distance(const struct SteinPmf *p,
                                    const struct SteinPmf *q,
                                    int32_t metric,
                                    double *out);

/**
 * Evaluate a registered bound calculator. `params` holds `key = value` pairs separated by
 * newlines or ';' (lists are comma separated), or a JSON object.
 *
 * # Safety
 * `theorem` and `params` must be NUL-terminated strings; `out` must be writable.
 */
enum SteinStatus stein_bound_evaluate(const char *theorem,
                                      const char *params,
                                      struct SteinBound **out);

/**
 * Release a bound; null is ignored.
 *
 * # Safety
 * `bound` must come from `stein_bound_evaluate` and not be used afterwards.
 */
void stein_bound_free(struct SteinBound *bound);

/**
 * Value, Monte Carlo radius and metric of a bound.
 *
 * # Safety
 * `bound` must be a live handle; the out-pointers must be writable.
 */
enum SteinStatus stein_bound_value(const struct SteinBound *bound,
                                   double *value,
                                   double *ci_radius,
                                   enum SteinMetric *metric);

/**
 * The full report (inputs, terms, notes) as JSON. Returns the JSON length; at most
 * `len − 1` bytes are written. Returns 0 for a null handle.
 *
 * # Safety
 * `bound` must be null or a live handle; `buf` must be null or hold `len` writable bytes.
 */
size_t stein_bound_json(const struct SteinBound *bound, char *buf, size_t len);

/**
 * Run a registered experiment at its default oracle, with optional parameter overrides
 * (same syntax as `stein_bound_evaluate`; null for none).
 *
 * # Safety
 * `experiment` must be a NUL-terminated string, `params` null or one; `out` must be writable.
 */
enum SteinStatus stein_verify(const char *experiment,
                              const char *params,
                              uint64_t seed,
                              struct SteinVerifyResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEIN_H */
