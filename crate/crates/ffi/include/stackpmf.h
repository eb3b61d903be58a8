#ifndef STACKPMF_H
#define STACKPMF_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum SpmfStatus {
  SPMF_STATUS_OK = 0,
  SPMF_STATUS_NULL_POINTER = 1,
  SPMF_STATUS_EMPTY_INPUT = 2,
  SPMF_STATUS_INSUFFICIENT_SAMPLE = 3,
  SPMF_STATUS_PARAMETER_DOMAIN = 4,
  SPMF_STATUS_INVALID_DATA = 5,
  SPMF_STATUS_INVALID_PMF = 6,
  SPMF_STATUS_NUMERIC = 7,
  SPMF_STATUS_BUFFER_TOO_SMALL = 8,
  SPMF_STATUS_UNKNOWN_KIND = 9,
  SPMF_STATUS_PANIC = 10,
  SPMF_STATUS_OTHER = 11,
} SpmfStatus;

/**
 * Estimator selector for [`spmf_estimate`].
 */
typedef enum SpmfEstimator {
  SPMF_ESTIMATOR_EMPIRICAL = 0,
  SPMF_ESTIMATOR_MINIMAX = 1,
  SPMF_ESTIMATOR_REARRANGEMENT = 2,
  SPMF_ESTIMATOR_GRENANDER = 3,
  SPMF_ESTIMATOR_STACKED_REARRANGEMENT = 4,
  SPMF_ESTIMATOR_STACKED_GRENANDER = 5,
} SpmfEstimator;

/**
 * Shape fit stacked with the empirical estimator.
 */
typedef enum SpmfShape {
  SPMF_SHAPE_REARRANGEMENT = 0,
  SPMF_SHAPE_GRENANDER = 1,
} SpmfShape;

/**
 * Opaque confidence band.
 */
typedef struct SpmfBand SpmfBand;

/**
 * Opaque stacked fit.
 */
typedef struct SpmfFit SpmfFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (nul-terminated,
 * truncated to `cap`). Returns the full message length without the nul, or
 * 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `cap` writes.
 */
size_t spmf_last_error_message(char *buf, size_t cap);

/**
 * Library version as a static nul-terminated string.
 */
const char *spmf_version(void);

/**
 * Fits estimator `kind` (an [`SpmfEstimator`] value) to `counts[0..len]`.
 * The estimate has length `len`; `out` must hold at least that many values.
 *
 * # Safety
 * `counts` must be valid for `len` reads and `out` for `cap` writes.
 */
enum SpmfStatus spmf_estimate(const uint64_t *counts_ptr,
                              size_t len,
                              int32_t kind,
                              double *out,
                              size_t cap);

/**
 * Leave-one-out mixture weight and its quadratic coefficients.
 *
 * # Safety
 * `counts` must be valid for `len` reads; the output pointers must be valid.
 */
enum SpmfStatus spmf_cv_beta(const uint64_t *counts_ptr,
                             size_t len,
                             int32_t shape,
                             double *beta_hat,
                             double *a_n,
                             double *b_n);

/**
 * Stacked fit handle; release with [`spmf_fit_free`].
 *
 * # Safety
 * `counts` must be valid for `len` reads and `out` must be a valid pointer.
 */
enum SpmfStatus spmf_stacked_fit(const uint64_t *counts_ptr,
                                 size_t len,
                                 int32_t shape,
                                 struct SpmfFit **out);

/**
 * # Safety
 * `fit` must be null or a handle from [`spmf_stacked_fit`] not yet freed.
 */
void spmf_fit_free(struct SpmfFit *fit);

/**
 * Mixture weight of a fit; NaN for a null handle.
 *
 * # Safety
 * `fit` must be null or a live handle.
 */
double spmf_fit_beta_hat(const struct SpmfFit *fit);

/**
 * # Safety
 * `fit` must be null or a live handle.
 */
double spmf_fit_a_n(const struct SpmfFit *fit);

/**
 * # Safety
 * `fit` must be null or a live handle.
 */
double spmf_fit_b_n(const struct SpmfFit *fit);

/**
 * Nonzero when n = 1 and the empirical estimator was returned.
 *
 * # Safety
 * `fit` must be null or a live handle.
 */
int32_t spmf_fit_single_observation(const struct SpmfFit *fit);

/**
 * Length of the estimate vector; 0 for a null handle.
 *
 * # Safety
 * `fit` must be null or a live handle.
 */
size_t spmf_fit_len(const struct SpmfFit *fit);

/**
 * Copies the stacked estimate into `out`.
 *
 * # Safety
 * `fit` must be a live handle and `out` valid for `cap` writes.
 */
enum SpmfStatus spmf_fit_estimate(const struct SpmfFit *fit, double *out, size_t cap);

/**
 * Copies the shape-constrained component into `out`.
 *
 * # Safety
 * `fit` must be a live handle and `out` valid for `cap` writes.
 */
enum SpmfStatus spmf_fit_shape(const struct SpmfFit *fit, double *out, size_t cap);

/**
 * Nonincreasing least-squares fit of `values[0..len]` into `out[0..len]`.
 *
 * # Safety
 * `values` must be valid for `len` reads and `out` for `len` writes.
 */
enum SpmfStatus spmf_isotonic_decreasing(const double *values, size_t len, double *out);

/**
 * Values sorted in decreasing order into `out[0..len]`.
 *
 * # Safety
 * `values` must be valid for `len` reads and `out` for `len` writes.
 */
enum SpmfStatus spmf_rearrange_decreasing(const double *values, size_t len, double *out);

/**
 * Plug-in global band around `center[0..len]` for sample size `n`;
 * release with [`spmf_band_free`].
 *
 * # Safety
 * `center` must be valid for `len` reads and `out` must be a valid pointer.
 */
enum SpmfStatus spmf_global_band(const double *center,
                                 size_t len,
                                 uint64_t n,
                                 double alpha,
                                 size_t mc_reps,
                                 uint64_t seed,
                                 struct SpmfBand **out);

/**
 * # Safety
 * `band` must be null or a handle from [`spmf_global_band`] not yet freed.
 */
void spmf_band_free(struct SpmfBand *band);

/**
 * Monte-Carlo quantile; NaN for a null handle.
 *
 * # Safety
 * `band` must be null or a live handle.
 */
double spmf_band_q_hat(const struct SpmfBand *band);

/**
 * # Safety
 * `band` must be null or a live handle.
 */
size_t spmf_band_len(const struct SpmfBand *band);

/**
 * Copies the lower and upper envelopes; either output may be null to skip it.
 *
 * # Safety
 * `band` must be a live handle; non-null outputs must be valid for `cap` writes.
 */
enum SpmfStatus spmf_band_bounds(const struct SpmfBand *band,
                                 double *lower,
                                 double *upper,
                                 size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STACKPMF_H */
