#ifndef SPECFACT_H
#define SPECFACT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  SF_STATUS_INVALID_ARGUMENT = 2,
  SF_STATUS_IO = 3,
  SF_STATUS_SCHEMA = 4,
  SF_STATUS_DIMENSION = 5,
  SF_STATUS_NOT_HERMITIAN = 6,
  SF_STATUS_UNKNOWN_FIXTURE = 7,
  SF_STATUS_SINGULAR_DELTA = 8,
  /**
   * Any other numerical failure.
   */
  SF_STATUS_NUMERICAL = 9,
  SF_STATUS_PANIC = 10,
} SfStatus;

typedef enum {
  /**
   * Per-algorithm default.
   */
  SF_SCHEDULE_DEFAULT = 0,
  /**
   * `N = value · m · n`.
   */
  SF_SCHEDULE_PROPORTIONAL = 1,
  /**
   * `N = value · m`.
   */
  SF_SCHEDULE_PER_STEP = 2,
  /**
   * `N = value`.
   */
  SF_SCHEDULE_CONSTANT = 3,
} SfSchedule;

typedef enum {
  SF_DET_METHOD_FFT = 0,
  SF_DET_METHOD_DIRECT = 1,
} SfDetMethod;

typedef enum {
  SF_FM_PATH_DETERMINANTS = 0,
  SF_FM_PATH_POWER = 1,
} SfFmPath;

typedef enum {
  SF_DELTA_SOLVER_DENSE = 0,
  SF_DELTA_SOLVER_DISPLACEMENT = 1,
} SfDeltaSolver;

typedef enum {
  SF_ALGORITHM_JLE1 = 0,
  SF_ALGORITHM_JLE2 = 1,
  SF_ALGORITHM_JLE3 = 2,
  SF_ALGORITHM_WILSON = 3,
} SfAlgorithm;

/**
 * Laurent-polynomial matrix.
 */
typedef struct SfPolyMatrix SfPolyMatrix;

/**
 * Output of [`sf_factorize`].
 */
typedef struct SfResult SfResult;

/**
 * Tuning parameters; fill with [`sf_params_default`] before editing.
 */
typedef struct {
  SfSchedule schedule;
  double schedule_value;
  uint32_t kappa;
  double ratio;
  size_t scalar_iters;
  size_t wilson_iters;
  size_t scalar_grid;
  SfDetMethod det_method;
  SfFmPath fm_path;
  SfDeltaSolver delta_solver;
  double node_rcond_min;
  double delta_rcond_min;
} SfParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *sf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sf_version(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void sf_string_free(char *s);

/**
 * Builds a matrix from `2 · rows · cols · (hi − lo + 1)` interleaved doubles.
 *
 * # Safety
 * `data` must point to that many readable doubles; `out` must be writable.
 */
SfStatus sf_poly_matrix_new(size_t rows,
                            size_t cols,
                            int64_t lo,
                            int64_t hi,
                            const double *data,
                            SfPolyMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle from this library that has not been freed.
 */
void sf_poly_matrix_free(SfPolyMatrix *m);

/**
 * Writes the shape; any output pointer may be null.
 *
 * # Safety
 * `m` must be a live handle; non-null outputs must be writable.
 */
SfStatus sf_poly_matrix_shape(const SfPolyMatrix *m,
                              size_t *rows,
                              size_t *cols,
                              int64_t *lo,
                              int64_t *hi);

/**
 * Copies the interleaved coefficients into `out`, which holds `len` doubles.
 *
 * # Safety
 * `m` must be a live handle; `out` must have room for `len` doubles.
 */
SfStatus sf_poly_matrix_coeffs(const SfPolyMatrix *m, double *out, size_t len);

/**
 * Loads a coefficient file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
SfStatus sf_poly_matrix_load(const char *path, SfPolyMatrix **out);

/**
 * # Safety
 * `m` must be a live handle; `path` a NUL-terminated string.
 */
SfStatus sf_poly_matrix_save(const SfPolyMatrix *m, const char *path);

/**
 * Serializes to the coefficient-file JSON; free with [`sf_string_free`].
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
SfStatus sf_poly_matrix_to_json(const SfPolyMatrix *m, char **out);

/**
 * Built-in fixture. `factor` may be null; it receives null when the fixture
 * has no known factor.
 *
 * # Safety
 * `name` must be NUL-terminated; `density` must be writable.
 */
SfStatus sf_fixture(const char *name, SfPolyMatrix **density, SfPolyMatrix **factor);

/**
 * Random density `A A* + shift · I` with `A` of size `r` and degree `n`.
 *
 * # Safety
 * `out` must be writable.
 */
SfStatus sf_random_spd(size_t r, size_t n, uint64_t seed, double shift, SfPolyMatrix **out);

/**
 * `‖S − F F*‖` in the coefficient sup-norm.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
SfStatus sf_factorization_error(const SfPolyMatrix *density,
                                const SfPolyMatrix *factor,
                                double *out);

/**
 * Writes the library defaults into `out`.
 *
 * # Safety
 * `out` must be writable.
 */
SfStatus sf_params_default(SfParams *out);

/**
 * Factorizes `density`. `params` may be null for the defaults.
 *
 * # Safety
 * `density` must be a live handle, `params` null or readable, `out` writable.
 */
SfStatus sf_factorize(SfAlgorithm alg,
                      const SfPolyMatrix *density,
                      const SfParams *params,
                      SfResult **out);

/**
 * # Safety
 * `res` must be null or a live result handle.
 */
void sf_result_free(SfResult *res);

/**
 * Residual `‖S − S⁺ (S⁺)*‖` recorded with the result.
 *
 * # Safety
 * `res` must be a live handle; `out` writable.
 */
SfStatus sf_result_error(const SfResult *res, double *out);

/**
 * Copy of the factor as a new matrix handle.
 *
 * # Safety
 * `res` must be a live handle; `out` writable.
 */
SfStatus sf_result_factor(const SfResult *res, SfPolyMatrix **out);

/**
 * Run diagnostics as JSON; free with [`sf_string_free`].
 *
 * # Safety
 * `res` must be a live handle; `out` writable.
 */
SfStatus sf_result_diagnostics_json(const SfResult *res, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECFACT_H */
