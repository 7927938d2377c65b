#ifndef CONEDUAL_H
#define CONEDUAL_H

/* Generated by cbindgen from the conedual-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Verdict of a positive-definiteness check.
 */
typedef enum CdPdVerdict {
  /**
   * Certified: the Fourier transform is nonnegative everywhere.
   */
  CD_PD_CERTIFIED = 0,
  /**
   * Refuted: a point with strictly negative Fourier transform exists.
   */
  CD_PD_REFUTED = 1,
  /**
   * Neither certified nor refuted at the requested resolution.
   */
  CD_PD_INCONCLUSIVE = 2,
} CdPdVerdict;

/**
 * Status codes returned by every FFI entry point.
 */
typedef enum CdStatus {
  /**
   * Success; out parameters are populated.
   */
  CD_STATUS_OK = 0,
  /**
   * A pointer argument was null.
   */
  CD_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range or otherwise invalid.
   */
  CD_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The computation failed numerically (e.g. a linear program could not
   * be solved to the required tolerance).
   */
  CD_STATUS_NUMERICAL = 3,
  /**
   * An internal error; indicates a bug in the library.
   */
  CD_STATUS_INTERNAL = 4,
} CdStatus;

/**
 * Opaque handle to a finitely supported symmetric sequence on Z.
 */
typedef struct CdSequence CdSequence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a symmetric sequence on Z from its values at 0, 1, ..., len-1;
 * the value at -k mirrors the value at k. Returns null on invalid input.
 *
 * # Safety
 * `values` must point to `len` readable doubles.
 */
struct CdSequence *cd_seq_from_half_values(const double *values, uintptr_t len);

/**
 * Releases a sequence handle. Passing null is a no-op.
 *
 * # Safety
 * `seq` must be null or a pointer returned by `cd_seq_from_half_values`
 * that has not been freed already.
 */
void cd_seq_free(struct CdSequence *seq);

/**
 * Reads the value of the sequence at index `k` (symmetric in `k`).
 *
 * # Safety
 * `seq` and `out_value` must be valid pointers.
 */
enum CdStatus cd_seq_value_at(const struct CdSequence *seq, int64_t k, double *out_value);

/**
 * Checks whether the sequence is positive definite (its Fourier transform
 * is nonnegative on the circle), with a certified grid-plus-margin test at
 * `grid_points` sample points and tolerance `eps_pd` (pass 0 for the
 * default). Writes the verdict and a certified lower bound for the minimum
 * of the Fourier transform.
 *
 * # Safety
 * `seq`, `out_verdict`, and `out_lower_bound` must be valid pointers.
 */
enum CdStatus cd_check_pd(const struct CdSequence *seq,
                          uintptr_t grid_points,
                          double eps_pd,
                          enum CdPdVerdict *out_verdict,
                          double *out_lower_bound);

/**
 * Computes a certified two-sided bracket for the extremal ratio K(L, N):
 * the dual linear program at truncation radius `truncation_radius` and
 * grid resolution `grid_points` gives the upper side, and a randomized
 * autocorrelation search with `search_budget` trials seeded by `seed`
 * gives the lower side. On success `out_lower <= K(L, N) <= out_upper`.
 *
 * # Safety
 * `out_lower` and `out_upper` must be valid pointers.
 */
enum CdStatus cd_wiener_bracket(uintptr_t l,
                                uintptr_t n,
                                uintptr_t truncation_radius,
                                uintptr_t grid_points,
                                uintptr_t search_budget,
                                uint64_t seed,
                                double *out_lower,
                                double *out_upper);

/**
 * Returns a static, null-terminated version string.
 */
const char *cd_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONEDUAL_H */
