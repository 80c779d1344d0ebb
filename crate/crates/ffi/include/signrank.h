#ifndef SIGNRANK_H
#define SIGNRANK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes.
 */
typedef enum SrStatus {
  SR_STATUS_OK = 0,
  SR_STATUS_NULL_POINTER = 1,
  SR_STATUS_INVALID_UTF8 = 2,
  SR_STATUS_PARSE_ERROR = 3,
  SR_STATUS_INVALID_ARGUMENT = 4,
  /**
   * The value does not fit the output type.
   */
  SR_STATUS_OVERFLOW = 5,
  SR_STATUS_INTERNAL = 6,
  SR_STATUS_PANIC = 7,
} SrStatus;

/**
 * Opaque certificate handle; keeps the predicate it was built for.
 */
typedef struct SrCertificate SrCertificate;

/**
 * Opaque predicate handle.
 */
typedef struct SrPredicate SrPredicate;

/**
 * Verdicts of a certificate check. `rank` is −1 when the explicit matrix
 * was not built.
 */
typedef struct SrVerifyReport {
  bool sign_ok;
  bool support_ok;
  bool structural_ok;
  bool power_bound_ok;
  bool levels_consistent;
  bool spectrum_consistent;
  bool support_consistent;
  bool bound_consistent;
  bool rank_checked;
  bool rank_ok;
  int64_t rank;
  bool all_ok;
} SrVerifyReport;

/**
 * Summary of a protocol run. Exact values are rounded to double.
 */
typedef struct SrSimulation {
  double exact_bias;
  double correct_prob;
  double empirical_freq;
  double std_error;
  uint64_t trials;
  uint64_t d;
  uint64_t cost_bits;
} SrSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a sign string (`"--+++"`) or family expression
 * (`"threshold:n=16,t=5"`).
 *
 * # Safety
 * `spec` must be a valid C string and `out` a valid pointer.
 */
enum SrStatus sr_predicate_parse(const char *spec, struct SrPredicate **out);

/**
 * # Safety
 * `p` must come from [`sr_predicate_parse`] or be null.
 */
void sr_predicate_free(struct SrPredicate *p);

/**
 * # Safety
 * Pointers must be valid.
 */
enum SrStatus sr_predicate_n(const struct SrPredicate *p, size_t *out);

/**
 * Sign changes at distance one (`deg`) and two (`deg2`).
 *
 * # Safety
 * Pointers must be valid.
 */
enum SrStatus sr_predicate_degrees(const struct SrPredicate *p, size_t *deg, size_t *deg2);

/**
 * Builds the sparse sign representation of `D(|x ⊕ y|)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SrStatus sr_certificate_lift(const struct SrPredicate *p, struct SrCertificate **out);

/**
 * Loads a certificate as written by [`sr_certificate_to_json`] or the
 * `certify` command. Nothing is recomputed.
 *
 * # Safety
 * `json` must be a valid C string and `out` a valid pointer.
 */
enum SrStatus sr_certificate_from_json(const char *json, struct SrCertificate **out);

/**
 * # Safety
 * `c` must come from this library or be null.
 */
void sr_certificate_free(struct SrCertificate *c);

/**
 * Number of nonzero Fourier coefficients; `SR_STATUS_OVERFLOW` above 2^64 − 1.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SrStatus sr_certificate_support(const struct SrCertificate *c, uint64_t *out);

/**
 * The stated combinatorial bound `4 Σ_{k ≤ M} C(⌊n/2⌋ + 1, k)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SrStatus sr_certificate_bound(const struct SrCertificate *c, uint64_t *out);

/**
 * Re-checks the certificate against its predicate. The explicit rank is
 * computed only when `check_rank` is set and `n ≤ 10`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SrStatus sr_certificate_verify(const struct SrCertificate *c,
                                    bool check_rank,
                                    struct SrVerifyReport *out);

/**
 * JSON certificate record.
 *
 * # Safety
 * Pointers must be valid; free the string with [`sr_string_free`].
 */
enum SrStatus sr_certificate_to_json(const struct SrCertificate *c, char **out);

/**
 * JSON reduction record; `n` must be a power of two, at least 64.
 *
 * # Safety
 * Pointers must be valid; free the string with [`sr_string_free`].
 */
enum SrStatus sr_reduce_json(const struct SrPredicate *p, char **out);

/**
 * JSON object `{"xor": ..., "and": ...}` with both bound reports.
 *
 * # Safety
 * Pointers must be valid; free the string with [`sr_string_free`].
 */
enum SrStatus sr_bounds_json(const struct SrPredicate *p, char **out);

/**
 * Runs the sampling protocol on `(x, y)`, with bit `i` of the masks as
 * coordinate `i`. Single worker; `n ≤ 12`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SrStatus sr_simulate(const struct SrCertificate *c,
                          uint64_t x,
                          uint64_t y,
                          uint64_t trials,
                          uint64_t seed,
                          struct SrSimulation *out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void sr_string_free(char *s);

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *sr_last_error(void);

/**
 * Library version as a static C string.
 */
const char *sr_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIGNRANK_H */
