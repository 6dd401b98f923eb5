#ifndef BETAFREQ_H
#define BETAFREQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BfStatus {
  BF_STATUS_OK = 0,
  BF_STATUS_NULL_POINTER = 1,
  BF_STATUS_INVALID_ARGUMENT = 2,
  BF_STATUS_PARSE = 3,
  BF_STATUS_INVALID_UTF8 = 4,
  BF_STATUS_BUFFER_TOO_SMALL = 5,
  BF_STATUS_OUT_OF_DOMAIN = 6,
  BF_STATUS_INFEASIBLE = 7,
  BF_STATUS_NOT_SUPPORTED = 8,
  BF_STATUS_DIVISION_BY_ZERO = 9,
  BF_STATUS_LENGTH_MISMATCH = 10,
  BF_STATUS_CLOSED_FORM_UNAVAILABLE = 11,
  BF_STATUS_PANIC = 12,
} BfStatus;

/*
 Opaque handle to a multinacci base.
 */
typedef struct BfParams BfParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *bf_version(void);

/*
 Message of the last failed call on this thread, or NULL. Valid until the
 next call into the library from the same thread.
 */
const char *bf_last_error(void);

/*
 Creates the multinacci base of the given order (2 = golden mean).

 # Safety
 `out` must be valid for a pointer write.
 */
enum BfStatus bf_params_new(uint32_t order, struct BfParams **out);

/*
 Releases a handle from [`bf_params_new`]. NULL is ignored.

 # Safety
 `params` must come from [`bf_params_new`] and not be used afterwards.
 */
void bf_params_free(struct BfParams *params);

/*
 # Safety
 `params` must be a live handle; `order` and `beta` valid for writes.
 */
enum BfStatus bf_params_info(const struct BfParams *params, uint32_t *order, double *beta);

/*
 Normalizes a '0'/'1' string into `buf`, NUL-terminated. `written`
 receives the number of bytes needed, including the terminator, also when
 the buffer is too small.

 # Safety
 `word` must be a NUL-terminated string, `buf` valid for `buf_len` bytes
 (or NULL with `buf_len` 0), `written` valid for a write.
 */
enum BfStatus bf_normalize(const struct BfParams *params,
                           const char *word,
                           char *buf,
                           size_t buf_len,
                           size_t *written);

/*
 # Safety
 `word` must be a NUL-terminated string and `out` valid for a write.
 */
enum BfStatus bf_is_normal_form(const struct BfParams *params, const char *word, bool *out);

/*
 Lebesgue-typical frequency of digit 1.

 # Safety
 `out` must be valid for a write.
 */
enum BfStatus bf_parry_alpha1(const struct BfParams *params, double *out);

/*
 Dimension of the set with digit-1 frequency `num / den`.

 # Safety
 `out` must be valid for a write.
 */
enum BfStatus bf_dimension(const struct BfParams *params, int64_t num, int64_t den, double *out);

/*
 Monte Carlo digit-1 frequency; `lebesgue` selects uniform points instead
 of fair-coin words.

 # Safety
 `estimate` and `stderr` must be valid for writes.
 */
enum BfStatus bf_mc_frequency(const struct BfParams *params,
                              bool lebesgue,
                              size_t length,
                              size_t trials,
                              uint64_t seed,
                              double *estimate,
                              double *stderr);

/*
 Certified probability bracket of an event such as "x0=1", as JSON.

 # Safety
 `event` must be a NUL-terminated string; `out` valid for a write. The
 returned string is freed with [`bf_string_free`].
 */
enum BfStatus bf_exact_prob_json(const struct BfParams *params,
                                 const char *event,
                                 uint32_t depth,
                                 char **out);

/*
 Singularity certificate as JSON.

 # Safety
 `out` must be valid for a write. The returned string is freed with
 [`bf_string_free`].
 */
enum BfStatus bf_certificate_json(const struct BfParams *params, char **out);

/*
 # Safety
 `s` must come from this library and not be freed twice. NULL is ignored.
 */
void bf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BETAFREQ_H */
