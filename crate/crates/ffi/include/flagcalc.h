#ifndef FLAGCALC_H
#define FLAGCALC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes.
typedef enum FcStatus {
  FC_OK = 0,
  FC_ERR_NULL_POINTER = 1,
  FC_ERR_INVALID_ARGUMENT = 2,
  FC_ERR_INDEX_OUT_OF_RANGE = 3,
  FC_ERR_NOT_REDUCED = 4,
  FC_ERR_DOMAIN = 5,
  FC_ERR_OVERFLOW = 6,
  FC_ERR_BUFFER_TOO_SMALL = 7,
  FC_ERR_PANIC = 8,
} FcStatus;

// Outcome of certifying a word.
typedef enum FcCertifyOutcome {
  FC_CERTIFIED = 0,
  FC_FAILS_AT = 1,
  FC_BUDGET_EXCEEDED = 2,
} FcCertifyOutcome;

// Answer of one uniqueness step.
typedef enum FcH1Answer {
  FC_EXACT0 = 0,
  FC_EXACT1 = 1,
  FC_UNDETERMINED = 2,
} FcH1Answer;

// A validated Cartan matrix of finite type with its root system.
typedef struct FcCartan FcCartan;

// A derivation engine with its memo.
typedef struct FcEngine FcEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failing call on this thread; empty after success.
// Valid until the next call on the same thread.
const char *fc_last_error_message(void);

// Builtin type from a name such as "F4".
//
// # Safety
// `name` must be a NUL-terminated string and `out` a writable pointer.
enum FcStatus fc_cartan_from_type(const char *name, struct FcCartan **out);

// Cartan matrix from `rank * rank` row-major entries; must be of finite type.
//
// # Safety
// `entries` must point to `rank * rank` integers and `out` be writable.
enum FcStatus fc_cartan_from_matrix(const int64_t *entries, size_t rank, struct FcCartan **out);

// # Safety
// `c` must come from a constructor above, or be null.
void fc_cartan_free(struct FcCartan *c);

// # Safety
// `c` must be a live handle and `out` writable.
enum FcStatus fc_cartan_rank(const struct FcCartan *c, size_t *out);

// # Safety
// `c` must be a live handle and `out` writable.
enum FcStatus fc_positive_root_count(const struct FcCartan *c, size_t *out);

// Order of the Weyl group, for groups small enough to enumerate.
//
// # Safety
// `c` must be a live handle and `out` writable.
enum FcStatus fc_weyl_order(const struct FcCartan *c, uint64_t *out);

// Number of reduced words of the longest element as a decimal string.
// `needed` receives the buffer size including the terminating NUL; if
// `len` is smaller, nothing is written and FC_ERR_BUFFER_TOO_SMALL returned.
//
// # Safety
// `c` must be a live handle, `buf` writable for `len` bytes (or null with
// `len == 0`), `needed` writable.
enum FcStatus fc_longest_reduced_word_count(const struct FcCartan *c,
                                            char *buf,
                                            size_t len,
                                            size_t *needed);

// Cohomology of a line bundle on the flag manifold. At most one degree
// is nonzero; it is written to `degree` with its dimension in `value`.
// When all groups vanish, `value` is 0 and `degree` is 0.
//
// # Safety
// `degrees` must hold `rank` integers; outputs must be writable.
enum FcStatus fc_cohomology(const struct FcCartan *c,
                            const int64_t *degrees,
                            size_t *degree,
                            uint64_t *value);

// Euler characteristic of the pulled-back bundle on the tower of a word.
//
// # Safety
// `word` must hold `word_len` letters, `degrees` `rank` integers, `out` writable.
enum FcStatus fc_euler_char_bs(const struct FcCartan *c,
                               const size_t *word,
                               size_t word_len,
                               const int64_t *degrees,
                               int64_t *out);

// Engine with a node budget per query (0 selects the default).
//
// # Safety
// `c` must be a live handle and `out` writable.
enum FcStatus fc_engine_new(const struct FcCartan *c, size_t budget, struct FcEngine **out);

// # Safety
// `e` must come from `fc_engine_new`, or be null.
void fc_engine_free(struct FcEngine *e);

// Certifies a reduced word. `step` receives the 1-based failing step, or 0.
//
// # Safety
// `e` must be a live engine, `word` hold `word_len` letters, outputs writable.
enum FcStatus fc_certify_word(const struct FcEngine *e,
                              const size_t *word,
                              size_t word_len,
                              enum FcCertifyOutcome *outcome,
                              size_t *step);

// `h^1` of `K` of the last letter on the tower of the word without it.
//
// # Safety
// `e` must be a live engine, `word` hold `word_len` letters, `out` writable.
enum FcStatus fc_h1_uniqueness(const struct FcEngine *e,
                               const size_t *word,
                               size_t word_len,
                               enum FcH1Answer *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLAGCALC_H */
