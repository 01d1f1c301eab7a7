#ifndef CHATELET_H
#define CHATELET_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ChateletStatus {
  CHATELET_STATUS_OK = 0,
  CHATELET_STATUS_NULL_POINTER = 1,
  CHATELET_STATUS_DOMAIN = 2,
  CHATELET_STATUS_ZERO_COEFFICIENT = 3,
  CHATELET_STATUS_DEGENERATE_DETERMINANT = 4,
  CHATELET_STATUS_OVERFLOW = 5,
  CHATELET_STATUS_FACTORIZATION_BUDGET = 6,
  CHATELET_STATUS_PRECONDITION = 7,
  CHATELET_STATUS_INVARIANT_VIOLATION = 8,
  CHATELET_STATUS_INTERNAL_INCONSISTENCY = 9,
  CHATELET_STATUS_BUDGET_EXCEEDED = 10,
  CHATELET_STATUS_NO_STABILIZATION = 11,
  CHATELET_STATUS_INVALID_UTF8 = 12,
  CHATELET_STATUS_PANIC = 13,
} ChateletStatus;

typedef enum ChateletVerdict {
  CHATELET_VERDICT_LOCAL_OBSTRUCTION = 0,
  CHATELET_VERDICT_RATIONAL_POINT = 1,
  CHATELET_VERDICT_HASSE_FAILURE = 2,
} ChateletVerdict;

typedef enum ChateletProduct {
  CHATELET_PRODUCT_TAU = 0,
  CHATELET_PRODUCT_TAU_LOC = 1,
  CHATELET_PRODUCT_THM12_RATIO = 2,
  CHATELET_PRODUCT_HASSE_RATIO = 3,
} ChateletProduct;

/**
 * Opaque reduced representative of a surface.
 */
typedef struct ChateletSurface ChateletSurface;

/**
 * Outcome of [`chatelet_decide`]. `obstruction_place` is 0 for the real
 * place and the prime otherwise; it and `epsilon` are 0 when unused.
 */
typedef struct ChateletDecision {
  enum ChateletVerdict verdict;
  uint64_t obstruction_place;
  int8_t epsilon[2];
} ChateletDecision;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after a
 * success. Valid until the next library call on the same thread.
 */
const char *chatelet_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *chatelet_version(void);

/**
 * Reduces `(a, b, c, d)` to its representative and stores a new handle in
 * `*out`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer.
 */
enum ChateletStatus chatelet_surface_new(int64_t a,
                                         int64_t b,
                                         int64_t c,
                                         int64_t d,
                                         struct ChateletSurface **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `s` must be null or a handle from [`chatelet_surface_new`] not yet freed.
 */
void chatelet_surface_free(struct ChateletSurface *s);

/**
 * Writes the representative's coefficients `(a, b, c, d)` to `out[0..4]`.
 *
 * # Safety
 * `s` must be a live handle and `out` must point to four writable `int64_t`.
 */
enum ChateletStatus chatelet_surface_coefficients(const struct ChateletSurface *s, int64_t *out);

/**
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum ChateletStatus chatelet_decide(const struct ChateletSurface *s, struct ChateletDecision *out);

/**
 * Runs the command-line front end on `argv[0..argc]` (without the program
 * name). The JSON or text written to standard output is returned in
 * `*out_stdout` and the exit code in `*out_exit_code`.
 *
 * # Safety
 * `argv` must hold `argc` valid NUL-terminated strings; the out pointers
 * must be valid.
 */
enum ChateletStatus chatelet_cli_run(const char *const *argv,
                                     size_t argc,
                                     char **out_stdout,
                                     int32_t *out_exit_code);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void chatelet_string_free(char *s);

/**
 * The exact 2-adic local density as `num / den`.
 *
 * # Safety
 * `num` and `den` must be valid pointers.
 */
enum ChateletStatus chatelet_tau_loc2(int64_t *num, int64_t *den);

/**
 * The component `tau_2(i, j)` as `num / den`.
 *
 * # Safety
 * `num` and `den` must be valid pointers.
 */
enum ChateletStatus chatelet_tau2_component(uint8_t i, uint8_t j, int64_t *num, int64_t *den);

/**
 * Euler product truncated at `prime_bound`, with the bound on the log of
 * the omitted tail.
 *
 * # Safety
 * `value` and `tail_bound` must be valid pointers.
 */
enum ChateletStatus chatelet_euler_product(enum ChateletProduct kind,
                                           uint64_t prime_bound,
                                           double *value,
                                           double *tail_bound);

/**
 * Brute-force local density modulo `p^k`, subject to the work budget.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ChateletStatus chatelet_density_bruteforce(uint64_t p, uint32_t k, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHATELET_H */
