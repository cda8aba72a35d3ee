#ifndef ZECKGAP_H
#define ZECKGAP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ZgMeanVarMode {
  ZG_MEAN_VAR_MODE_EXACT_SUM = 0,
  ZG_MEAN_VAR_MODE_ASYMPTOTIC_SUM = 1,
  ZG_MEAN_VAR_MODE_CLOSED_FORM = 2,
} ZgMeanVarMode;

typedef enum ZgStatus {
  ZG_STATUS_OK = 0,
  ZG_STATUS_NULL_POINTER = 1,
  ZG_STATUS_INVALID_ARGUMENT = 2,
  /*
   A precondition of the computation does not hold.
   */
  ZG_STATUS_DOMAIN = 3,
  ZG_STATUS_NUMERICAL = 4,
  ZG_STATUS_PANIC = 5,
} ZgStatus;

typedef struct ZgBulkTheory ZgBulkTheory;

typedef struct ZgPolynomials ZgPolynomials;

typedef struct ZgRecurrence ZgRecurrence;

typedef struct ZgTable ZgTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread. Valid until the next
 failing call on the same thread; never null.
 */
const char *zg_last_error(void);

/*
 # Safety
 `s` must be null or a string returned by this library.
 */
void zg_string_free(char *s);

/*
 Recurrence from `len` coefficients `c_1..c_L`.

 # Safety
 `coeffs` must point to `len` readable values; `out` must be writable.
 */
enum ZgStatus zg_recurrence_new(const uint32_t *coeffs, size_t len, struct ZgRecurrence **out);

/*
 Recurrence from text such as `"1,1"`.

 # Safety
 `text` must be a nul-terminated string; `out` must be writable.
 */
enum ZgStatus zg_recurrence_parse(const char *text, struct ZgRecurrence **out);

/*
 # Safety
 `r` must be null or a handle from `zg_recurrence_new`/`zg_recurrence_parse`.
 */
void zg_recurrence_free(struct ZgRecurrence *r);

/*
 Table of `G_1..G_len`.

 # Safety
 `rec` must be a live handle; `out` must be writable.
 */
enum ZgStatus zg_table_new(const struct ZgRecurrence *rec, size_t len, struct ZgTable **out);

/*
 # Safety
 `t` must be null or a handle from `zg_table_new`.
 */
void zg_table_free(struct ZgTable *t);

/*
 Number of terms held by the table.

 # Safety
 `t` must be a live handle; `out` must be writable.
 */
enum ZgStatus zg_table_len(const struct ZgTable *t, size_t *out);

/*
 `G_n` in decimal.

 # Safety
 `t` must be a live handle; `out` must be writable.
 */
enum ZgStatus zg_table_get(const struct ZgTable *t, size_t n, char **out);

/*
 Decomposition of the decimal integer `m` as JSON `[[index, multiplicity], ...]`.

 # Safety
 `t` must be a live handle, `m` a nul-terminated string; `out` must be writable.
 */
enum ZgStatus zg_decompose(const struct ZgTable *t, const char *m, char **out);

/*
 Longest gap of `m`'s decomposition (trailing gap excluded).

 # Safety
 As for [`zg_decompose`].
 */
enum ZgStatus zg_longest_gap(const struct ZgTable *t, const char *m, size_t *out);

/*
 Spectral data as JSON.

 # Safety
 `rec` must be a live handle; `out` must be writable.
 */
enum ZgStatus zg_spectral_json(const struct ZgRecurrence *rec, char **out);

/*
 Limiting gap distribution; fails unless every coefficient is positive.

 # Safety
 `rec` must be a live handle; `out` must be writable.
 */
enum ZgStatus zg_bulk_theory_new(const struct ZgRecurrence *rec, struct ZgBulkTheory **out);

/*
 # Safety
 `t` must be null or a handle from `zg_bulk_theory_new`.
 */
void zg_bulk_theory_free(struct ZgBulkTheory *t);

/*
 `P(k)`.

 # Safety
 `t` must be a live handle; `out` must be writable.
 */
enum ZgStatus zg_bulk_p_limit(const struct ZgBulkTheory *t, size_t k, double *out);

/*
 Longest-gap polynomials. With `relaxed` non-zero, assumption violations
 are tolerated.

 # Safety
 `rec` must be a live handle; `out` must be writable.
 */
enum ZgStatus zg_polynomials_new(const struct ZgRecurrence *rec,
                                 int32_t relaxed,
                                 struct ZgPolynomials **out);

/*
 # Safety
 `p` must be null or a handle from `zg_polynomials_new`.
 */
void zg_polynomials_free(struct ZgPolynomials *p);

/*
 `K = lambda_1 R(1/lambda_1) / G(1/lambda_1)`.

 # Safety
 `p` must be a live handle; `out` must be writable.
 */
enum ZgStatus zg_k_const(const struct ZgPolynomials *p, double *out);

/*
 Count of `m` in `[G_n, G_{n+1})` with longest gap below `f`, in decimal.

 # Safety
 `t` must be a live handle; `out` must be writable.
 */
enum ZgStatus zg_count_less_than(const struct ZgTable *t, size_t n, size_t f, char **out);

/*
 Exact `P(n, f)` from the roots of `T_f`; the table must reach `n + 1`.

 # Safety
 `t` and `p` must be live handles; `out` must be writable.
 */
enum ZgStatus zg_cdf_exact(const struct ZgTable *t,
                           const struct ZgPolynomials *p,
                           size_t n,
                           size_t f,
                           double *out);

/*
 `exp(-n K lambda_1^{-f})`.

 # Safety
 `p` must be a live handle; `out` must be writable.
 */
enum ZgStatus zg_cdf_asymptotic(const struct ZgPolynomials *p, double n, size_t f, double *out);

/*
 Mean and variance of the longest gap. `t` may be null except for the exact sum.

 # Safety
 `p` must be a live handle, `t` null or live; `mean` and `variance` writable.
 */
enum ZgStatus zg_mean_var(const struct ZgPolynomials *p,
                          const struct ZgTable *t,
                          size_t n,
                          enum ZgMeanVarMode mode,
                          double *mean,
                          double *variance);

/*
 Coin-toss longest run of heads.

 # Safety
 `mean` and `variance` must be writable.
 */
enum ZgStatus zg_coin_run_baseline(double n, double p, double *mean, double *variance);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZECKGAP_H */
