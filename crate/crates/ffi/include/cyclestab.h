#ifndef CYCLESTAB_H
#define CYCLESTAB_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_ARGUMENT = 2,
  CS_STATUS_NO_CONVERGENCE = 3,
  CS_STATUS_CONSISTENCY = 4,
  CS_STATUS_BUFFER_TOO_SMALL = 5,
  CS_STATUS_PANIC = 6,
} CsStatus;

/**
 * Opaque gain vector.
 */
typedef struct CsGains CsGains;

/**
 * Opaque simulated trajectory.
 */
typedef struct CsTrajectory CsTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cs_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `capacity`). Returns the full message length excluding the
 * terminator, or 0 if there is none.
 *
 * # Safety
 * `buf` must be valid for `capacity` bytes or null.
 */
size_t cs_last_error_message(char *buf, size_t capacity);

/**
 * Optimal gains for horizon `n`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CsStatus cs_gains_optimal(size_t n, struct CsGains **out);

/**
 * Gains from `len` feedback strengths (horizon `len + 1`).
 *
 * # Safety
 * `eps` must point to `len` doubles (may be null when `len == 0`); `out`
 * must be valid.
 */
enum CsStatus cs_gains_from_strengths(const double *eps, size_t len, struct CsGains **out);

/**
 * Gains from `len` closed-loop weights, which must sum to 1.
 *
 * # Safety
 * `a` must point to `len` doubles; `out` must be valid.
 */
enum CsStatus cs_gains_from_weights(const double *a, size_t len, struct CsGains **out);

/**
 * # Safety
 * `g` must come from a `cs_gains_*` constructor and not be used afterwards.
 */
void cs_gains_free(struct CsGains *g);

/**
 * Horizon `N`, or 0 for a null handle.
 *
 * # Safety
 * `g` must be a live handle or null.
 */
size_t cs_gains_horizon(const struct CsGains *g);

/**
 * # Safety
 * `g` must be a live handle or null.
 */
bool cs_gains_is_admissible(const struct CsGains *g);

/**
 * # Safety
 * `g` must be live; `buf` valid for `capacity` doubles; `len_out` valid.
 */
enum CsStatus cs_gains_weights(const struct CsGains *g,
                               double *buf,
                               size_t capacity,
                               size_t *len_out);

/**
 * # Safety
 * As for `cs_gains_weights`.
 */
enum CsStatus cs_gains_strengths(const struct CsGains *g,
                                 double *buf,
                                 size_t capacity,
                                 size_t *len_out);

/**
 * # Safety
 * As for `cs_gains_weights`.
 */
enum CsStatus cs_gains_gamma(const struct CsGains *g,
                             double *buf,
                             size_t capacity,
                             size_t *len_out);

/**
 * Critical multiplier by sweeping `mu` over `[-mu_max, 0)`. Pass
 * `mu_max <= 0` for the default range. `censored` is set when no loss of
 * stability was found in range.
 *
 * # Safety
 * `g` must be live; `mu_star_abs` and `censored` valid.
 */
enum CsStatus cs_mu_star_sweep(const struct CsGains *g,
                               double mu_max,
                               double tol,
                               double *mu_star_abs,
                               bool *censored);

/**
 * Critical multiplier from the hodograph's negative real-axis crossings.
 *
 * # Safety
 * `g` must be live; `mu_star_abs` valid.
 */
enum CsStatus cs_mu_star_hodograph(const struct CsGains *g, size_t resolution, double *mu_star_abs);

/**
 * # Safety
 * `g` must be live; `out` valid.
 */
enum CsStatus cs_j_value(const struct CsGains *g, size_t resolution, double *out);

/**
 * Smallest horizon whose optimal gains stabilize multipliers down to
 * `-mu_star_abs`, with its prehistory depth.
 *
 * # Safety
 * `n0` and `n_star` must be valid.
 */
enum CsStatus cs_min_horizon(double mu_star_abs, size_t *n0, size_t *n_star);

/**
 * Closed-loop logistic map run. `seed` holds `2N - 1` states; pass a null
 * `seed` with `seed_len == 0` to fill the history by open-loop iteration
 * from `x0`.
 *
 * # Safety
 * `g` must be live; `seed` valid for `seed_len` doubles; `out` valid.
 */
enum CsStatus cs_simulate_logistic(double h,
                                   const struct CsGains *g,
                                   double x0,
                                   const double *seed,
                                   size_t seed_len,
                                   size_t steps,
                                   struct CsTrajectory **out);

/**
 * # Safety
 * `t` must come from `cs_simulate_logistic` and not be used afterwards.
 */
void cs_trajectory_free(struct CsTrajectory *t);

/**
 * Number of states, or 0 for a null handle.
 *
 * # Safety
 * `t` must be live or null.
 */
size_t cs_trajectory_len(const struct CsTrajectory *t);

/**
 * Index of the first state outside the domain, or -1 if none escaped.
 *
 * # Safety
 * `t` must be live or null.
 */
int64_t cs_trajectory_escaped_at(const struct CsTrajectory *t);

/**
 * # Safety
 * `t` must be live; `buf` valid for `capacity` doubles; `len_out` valid.
 */
enum CsStatus cs_trajectory_states(const struct CsTrajectory *t,
                                   double *buf,
                                   size_t capacity,
                                   size_t *len_out);

/**
 * `controls[n]` is the correction applied when producing state `n + 1`.
 *
 * # Safety
 * As for `cs_trajectory_states`.
 */
enum CsStatus cs_trajectory_controls(const struct CsTrajectory *t,
                                     double *buf,
                                     size_t capacity,
                                     size_t *len_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CYCLESTAB_H */
