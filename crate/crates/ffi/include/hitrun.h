#ifndef HITRUN_H
#define HITRUN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum HitrunStatus {
  HITRUN_STATUS_OK = 0,
  HITRUN_STATUS_USAGE = 1,
  HITRUN_STATUS_DOMAIN = 2,
  HITRUN_STATUS_DEGENERATE_CHORD = 3,
  HITRUN_STATUS_DEGENERATE = 4,
  HITRUN_STATUS_SINGULAR = 5,
  HITRUN_STATUS_STEP = 6,
  HITRUN_STATUS_EFFICIENCY = 7,
  HITRUN_STATUS_UNDERFLOW = 8,
  HITRUN_STATUS_PRECONDITION = 9,
  HITRUN_STATUS_RANGE = 10,
  HITRUN_STATUS_CONFIG = 11,
  HITRUN_STATUS_IO = 12,
  HITRUN_STATUS_NULL_POINTER = 13,
  HITRUN_STATUS_PANIC = 14,
} HitrunStatus;

/**
 * Kernel selector for [`hitrun_chain_new`].
 */
typedef enum HitrunChainKind {
  HITRUN_CHAIN_KIND_HIT_AND_RUN = 0,
  HITRUN_CHAIN_KIND_BALL_WALK = 1,
} HitrunChainKind;

typedef struct HitrunBody HitrunBody;

typedef struct HitrunChain HitrunChain;

typedef struct HitrunTarget HitrunTarget;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *hitrun_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hitrun_version(void);

/**
 * Euclidean ball with the given centre (length `dim`) and radius.
 *
 * # Safety
 * `center` must point to `dim` doubles and `out` must be writable.
 */
enum HitrunStatus hitrun_body_ball(const double *center,
                                   size_t dim,
                                   double radius,
                                   struct HitrunBody **out);

/**
 * Axis-aligned box `[lower, upper]`.
 *
 * # Safety
 * `lower` and `upper` must point to `dim` doubles and `out` must be writable.
 */
enum HitrunStatus hitrun_body_box(const double *lower,
                                  const double *upper,
                                  size_t dim,
                                  struct HitrunBody **out);

/**
 * Cube `[-half_width, half_width]^dim`.
 *
 * # Safety
 * `out` must be writable.
 */
enum HitrunStatus hitrun_body_cube(size_t dim, double half_width, struct HitrunBody **out);

/**
 * Scaled standard simplex `{x ≥ 0, Σx ≤ scale}`.
 *
 * # Safety
 * `out` must be writable.
 */
enum HitrunStatus hitrun_body_simplex(size_t dim, double scale, struct HitrunBody **out);

/**
 * Polytope `{x : A x ≤ b}` with `A` given row-major as `n_rows × dim`.
 *
 * # Safety
 * `normals` must point to `n_rows * dim` doubles, `offsets` to `n_rows`
 * doubles, and `out` must be writable.
 */
enum HitrunStatus hitrun_body_hpolytope(const double *normals,
                                        const double *offsets,
                                        size_t n_rows,
                                        size_t dim,
                                        struct HitrunBody **out);

/**
 * Dimension of the body, or 0 for a null handle.
 *
 * # Safety
 * `body` must be null or a live handle.
 */
size_t hitrun_body_dim(const struct HitrunBody *body);

/**
 * Writes 1 to `out` when `x` lies in the body and 0 otherwise.
 *
 * # Safety
 * `x` must point to `dim` doubles and `out` must be writable.
 */
enum HitrunStatus hitrun_body_contains(const struct HitrunBody *body,
                                       const double *x,
                                       size_t dim,
                                       int32_t *out);

/**
 * # Safety
 * `body` must be null or a handle not yet freed.
 */
void hitrun_body_free(struct HitrunBody *body);

/**
 * Uniform distribution on `body`. The target keeps its own reference to
 * the body, so the body handle may be freed afterwards.
 *
 * # Safety
 * `body` must be a live handle and `out` must be writable.
 */
enum HitrunStatus hitrun_target_uniform(const struct HitrunBody *body, struct HitrunTarget **out);

/**
 * Gaussian with mean `beta` and covariance `I/m`, truncated to `body`.
 *
 * # Safety
 * `body` must be a live handle, `beta` must point to `dim` doubles and
 * `out` must be writable.
 */
enum HitrunStatus hitrun_target_truncated_gaussian(const struct HitrunBody *body,
                                                   const double *beta,
                                                   size_t dim,
                                                   double m,
                                                   struct HitrunTarget **out);

/**
 * One-step hit-and-run transition density from `u` to `x`.
 *
 * # Safety
 * `u` and `x` must point to `dim` doubles and `out` must be writable.
 */
enum HitrunStatus hitrun_transition_density(const struct HitrunTarget *target,
                                            const double *u,
                                            const double *x,
                                            size_t dim,
                                            double *out);

/**
 * # Safety
 * `target` must be null or a handle not yet freed.
 */
void hitrun_target_free(struct HitrunTarget *target);

/**
 * Chain started at `x0` whose randomness is the stream `(seed, replica)`.
 * `delta` is the ball-walk radius and is ignored for hit-and-run; a nonzero
 * `lazy` makes every step stay put with probability 1/2.
 *
 * # Safety
 * `target` must be a live handle, `x0` must point to `dim` doubles and
 * `out` must be writable.
 */
enum HitrunStatus hitrun_chain_new(const struct HitrunTarget *target,
                                   enum HitrunChainKind kind,
                                   double delta,
                                   int32_t lazy,
                                   const double *x0,
                                   size_t dim,
                                   uint64_t seed,
                                   uint64_t replica,
                                   struct HitrunChain **out);

/**
 * Advances the chain by `n_steps` steps.
 *
 * # Safety
 * `chain` must be a live handle.
 */
enum HitrunStatus hitrun_chain_step(struct HitrunChain *chain, uint64_t n_steps);

/**
 * Copies the current point into `out` (length `dim`).
 *
 * # Safety
 * `chain` must be a live handle and `out` must point to `dim` writable
 * doubles.
 */
enum HitrunStatus hitrun_chain_position(const struct HitrunChain *chain, double *out, size_t dim);

/**
 * Number of steps taken so far, or 0 for a null handle.
 *
 * # Safety
 * `chain` must be null or a live handle.
 */
uint64_t hitrun_chain_steps(const struct HitrunChain *chain);

/**
 * # Safety
 * `chain` must be null or a handle not yet freed.
 */
void hitrun_chain_free(struct HitrunChain *chain);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HITRUN_H */
