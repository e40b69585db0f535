#ifndef GAMOW_H
#define GAMOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GdStatus {
  GD_STATUS_OK = 0,
  GD_STATUS_INVALID_ARGUMENT = 1,
  GD_STATUS_NULL_POINTER = 2,
  GD_STATUS_DOMAIN = 3,
  GD_STATUS_POLE = 4,
  GD_STATUS_NO_PEAKS = 5,
  GD_STATUS_NO_CONVERGENCE = 6,
  GD_STATUS_WRONG_QUADRANT = 7,
  GD_STATUS_NOT_A_POLE = 8,
  GD_STATUS_QUADRANT = 9,
  GD_STATUS_NODE = 10,
  GD_STATUS_ZERO_VELOCITY = 11,
  GD_STATUS_PANIC = 12,
} GdStatus;

typedef enum GdKind {
  GD_KIND_WELL = 0,
  GD_KIND_BARRIER = 1,
} GdKind;

typedef enum GdVariant {
  GD_VARIANT_DECAYING = 0,
  GD_VARIANT_CAPTURE = 1,
  GD_VARIANT_DECREASING = 2,
} GdVariant;

/**
 * Real second-order deformation built from a transformation function.
 */
typedef struct GdDeform2 GdDeform2;

/**
 * Gamow-Siegert, capture or decreasing solution.
 */
typedef struct GdGamow GdGamow;

/**
 * Square well or barrier.
 */
typedef struct GdSpec GdSpec;

typedef struct GdComplex {
  double re;
  double im;
} GdComplex;

typedef struct GdResonance {
  /**
   * m (from 0) for wells, n (from 1) for barriers.
   */
  uint32_t index;
  double energy;
  /**
   * Γ/2.
   */
  double half_width;
  /**
   * Kinetic parameter √(E − iΓ/2); the exact pole for refined rows, a
   * Newton seed for analytic ones.
   */
  struct GdComplex k;
} GdResonance;

typedef struct GdBoundState {
  uint32_t index;
  /**
   * 0 for even, 1 for odd.
   */
  uint32_t parity;
  double rho;
  double energy;
} GdBoundState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL, so
 * a caller can retry with a larger buffer.
 *
 * # Safety
 * `buf` must be NULL or point to at least `len` writable bytes.
 */
size_t gd_last_error_message(char *buf, size_t len);

/**
 * Create a potential. `v0` and `b` must be finite and positive.
 *
 * # Safety
 * `out_spec` must be a valid pointer to writable storage for one handle.
 */
enum GdStatus gd_spec_new(enum GdKind kind, double v0, double b, struct GdSpec **out_spec);

/**
 * # Safety
 * `spec` must be NULL or a handle from [`gd_spec_new`] not yet freed.
 */
void gd_spec_free(struct GdSpec *spec);

/**
 * Transmission coefficient T(E) for real `energy` > 0.
 *
 * # Safety
 * `spec` must be a live handle and `out_t` writable.
 */
enum GdStatus gd_transmission(const struct GdSpec *spec, double energy, double *out_t);

/**
 * Δ(k), whose zeros in the fourth quadrant are the resonance poles.
 *
 * # Safety
 * `spec` must be a live handle and `out_delta` writable.
 */
enum GdStatus gd_delta(const struct GdSpec *spec, struct GdComplex k, struct GdComplex *out_delta);

/**
 * Newton refinement of a pole from a fourth-quadrant guess. The returned
 * index is 0; use [`gd_analytic_resonances`] for labelled seeds.
 *
 * # Safety
 * `spec` must be a live handle and `out_resonance` writable.
 */
enum GdStatus gd_refine_pole(const struct GdSpec *spec,
                             struct GdComplex guess,
                             double tol,
                             uint32_t max_iter,
                             struct GdResonance *out_resonance);

/**
 * Write the first `count` analytic resonances into `out_rows`.
 *
 * # Safety
 * `spec` must be a live handle and `out_rows` must have room for `count` rows.
 */
enum GdStatus gd_analytic_resonances(const struct GdSpec *spec,
                                     size_t count,
                                     struct GdResonance *out_rows);

/**
 * Bound states of a well. Writes up to `capacity` rows and stores the total
 * number of states in `out_count`; pass `capacity = 0` to query the count.
 *
 * # Safety
 * `spec` must be a live handle, `out_count` writable, and `out_rows` must have
 * room for `capacity` rows (it may be NULL when `capacity` is 0).
 */
enum GdStatus gd_bound_states(const struct GdSpec *spec,
                              struct GdBoundState *out_rows,
                              size_t capacity,
                              size_t *out_count);

/**
 * Build a transformation function. For `Decaying` and `Capture`, `k` must be
 * a fourth-quadrant pole. For `Decreasing`, `k` is either that pole or the
 * conjugate parameter in the upper half plane.
 *
 * # Safety
 * `spec` must be a live handle and `out_gamow` writable.
 */
enum GdStatus gd_gamow_new(const struct GdSpec *spec,
                           struct GdComplex k,
                           enum GdVariant variant,
                           struct GdGamow **out_gamow);

/**
 * # Safety
 * `gamow` must be NULL or a handle from [`gd_gamow_new`] not yet freed.
 */
void gd_gamow_free(struct GdGamow *gamow);

/**
 * Value and derivative of the transformation function at `x`. Either output
 * pointer may be NULL.
 *
 * # Safety
 * `gamow` must be a live handle; non-NULL outputs must be writable.
 */
enum GdStatus gd_gamow_eval(const struct GdGamow *gamow,
                            double x,
                            struct GdComplex *out_u,
                            struct GdComplex *out_du);

/**
 * Complex energy k² of the transformation function.
 *
 * # Safety
 * `gamow` must be a live handle and `out_energy` writable.
 */
enum GdStatus gd_gamow_energy(const struct GdGamow *gamow, struct GdComplex *out_energy);

/**
 * First-order (complex) deformed potential at `x`.
 *
 * # Safety
 * `gamow` must be a live handle and `out_v` writable.
 */
enum GdStatus gd_deform1_value(const struct GdGamow *gamow, double x, struct GdComplex *out_v);

/**
 * Second-order deformation from a transformation function. Fails with
 * `ZeroVelocity` or `Node` when the result would be singular.
 *
 * # Safety
 * `gamow` must be a live handle and `out_deform` writable.
 */
enum GdStatus gd_deform2_new(const struct GdGamow *gamow, struct GdDeform2 **out_deform);

/**
 * Real second-order deformed potential at `x`.
 *
 * # Safety
 * `deform` must be a live handle and `out_v` writable.
 */
enum GdStatus gd_deform2_value(const struct GdDeform2 *deform, double x, double *out_v);

/**
 * # Safety
 * `deform` must be NULL or a handle from [`gd_deform2_new`] not yet freed.
 */
void gd_deform2_free(struct GdDeform2 *deform);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAMOW_H */
