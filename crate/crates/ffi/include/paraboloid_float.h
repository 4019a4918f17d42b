#ifndef PARABOLOID_FLOAT_H
#define PARABOLOID_FLOAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PfStatus {
  PF_STATUS_OK = 0,
  PF_STATUS_NULL_POINTER = 1,
  PF_STATUS_DOMAIN = 2,
  PF_STATUS_INVALID_DENSITY = 3,
  PF_STATUS_CONVERGENCE = 4,
  PF_STATUS_NUMERIC = 5,
  PF_STATUS_OUT_OF_RANGE = 6,
  PF_STATUS_BUFFER_TOO_SMALL = 7,
  PF_STATUS_PANIC = 8,
} PfStatus;

typedef enum PfPosition {
  PF_POSITION_LEFT_HAND = 0,
  PF_POSITION_RIGHT_HAND = 1,
  PF_POSITION_HORIZONTAL = 2,
} PfPosition;

typedef enum PfCase {
  PF_CASE_ARCHIMEDEAN = 0,
  PF_CASE_NON_ARCHIMEDEAN = 1,
  PF_CASE_HORIZONTAL = 2,
} PfCase;

typedef enum PfStability {
  PF_STABILITY_STABLE = 0,
  PF_STABILITY_SADDLE = 1,
  PF_STABILITY_DEGENERATE_UNSTABLE = 2,
  PF_STABILITY_DEGENERATE_INCONCLUSIVE = 3,
} PfStability;

typedef enum PfRegionCase {
  PF_REGION_CASE_WHOLE_LEFT_HALF = 0,
  PF_REGION_CASE_UP_TO_CENTER = 1,
  PF_REGION_CASE_BOUNDED = 2,
  PF_REGION_CASE_EMPTY = 3,
} PfRegionCase;

/**
 * Opaque list of equilibria.
 */
typedef struct PfEquilibria PfEquilibria;

/**
 * Opaque segment shape.
 */
typedef struct PfShape PfShape;

/**
 * Opaque sweep result.
 */
typedef struct PfSweep PfSweep;

typedef struct PfSearchOptions {
  double sweep_step;
  bool refine_steep;
  double residual_tol;
  double dedup_tol;
} PfSearchOptions;

/**
 * Fields without a value (`has_* == false`) are set to NaN.
 */
typedef struct PfEquilibrium {
  enum PfPosition position;
  enum PfCase case_kind;
  bool has_x;
  double x;
  bool has_b;
  double b;
  bool has_c;
  double c;
  double sigma;
  double tilt_deg;
  enum PfStability stability;
  double lambda_min;
  double lambda_max;
  /**
   * NaN unless the Hessian is singular.
   */
  double cubic_coefficient;
  double residual_e;
  double residual_f;
} PfEquilibrium;

typedef struct PfClassification {
  double e;
  double f;
  double sigma_implied;
  double grad[2];
  /**
   * Row-major `[h_XX, h_Xb, h_bX, h_bb]`.
   */
  double hessian[4];
  enum PfStability stability;
  double lambda_min;
  double lambda_max;
  double cubic_coefficient;
} PfClassification;

typedef struct PfRegion {
  double a1;
  double gamma;
  double delta;
  bool has_x1;
  double x1;
  bool has_x2;
  double x2;
  enum PfRegionCase region_case;
  bool has_interval;
  double lo;
  double hi;
} PfRegion;

typedef struct PfCurvePoint {
  double x;
  double b;
  double sigma;
  size_t branch;
  enum PfStability stability;
} PfCurvePoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next call into this library from the same thread.
 */
const char *pf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pf_version(void);

struct PfSearchOptions pf_search_options_default(void);

enum PfStatus pf_shape_new(double axis, struct PfShape **out);

/**
 * Shape from a base angle in degrees, `a = tan²(φ)/4`.
 */
enum PfStatus pf_shape_from_base_angle(double phi_deg, struct PfShape **out);

/**
 * Axis length, or NaN for a null handle.
 */
double pf_shape_axis(const struct PfShape *shape);

void pf_shape_free(struct PfShape *shape);

/**
 * All equilibria for density `sigma`. `options` may be null for defaults.
 */
enum PfStatus pf_solve(const struct PfShape *shape,
                       double sigma,
                       const struct PfSearchOptions *options,
                       struct PfEquilibria **out);

/**
 * Number of equilibria, or 0 for a null handle.
 */
size_t pf_equilibria_len(const struct PfEquilibria *list);

/**
 * Candidates skipped because they did not converge.
 */
size_t pf_equilibria_failures(const struct PfEquilibria *list);

enum PfStatus pf_equilibria_get(const struct PfEquilibria *list,
                                size_t index,
                                struct PfEquilibrium *out);

void pf_equilibria_free(struct PfEquilibria *list);

/**
 * Conditions, derivatives and verdict at `(X, b)`. `right_hand` selects the
 * density `1 − σ`.
 */
enum PfStatus pf_classify(const struct PfShape *shape,
                          double x,
                          double b,
                          double sigma,
                          bool right_hand,
                          struct PfClassification *out);

enum PfStatus pf_region(const struct PfShape *shape, struct PfRegion *out);

enum PfStatus pf_sweep(const struct PfShape *shape,
                       double step,
                       bool refine_steep,
                       struct PfSweep **out);

size_t pf_sweep_len(const struct PfSweep *sweep);

enum PfStatus pf_sweep_point(const struct PfSweep *sweep, size_t index, struct PfCurvePoint *out);

/**
 * Writes the CSV export into `buf` (NUL-terminated). `needed` receives the
 * required capacity including the terminator; pass a null `buf` to query it.
 */
enum PfStatus pf_sweep_csv(const struct PfSweep *sweep, char *buf, size_t capacity, size_t *needed);

void pf_sweep_free(struct PfSweep *sweep);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARABOLOID_FLOAT_H */
