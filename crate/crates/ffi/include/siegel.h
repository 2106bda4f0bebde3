#ifndef SIEGEL_H
#define SIEGEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SiegelStatus {
  SIEGEL_STATUS_OK = 0,
  SIEGEL_STATUS_NULL_POINTER = 1,
  SIEGEL_STATUS_INVALID_ARGUMENT = 2,
  // Malformed JSON, asymmetric or non-PSD input.
  SIEGEL_STATUS_SCHEMA = 3,
  // Degenerate point, singular transform or rank-deficient data.
  SIEGEL_STATUS_NUMERICAL = 4,
  // Impossible case or an interval violation.
  SIEGEL_STATUS_DOMAIN = 5,
  SIEGEL_STATUS_INTERNAL = 6,
  SIEGEL_STATUS_PANIC = 7,
} SiegelStatus;

// Interior point of the half-space.
typedef struct SiegelPointHandle SiegelPointHandle;

// Rotation `Psi_lambda` for the default `Delta_G`.
typedef struct SiegelRotationHandle SiegelRotationHandle;

typedef struct SiegelContraction {
  double p;
  double mu_star;
  double mu_raw;
  double wp1;
  double wp2;
  double r1;
  double r2;
  // NaN when a point is `iI`.
  double mu_polar;
  double range_residual;
  double eq_residual;
} SiegelContraction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL.
//
// The pointer stays valid until the next failing call on the same thread.
const char *siegel_last_error(void);

// Builds an interior point from row-major `x` and `y`.
//
// # Safety
// `x` and `y` point to 4 doubles; `out` is writable.
enum SiegelStatus siegel_point_new(const double *x,
                                   const double *y,
                                   struct SiegelPointHandle **out);

// Parses `{"X": [[..],[..]], "Y": [[..],[..]]}`; the point must be interior.
//
// # Safety
// `json` is a NUL-terminated string; `out` is writable.
enum SiegelStatus siegel_point_from_json(const char *json, struct SiegelPointHandle **out);

// Copies `X` and `Y` out as row-major arrays.
//
// # Safety
// `z` is a live handle; `x` and `y` point to 4 writable doubles.
enum SiegelStatus siegel_point_parts(const struct SiegelPointHandle *z, double *x, double *y);

// # Safety
// `z` is NULL or a handle from this library, not used afterwards.
void siegel_point_free(struct SiegelPointHandle *z);

// `w_p(Z, iI)`.
//
// # Safety
// `z` is a live handle; `out` is writable.
enum SiegelStatus siegel_wp(const struct SiegelPointHandle *z, double p, double *out);

// Cayley image `W`, split into real and imaginary row-major parts.
//
// # Safety
// `z` is a live handle; `re` and `im` point to 4 writable doubles.
enum SiegelStatus siegel_to_ball(const struct SiegelPointHandle *z, double *re, double *im);

// Contraction report of a pair.
//
// # Safety
// `z1`, `z2` are live handles; `out` is writable.
enum SiegelStatus siegel_mu_star(const struct SiegelPointHandle *z1,
                                 const struct SiegelPointHandle *z2,
                                 double p,
                                 struct SiegelContraction *out);

// `Psi_lambda` for `lambda` in the closed admissible interval.
//
// # Safety
// `out` is writable.
enum SiegelStatus siegel_rotation_new(double lambda, struct SiegelRotationHandle **out);

// # Safety
// `rot` is NULL or a handle from this library, not used afterwards.
void siegel_rotation_free(struct SiegelRotationHandle *rot);

// Image of `z` under the rotation, as a new handle.
//
// # Safety
// `rot` and `z` are live handles; `out` is writable.
enum SiegelStatus siegel_psi_apply(const struct SiegelRotationHandle *rot,
                                   const struct SiegelPointHandle *z,
                                   struct SiegelPointHandle **out);

// Boundary run for a case such as `"++,+-"` as a JSON report.
//
// Feasible cases run their witness; impossible ones run falsifier sample `seed`.
// The string is released with [`siegel_string_free`].
//
// # Safety
// `case_label` is a NUL-terminated string; `out_json` is writable.
enum SiegelStatus siegel_boundary_run(const char *case_label,
                                      uint64_t seed,
                                      double p,
                                      char **out_json);

// # Safety
// `s` is NULL or a string returned by this library, not used afterwards.
void siegel_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIEGEL_H */
