#ifndef SFKAHLER_H
#define SFKAHLER_H

/* Generated by cbindgen from the sfkahler-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. Zero is success.
typedef enum SfkStatus {
  SFK_STATUS_OK = 0,
  SFK_STATUS_NULL_POINTER = 1,
  SFK_STATUS_INVALID_DIMENSION = 2,
  SFK_STATUS_INVALID_ARGUMENT = 3,
  SFK_STATUS_NON_FINITE = 4,
  SFK_STATUS_INADMISSIBLE = 5,
  SFK_STATUS_NOT_MINIMAL = 6,
  SFK_STATUS_OUT_OF_SPAN = 7,
  SFK_STATUS_OUTSIDE_STABLE_WINDOW = 8,
  SFK_STATUS_NO_ASYMPTOTIC_END = 9,
  SFK_STATUS_NON_CONVERGENT = 10,
  // Any other numerical failure; see the last error message.
  SFK_STATUS_NUMERICAL = 11,
  SFK_STATUS_INDEX_OUT_OF_RANGE = 12,
  SFK_STATUS_PANIC = 13,
} SfkStatus;

typedef enum SfkRegion {
  SFK_REGION_INADMISSIBLE = 0,
  SFK_REGION_EUCLIDEAN_FIXED_POINT = 1,
  SFK_REGION_AXIS_X = 2,
  SFK_REGION_AXIS_Y = 3,
  SFK_REGION_REGION2_AE_EXTERIOR = 4,
  SFK_REGION_REGION3_CRITICAL_LEVEL = 5,
  SFK_REGION_REGION4_FINITE_TIME_BLOWUP = 6,
  SFK_REGION_REGION5_COMPLETE_PUNCTURED = 7,
} SfkRegion;

typedef enum SfkDomain {
  SFK_DOMAIN_NONE = 0,
  SFK_DOMAIN_EXTERIOR = 1,
  SFK_DOMAIN_ALL_OF_CN = 2,
  SFK_DOMAIN_PUNCTURED_CN = 3,
  SFK_DOMAIN_BOUNDED_BOUNDARY = 4,
} SfkDomain;

// Critical-level arc; `NotOnArc` off the critical level.
typedef enum SfkArc {
  SFK_ARC_NOT_ON_ARC = 0,
  SFK_ARC_BLACK = 1,
  SFK_ARC_BLUE = 2,
  SFK_ARC_YELLOW = 3,
} SfkArc;

typedef enum SfkEndKind {
  SFK_END_KIND_CONVERGED_TO_ORIGIN = 0,
  SFK_END_KIND_ADMISSIBLE_LINE_ASYMPTOTE = 1,
  SFK_END_KIND_FINITE_TIME_BLOWUP = 2,
  SFK_END_KIND_MAX_TIME_REACHED = 3,
  SFK_END_KIND_STEP_SIZE_UNDERFLOW = 4,
} SfkEndKind;

typedef enum SfkStability {
  SFK_STABILITY_STABLE = 0,
  SFK_STABILITY_WEAKLY_STABLE = 1,
  SFK_STABILITY_UNSTABLE = 2,
} SfkStability;

// Opaque Kähler potential profile.
typedef struct SfkProfile SfkProfile;

// Opaque integrated orbit.
typedef struct SfkTrajectory SfkTrajectory;

typedef struct SfkClassification {
  enum SfkRegion region;
  enum SfkDomain domain;
  enum SfkArc arc;
  bool divisor_possible;
  bool complete_without_boundary;
} SfkClassification;

typedef struct SfkReducedPenrose {
  double lhs;
  double rhs;
  double gap;
} SfkReducedPenrose;

typedef struct SfkFullPenrose {
  double rhs;
  bool holds;
} SfkFullPenrose;

// Dichotomy audit. Missing reals are NaN; tri-state flags use -1 for unknown.
typedef struct SfkPenroseReport {
  enum SfkRegion region;
  size_t minimal_spheres;
  bool stable_sphere;
  double x0;
  double y0;
  double v_sigma;
  double m_paper;
  double m_numeric;
  double reduced_lhs;
  double reduced_rhs;
  double gap;
  double full_rhs;
  int32_t holds_reduced;
  int32_t holds_full;
  bool divisor_present;
  bool dichotomy_ok;
} SfkPenroseReport;

typedef struct SfkSample {
  double t;
  double x;
  double y;
  double v;
} SfkSample;

// How one direction of an orbit ended. `value` is the limit `w` on the
// admissible line, the blowup time, or NaN.
typedef struct SfkEnd {
  enum SfkEndKind kind;
  double value;
} SfkEnd;

typedef struct SfkMass {
  double m_numeric;
  // NaN when no closed-form value applies.
  double m_paper;
  bool below_decay_threshold;
} SfkMass;

typedef struct SfkSphere {
  double t_star;
  double x;
  double y;
  enum SfkStability stability;
  double area;
  bool outermost;
  double residual;
} SfkSphere;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message into `buf` (NUL-terminated, truncated to `len`).
// Returns the full message length excluding the terminator, or 0 when there is none.
size_t sfk_last_error_message(char *buf, size_t len);

// Static description of a status code; unknown codes map to "unknown status".
const char *sfk_status_name(int32_t status);

enum SfkStatus sfk_classify(uint32_t n, double x, double y, struct SfkClassification *result);

// Level function value; `+inf` on the y axis.
enum SfkStatus sfk_level_value(uint32_t n, double x, double y, double *result);

enum SfkStatus sfk_lambda_critical(uint32_t n, double *result);

enum SfkStatus sfk_vector_field(uint32_t n, double x, double y, double *dx, double *dy);

// `(n-1)x + ny + 2n-1`, zero on the minimal line.
enum SfkStatus sfk_minimal_line_residual(uint32_t n, double x, double y, double *result);

enum SfkStatus sfk_minimal_sphere_volume(uint32_t n, double x0, double *result);

enum SfkStatus sfk_penrose_reduced(uint32_t n,
                                   double x0,
                                   double y0,
                                   struct SfkReducedPenrose *result);

enum SfkStatus sfk_penrose_full(uint32_t n,
                                double mass,
                                double volume,
                                struct SfkFullPenrose *result);

enum SfkStatus sfk_dichotomy_report(uint32_t n,
                                    double x,
                                    double y,
                                    struct SfkPenroseReport *result);

// Integrates both directions from `(x, y)` at `t = 0`. Pass `tol <= 0` for the default.
enum SfkStatus sfk_trajectory_integrate(uint32_t n,
                                        double x,
                                        double y,
                                        double t_min,
                                        double t_max,
                                        double tol,
                                        struct SfkTrajectory **result);

// # Safety
// `traj` must be null or a handle from `sfk_trajectory_integrate` not yet freed.
void sfk_trajectory_free(struct SfkTrajectory *traj);

// Number of stored samples, 0 for a null handle.
size_t sfk_trajectory_len(const struct SfkTrajectory *traj);

enum SfkStatus sfk_trajectory_sample(const struct SfkTrajectory *traj,
                                     size_t index,
                                     struct SfkSample *result);

// Dense-output state at time `t`.
enum SfkStatus sfk_trajectory_state_at(const struct SfkTrajectory *traj,
                                       double t,
                                       struct SfkSample *result);

enum SfkStatus sfk_trajectory_ends(const struct SfkTrajectory *traj,
                                   struct SfkEnd *forward,
                                   struct SfkEnd *backward);

// Largest relative drift of the level function over the stored samples.
enum SfkStatus sfk_trajectory_level_drift(const struct SfkTrajectory *traj, double *result);

// Builds a profile from a copy of the trajectory; the trajectory handle stays valid.
enum SfkStatus sfk_profile_from_trajectory(const struct SfkTrajectory *traj,
                                           struct SfkProfile **result);

// Closed-form axis family `u_t = A e^t (1 + B e^{-kt})^{1/k}` with `k` in `{n-1, n}`.
enum SfkStatus sfk_profile_closed_form(uint32_t n,
                                       uint32_t k,
                                       double a,
                                       double b,
                                       struct SfkProfile **result);

// # Safety
// `profile` must be null or a live handle from this library.
void sfk_profile_free(struct SfkProfile *profile);

// Scalar curvature at `t`; zero up to rounding for every valid profile.
enum SfkStatus sfk_profile_scalar_curvature(const struct SfkProfile *profile,
                                            double t,
                                            double *result);

enum SfkStatus sfk_profile_mean_curvature(const struct SfkProfile *profile,
                                          double t,
                                          double *result);

enum SfkStatus sfk_profile_sphere_area(const struct SfkProfile *profile, double t, double *result);

enum SfkStatus sfk_profile_adm_mass(const struct SfkProfile *profile, struct SfkMass *result);

// Writes up to `capacity` minimal spheres into `spheres` (ordered by `t`) and
// the total number found into `count`. `spheres` may be null when `capacity` is 0.
enum SfkStatus sfk_profile_minimal_spheres(const struct SfkProfile *profile,
                                           struct SfkSphere *spheres,
                                           size_t capacity,
                                           size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SFKAHLER_H */
