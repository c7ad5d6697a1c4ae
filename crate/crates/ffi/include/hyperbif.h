#ifndef HYPERBIF_H
#define HYPERBIF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. The nonzero solver codes match the CLI exit codes.
typedef enum HbStatus {
  HB_STATUS_OK = 0,
  // Invalid parameters or incompatible inputs.
  HB_STATUS_VALIDATION = 2,
  // A solver failed to converge or found no bracket.
  HB_STATUS_SOLVER = 3,
  // A verified property failed.
  HB_STATUS_VIOLATION = 4,
  // A required pointer argument was null.
  HB_STATUS_NULL_POINTER = 5,
  // A panic was caught at the boundary.
  HB_STATUS_PANIC = 6,
} HbStatus;

typedef enum HbGroupKind {
  // Dihedral group of the given order, in dimension 2 or 3.
  HB_GROUP_KIND_DIHEDRAL = 0,
  HB_GROUP_KIND_TETRAHEDRAL = 1,
  HB_GROUP_KIND_OCTAHEDRAL = 2,
  HB_GROUP_KIND_ICOSAHEDRAL = 3,
  // Symmetry group of the 600-cell, dimension 4.
  HB_GROUP_KIND_HYPER_ICOSAHEDRAL = 4,
  HB_GROUP_KIND_TRIVIAL = 5,
} HbGroupKind;

// A symmetry group together with its invariant degrees.
typedef struct HbGroup HbGroup;

// A sampled radial ground state.
typedef struct HbProfile HbProfile;

// A located and certified bifurcation point.
typedef struct HbBifurcation {
  size_t degree;
  double lambda_star;
  double radius_star;
  double sigma_star;
  // Nonzero when every certificate check passed.
  int32_t certified;
} HbBifurcation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *hb_version(void);

// Copy the last error message of this thread into `buf` (truncated and
// NUL-terminated). Returns the buffer size needed for the full message.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t hb_last_error(char *buf, size_t len);

// Ground state `w_R` of the exterior problem outside the ball of radius
// `radius`, with default numerics.
//
// # Safety
// `out` must be valid for one pointer write.
enum HbStatus hb_solve_exterior(size_t n, double p, double radius, struct HbProfile **out);

// Ground state `u_λ` on the exterior of the unit ball at scaling `lambda`.
//
// # Safety
// `out` must be valid for one pointer write.
enum HbStatus hb_solve_unit(size_t n, double p, double lambda, struct HbProfile **out);

// Number of samples in `profile`.
//
// # Safety
// `profile` must come from this library; `out` must be writable.
enum HbStatus hb_profile_len(const struct HbProfile *profile, size_t *out);

// Copy nodes, values and (when `derivatives` is non-null) derivatives.
// `len` must equal the profile length.
//
// # Safety
// Each non-null array must hold `len` doubles.
enum HbStatus hb_profile_copy(const struct HbProfile *profile,
                              double *nodes,
                              double *values,
                              double *derivatives,
                              size_t len);

// Interpolated value and derivative at `r`; either output may be null.
//
// # Safety
// `profile` must come from this library.
enum HbStatus hb_profile_eval(const struct HbProfile *profile,
                              double r,
                              double *value,
                              double *derivative);

// Shooting parameter: `w'(R)` of an exterior solve.
//
// # Safety
// `profile` must come from this library; `out` must be writable.
enum HbStatus hb_profile_slope(const struct HbProfile *profile, double *out);

// Release a profile. Null is ignored.
//
// # Safety
// `profile` must be null or come from this library and not be used again.
void hb_profile_free(struct HbProfile *profile);

// Build a group acting on `R^n` and its invariant degrees up to `k_max`.
// `order` is used by the dihedral kind only.
//
// # Safety
// `out` must be valid for one pointer write.
enum HbStatus hb_group_new(enum HbGroupKind kind,
                           size_t order,
                           size_t n,
                           int32_t rotations_only,
                           size_t k_max,
                           struct HbGroup **out);

// Number of invariant degrees found up to `k_max`.
//
// # Safety
// `group` must come from this library; `out` must be writable.
enum HbStatus hb_group_degree_count(const struct HbGroup *group, size_t *out);

// Degree, multiplicity and sphere eigenvalue of the `index`-th invariant
// degree. Outputs may be null.
//
// # Safety
// `group` must come from this library.
enum HbStatus hb_group_degree(const struct HbGroup *group,
                              size_t index,
                              size_t *degree,
                              size_t *multiplicity,
                              double *mu);

// Writes 1 when the first invariant degree lies above the dimension
// threshold with odd multiplicity, 0 otherwise.
//
// # Safety
// `group` must come from this library; `out` must be writable.
enum HbStatus hb_group_g1(const struct HbGroup *group, int32_t *out);

// Release a group. Null is ignored.
//
// # Safety
// `group` must be null or come from this library and not be used again.
void hb_group_free(struct HbGroup *group);

// Ground eigenvalue `τ₀` of the linearization at `u_λ`.
//
// # Safety
// `out` must be writable.
enum HbStatus hb_ground_eigenvalue(size_t n, double p, double lambda, double *out);

// Dirichlet-to-Neumann eigenvalue `σ_degree(λ)`.
//
// # Safety
// `out` must be writable.
enum HbStatus hb_sigma(size_t n, double p, size_t degree, double lambda, double *out);

// Locate `Λ*` for the first invariant degree of `group` on the default
// grid (`points` log-spaced values up to `lambda_max`) and certify it.
// An uncertified point still returns `HB_STATUS_OK` with `certified = 0`.
//
// # Safety
// `group` must come from this library; `out` must be writable.
enum HbStatus hb_find_bifurcation(size_t n,
                                  double p,
                                  const struct HbGroup *group,
                                  double lambda_max,
                                  size_t points,
                                  struct HbBifurcation *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERBIF_H */
