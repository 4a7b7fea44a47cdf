#ifndef HOMOTEST_H
#define HOMOTEST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every FFI entry point.
 */
typedef enum HtStatus {
  Ok = 0,
  NullPointer = 1,
  InvalidArgument = 2,
  InvalidUtf8 = 3,
  Panic = 4,
} HtStatus;

/**
 * Opaque point-cloud handle.
 */
typedef struct HtPointCloud HtPointCloud;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Never null; the
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ht_last_error(void);

/**
 * Builds a point cloud from a row-major `n x d` coordinate buffer.
 *
 * # Safety
 * `data` must point to `n * d` doubles; `out` must be a valid pointer.
 */
enum HtStatus ht_point_cloud_new(const double *data,
                                 uintptr_t n,
                                 uintptr_t d,
                                 struct HtPointCloud **out);

/**
 * Reads a point cloud from a CSV file of coordinate rows.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be valid.
 */
enum HtStatus ht_point_cloud_from_csv(const char *path, bool has_header, struct HtPointCloud **out);

/**
 * Draws `n` points from the distribution described by `spec_json` (the
 * same JSON schema as the library's `DistributionSpec`).
 *
 * # Safety
 * `spec_json` must be a valid NUL-terminated string; `out` must be valid.
 */
enum HtStatus ht_sample(const char *spec_json,
                        uintptr_t n,
                        uint64_t seed,
                        struct HtPointCloud **out);

/**
 * Number of points in the cloud.
 *
 * # Safety
 * `pc` must be a live handle; `out` must be valid.
 */
enum HtStatus ht_point_cloud_len(const struct HtPointCloud *pc, uintptr_t *out);

/**
 * Ambient dimension of the cloud.
 *
 * # Safety
 * `pc` must be a live handle; `out` must be valid.
 */
enum HtStatus ht_point_cloud_dim(const struct HtPointCloud *pc, uintptr_t *out);

/**
 * Betti numbers `β_0..β_{max_dim-1}` of the Rips complex at ball radius
 * `epsilon`, written into `out_betti` (length `max_dim`). The cloud is
 * used unscaled.
 *
 * # Safety
 * `pc` must be a live handle; `out_betti` must hold `max_dim` values.
 */
enum HtStatus ht_betti_at_epsilon(const struct HtPointCloud *pc,
                                  double epsilon,
                                  uintptr_t max_dim,
                                  uintptr_t *out_betti);

/**
 * Betti estimate under a named threshold rule (`"critical"` or
 * `"supercritical"`) and scaling mode (`"per_point_norm"`, `"none"`,
 * `"max_norm"`); `out_betti` must hold `dim` values where `dim` is the
 * cloud's ambient dimension.
 *
 * # Safety
 * `pc` must be a live handle; strings NUL-terminated; `out_betti` sized.
 */
enum HtStatus ht_betti_at_regime(const struct HtPointCloud *pc,
                                 const char *regime,
                                 const char *scaling,
                                 uintptr_t *out_betti);

/**
 * One-sample Betti test of `pc` against the hypothesized vector `hyp`
 * (length = ambient dimension), with null replicates drawn from
 * `null_spec_json`. Writes a `TestReport` JSON string to `out_json`.
 *
 * # Safety
 * Handles live, strings NUL-terminated, `hyp` of length `ht_point_cloud_dim`,
 * `out_json` valid; free the result with `ht_string_free`.
 */
enum HtStatus ht_one_sample_test(const struct HtPointCloud *pc,
                                 const uintptr_t *hyp,
                                 const char *null_spec_json,
                                 const char *regime,
                                 const char *scaling,
                                 double alpha,
                                 uintptr_t replications,
                                 uint64_t seed,
                                 char **out_json);

/**
 * Two-sample Betti test of `pc1` vs `pc2`; null replicate pairs are drawn
 * from `null_spec_json`. Writes a `TestReport` JSON string to `out_json`.
 *
 * # Safety
 * As for `ht_one_sample_test`, with two live cloud handles.
 */
enum HtStatus ht_two_sample_test(const struct HtPointCloud *pc1,
                                 const struct HtPointCloud *pc2,
                                 const char *null_spec_json,
                                 const char *regime,
                                 const char *scaling,
                                 double alpha,
                                 uintptr_t replications,
                                 uint64_t seed,
                                 char **out_json);

/**
 * Frees a cloud handle; a null pointer is a no-op.
 *
 * # Safety
 * `pc` must come from this library and not be freed twice.
 */
void ht_point_cloud_free(struct HtPointCloud *pc);

/**
 * Frees a string returned through an `out_json` parameter; null is a no-op.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ht_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOMOTEST_H */
