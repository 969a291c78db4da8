#ifndef HARDY_CONES_H
#define HARDY_CONES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  HC_STATUS_INVALID_ARGUMENT = 2,
  HC_STATUS_INVALID_CONE = 3,
  HC_STATUS_NO_CONVERGENCE = 4,
  HC_STATUS_INCONSISTENT_SPECTRUM = 5,
  HC_STATUS_CONFIG = 6,
  HC_STATUS_IO = 7,
  HC_STATUS_PANIC = 8,
  HC_STATUS_OTHER = 9,
} HcStatus;

typedef enum HcFttClass {
  HC_FTT_CLASS_CRITICAL = 0,
  HC_FTT_CLASS_SUBCRITICAL = 1,
  HC_FTT_CLASS_CRITICAL_CONJECTURED = 2,
} HcFttClass;

/**
 * Opaque cone.
 */
typedef struct HcCone HcCone;

/**
 * Opaque result of a `σ(μ)` computation.
 */
typedef struct HcSpectrum HcSpectrum;

/**
 * Constants of `-Δ - μ/δ²` on a cone.
 */
typedef struct HcConstants {
  size_t n;
  double mu;
  double mu0;
  double sigma;
  double gamma_plus;
  double gamma_minus;
  double lambda;
} HcConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the message of the last failure on this thread into `buf`
 * (NUL-terminated, truncated to `len`) and returns the full length without
 * the terminator, or 0 when there is none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t hc_last_error_message(char *buf, size_t len);

/**
 * Planar sector `{0 < θ < alpha}`.
 *
 * # Safety
 * `out` must be null or valid for a pointer write.
 */
enum HcStatus hc_cone_sector(double alpha, struct HcCone **out);

/**
 * Circular cone in `R^n` of polar half-angle `alpha` around the last axis.
 *
 * # Safety
 * `out` must be null or valid for a pointer write.
 */
enum HcStatus hc_cone_cap(size_t n, double alpha, struct HcCone **out);

/**
 * Polyhedral cone over a spherical polygon with `count` unit vertices
 * stored as `3 * count` doubles.
 *
 * # Safety
 * `vertices` must point to `3 * count` readable doubles; `out` must be
 * null or valid for a pointer write.
 */
enum HcStatus hc_cone_polygon(const double *vertices, size_t count, struct HcCone **out);

/**
 * # Safety
 * `cone` must be null or a handle from an `hc_cone_*` constructor that has
 * not been freed.
 */
void hc_cone_free(struct HcCone *cone);

/**
 * Ambient dimension of the cone, or 0 for a null handle.
 *
 * # Safety
 * `cone` must be null or a live handle.
 */
size_t hc_cone_dim(const struct HcCone *cone);

/**
 * Distance from `x` (of length `len`) to the boundary of the cone.
 *
 * # Safety
 * `cone` must be a live handle, `x` must point to `len` readable doubles
 * and `out` must be valid for a write.
 */
enum HcStatus hc_cone_delta(const struct HcCone *cone, const double *x, size_t len, double *out);

/**
 * `σ(μ)` with `levels` grid doublings and default solver options.
 *
 * # Safety
 * `cone` must be a live handle and `out` valid for a pointer write. The
 * handle written to `out` must be released with [`hc_spectrum_free`].
 */
enum HcStatus hc_sigma(const struct HcCone *cone,
                       double mu,
                       size_t levels,
                       struct HcSpectrum **out);

/**
 * Extrapolated eigenvalue of a spectrum, NaN for a null handle.
 *
 * # Safety
 * `spectrum` must be null or a live handle.
 */
double hc_spectrum_sigma(const struct HcSpectrum *spectrum);

/**
 * Principal eigenfunction at the unit vector `x/|x|`, normalized to
 * maximum 1.
 *
 * # Safety
 * `spectrum` must be a live handle, `x` must point to `len` readable
 * doubles and `out` must be valid for a write.
 */
enum HcStatus hc_spectrum_eval(const struct HcSpectrum *spectrum,
                               const double *x,
                               size_t len,
                               double *out);

/**
 * # Safety
 * `spectrum` must be null or a handle from [`hc_sigma`] not yet freed.
 */
void hc_spectrum_free(struct HcSpectrum *spectrum);

/**
 * Critical value `μ₀` of the cone.
 *
 * # Safety
 * `cone` must be a live handle and `out` valid for a write.
 */
enum HcStatus hc_mu0(const struct HcCone *cone, size_t levels, double *out);

/**
 * `σ(μ)`, `μ₀` and the derived constants in one call.
 *
 * # Safety
 * `cone` must be a live handle and `out` valid for a write.
 */
enum HcStatus hc_constants(const struct HcCone *cone,
                           double mu,
                           size_t levels,
                           struct HcConstants *out);

/**
 * Classification of the half-space weight with exponents `alphas[0..n]`.
 *
 * # Safety
 * `alphas` must point to `n` readable doubles and `out` be valid for a write.
 */
enum HcStatus hc_ftt_classify(const double *alphas, size_t n, enum HcFttClass *out);

/**
 * Largest finite-difference residual `|Δψ/ψ + V|/V` over `samples` seeded
 * points.
 *
 * # Safety
 * `alphas` must point to `n` readable doubles and `out` be valid for a write.
 */
enum HcStatus hc_ftt_residual(const double *alphas,
                              size_t n,
                              size_t samples,
                              uint64_t seed,
                              double *out);

/**
 * Runs the pipeline on a TOML run file and returns the report body as a
 * JSON string, to be released with [`hc_string_free`].
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` valid for a pointer
 * write.
 */
enum HcStatus hc_run_report(const char *config, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void hc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARDY_CONES_H */
