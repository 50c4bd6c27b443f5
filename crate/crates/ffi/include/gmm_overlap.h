/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef GMM_OVERLAP_H
#define GMM_OVERLAP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GmoStatus {
  GMO_STATUS_OK = 0,
  GMO_STATUS_NULL_POINTER = 1,
  GMO_STATUS_INVALID_ARGUMENT = 2,
  GMO_STATUS_NOT_POSITIVE_DEFINITE = 3,
  GMO_STATUS_NUMERICAL_FAILURE = 4,
  GMO_STATUS_PANIC = 5,
} GmoStatus;

// Opaque labeled dataset.
typedef struct GmoDataset GmoDataset;

// Opaque Gaussian mixture.
typedef struct GmoMixture GmoMixture;

typedef struct GmoOverlap {
  // Misclassification rate of the MLE rule.
  double value;
  // Zero for quadrature.
  double std_error;
  size_t n_samples;
} GmoOverlap;

typedef struct GmoSeparator {
  double t;
  double c;
  double u1;
  double u2;
  double p1;
  double p2;
  double p_minmax;
  size_t iterations;
} GmoSeparator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread; empty after a
// successful call. Valid until the next call into this library.
const char *gmo_last_error_message(void);

// Builds a mixture of `k` components in `d` dimensions.
//
// `means` holds `k·d` values, `covariances` holds `k` row-major `d×d`
// blocks. A null `weights` means equal mixing factors.
//
// # Safety
// Pointers must be valid for the stated lengths; `out` must be writable.
enum GmoStatus gmo_mixture_new(size_t k,
                               size_t d,
                               const double *weights,
                               const double *means,
                               const double *covariances,
                               struct GmoMixture **out);

// # Safety
// `mixture` must be null or a handle from `gmo_mixture_new` or
// `gmo_estimate`, not freed before.
void gmo_mixture_free(struct GmoMixture *mixture);

// Dimension of the mixture, 0 for a null handle.
//
// # Safety
// `mixture` must be null or a live handle.
size_t gmo_mixture_dim(const struct GmoMixture *mixture);

// Number of components, 0 for a null handle.
//
// # Safety
// `mixture` must be null or a live handle.
size_t gmo_mixture_k(const struct GmoMixture *mixture);

// Draws `n` labeled points.
//
// # Safety
// `mixture` must be a live handle and `out` writable.
enum GmoStatus gmo_mixture_sample(const struct GmoMixture *mixture,
                                  size_t n,
                                  uint64_t seed,
                                  struct GmoDataset **out);

// Builds a dataset from `n` row-major points in `d` dimensions and their
// labels in `1..=k`.
//
// # Safety
// `points` must hold `n·d` values, `labels` `n` values; `out` writable.
enum GmoStatus gmo_dataset_new(size_t n,
                               size_t d,
                               size_t k,
                               const double *points,
                               const size_t *labels,
                               struct GmoDataset **out);

// # Safety
// `dataset` must be null or a handle not freed before.
void gmo_dataset_free(struct GmoDataset *dataset);

// Number of points, 0 for a null handle.
//
// # Safety
// `dataset` must be null or a live handle.
size_t gmo_dataset_len(const struct GmoDataset *dataset);

// # Safety
// `dataset` must be null or a live handle.
size_t gmo_dataset_dim(const struct GmoDataset *dataset);

// Row-major coordinates, `len·dim` values owned by the handle.
//
// # Safety
// `dataset` must be null or a live handle.
const double *gmo_dataset_points(const struct GmoDataset *dataset);

// Labels in `1..=k`, `len` values owned by the handle.
//
// # Safety
// `dataset` must be null or a live handle.
const size_t *gmo_dataset_labels(const struct GmoDataset *dataset);

// Per-class sample means and covariances of `dataset`.
//
// # Safety
// `dataset` must be a live handle and `out` writable.
enum GmoStatus gmo_estimate(const struct GmoDataset *dataset, struct GmoMixture **out);

// Monte Carlo estimate of the MLE misclassification rate.
//
// # Safety
// `mixture` must be a live handle and `out` writable.
enum GmoStatus gmo_mle_error_mc(const struct GmoMixture *mixture,
                                size_t n,
                                uint64_t seed,
                                struct GmoOverlap *out);

// Grid quadrature of the MLE misclassification rate, `d <= 2`.
//
// # Safety
// `mixture` must be a live handle and `out` writable.
enum GmoStatus gmo_mle_error_quadrature(const struct GmoMixture *mixture,
                                        size_t cells_per_axis,
                                        struct GmoOverlap *out);

// Minimax linear separator of a two-component mixture. When `b_out` is
// not null it receives the `d` coefficients of the direction.
//
// # Safety
// `mixture` must be a live handle, `out` writable and `b_out` null or
// writable for `d` values.
enum GmoStatus gmo_best_linear_separator(const struct GmoMixture *mixture,
                                         double precision,
                                         struct GmoSeparator *out,
                                         double *b_out);

// Fisher coefficients of a labeled dataset. When `eigenvalues_out` is not
// null it receives all `d` eigenvalues of `T⁻¹B`, non-increasing.
//
// # Safety
// `dataset` must be a live handle, the scalar outputs writable and
// `eigenvalues_out` null or writable for `d` values.
enum GmoStatus gmo_fisher(const struct GmoDataset *dataset,
                          double *lambda_min,
                          double *lambda_avg,
                          double *eigenvalues_out);

// Between-within e-distance of the points labeled `a` and `b`.
//
// # Safety
// `dataset` must be a live handle and `out` writable.
enum GmoStatus gmo_e_distance(const struct GmoDataset *dataset, size_t a, size_t b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GMM_OVERLAP_H */
