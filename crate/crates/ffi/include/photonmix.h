#ifndef PHOTONMIX_H
#define PHOTONMIX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum PmStatus {
  PM_STATUS_OK = 0,
  PM_STATUS_NULL_POINTER = 1,
  PM_STATUS_INVALID_PARAMETER = 2,
  PM_STATUS_INVALID_INPUT = 3,
  PM_STATUS_NUMERICAL = 4,
  PM_STATUS_UNDEFINED_VISIBILITY = 5,
  PM_STATUS_DEGENERATE_ANCHOR = 6,
  PM_STATUS_BUFFER_TOO_SMALL = 7,
  PM_STATUS_PANIC = 8,
} PmStatus;

typedef enum PmNoiseKind {
  PM_NOISE_KIND_NONE = 0,
  PM_NOISE_KIND_GAUSSIAN = 1,
  PM_NOISE_KIND_COUNTS = 2,
} PmNoiseKind;

// Unitary 2x2 beam splitter.
typedef struct PmBeamSplitter PmBeamSplitter;

// LO input state.
typedef struct PmLoState PmLoState;

// Detector-array measurement.
typedef struct PmMeasurement PmMeasurement;

// Transverse Hermite-Gaussian mode.
typedef struct PmMode PmMode;

// Reconstructed photon profile.
typedef struct PmProfile PmProfile;

typedef struct PmWindow {
  double center_x;
  double center_y;
  double half_width_x;
  double half_width_y;
} PmWindow;

typedef struct PmPoint {
  double x;
  double y;
} PmPoint;

typedef struct PmUnits {
  double eta;
  double d_s;
  double eps;
} PmUnits;

typedef struct PmCorrelation {
  double lo_term;
  double het_term;
  double total_reduced;
  double total_physical;
  double prefactor;
} PmCorrelation;

typedef struct PmHomMetrics {
  double visibility;
  double depth;
  double plateau;
  double overlap;
} PmHomMetrics;

// Noise model for synthesized array data. `sigma` is read for
// `GAUSSIAN`, `events` for `COUNTS`.
typedef struct PmNoise {
  enum PmNoiseKind kind;
  double sigma;
  uint64_t events;
} PmNoise;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread; empty after a
// successful call. Valid until the next call on the same thread.
const char *pm_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *pm_version(void);

// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum PmStatus pm_mode_new(uint32_t order_x,
                          uint32_t order_y,
                          double waist,
                          double center_x,
                          double center_y,
                          struct PmMode **out);

// # Safety
// `mode` must be null or a handle from [`pm_mode_new`] not yet freed.
void pm_mode_free(struct PmMode *mode);

// # Safety
// `mode` must be a live handle and `out` writable.
enum PmStatus pm_mode_eval(const struct PmMode *mode, double x, double y, double *out);

// Overlap integral of two modes over `window`, or the whole plane when
// `window` is null.
//
// # Safety
// `a`, `b` must be live handles, `window` null or valid, `out` writable.
enum PmStatus pm_mode_overlap(const struct PmMode *a,
                              const struct PmMode *b,
                              const struct PmWindow *window,
                              double *out);

// # Safety
// `out` must be writable.
enum PmStatus pm_lo_fock(uint32_t n, struct PmLoState **out);

// Coherent state with amplitude `alpha_re + i alpha_im`.
//
// # Safety
// `out` must be writable.
enum PmStatus pm_lo_coherent(double alpha_re, double alpha_im, struct PmLoState **out);

// # Safety
// `lo` must be null or a live handle.
void pm_lo_free(struct PmLoState *lo);

// `<n>` and `<n(n-1)>` of the state.
//
// # Safety
// `lo` must be a live handle; the outputs writable.
enum PmStatus pm_lo_moments(const struct PmLoState *lo, double *n_mean, double *n2fact);

// Beam splitter from `[re s11, im s11, re s12, im s12, re s21, im s21,
// re s22, im s22]`. Fails unless the matrix is unitary.
//
// # Safety
// `s` must point to 8 readable doubles; `out` writable.
enum PmStatus pm_beam_splitter_new(const double *s, struct PmBeamSplitter **out);

// The symmetric splitter: `s11 = s22 = -1/sqrt(2)`, `s12 = s21 = i/sqrt(2)`.
//
// # Safety
// `out` must be writable.
enum PmStatus pm_beam_splitter_symmetric(struct PmBeamSplitter **out);

// # Safety
// `bs` must be null or a live handle.
void pm_beam_splitter_free(struct PmBeamSplitter *bs);

// # Safety
// All handles must be live, `units` valid, `out` writable.
enum PmStatus pm_w2_point_general(const struct PmBeamSplitter *bs,
                                  const struct PmLoState *lo,
                                  const struct PmMode *u_lo,
                                  const struct PmMode *u_ph,
                                  struct PmPoint r1,
                                  struct PmPoint r2,
                                  const struct PmUnits *units,
                                  struct PmCorrelation *out);

// # Safety
// All handles must be live, `units` valid, `out` writable.
enum PmStatus pm_w2_point_symmetric(const struct PmLoState *lo,
                                    const struct PmMode *u_lo,
                                    const struct PmMode *u_ph,
                                    struct PmPoint r1,
                                    struct PmPoint r2,
                                    const struct PmUnits *units,
                                    struct PmCorrelation *out);

// Heterodyne term `|U_LO(r1) U_ph(r2) - U_LO(r2) U_ph(r1)|^2 <n>`.
//
// # Safety
// Handles must be live, `out` writable.
enum PmStatus pm_w2_heterodyne(const struct PmMode *u_lo,
                               const struct PmMode *u_ph,
                               struct PmPoint r1,
                               struct PmPoint r2,
                               double n_mean,
                               double *out);

// Correlation integrated over two rectangular windows with efficiencies
// `eta1`, `eta2`.
//
// # Safety
// Handles must be live, `out` writable.
enum PmStatus pm_w2_integrated(const struct PmLoState *lo,
                               const struct PmMode *u_lo,
                               const struct PmMode *u_ph,
                               struct PmWindow window1,
                               double eta1,
                               struct PmWindow window2,
                               double eta2,
                               double eps,
                               struct PmCorrelation *out);

// Integrated correlation (reduced units) for each photon displacement in
// `displacements`, written to `totals` (`len` values).
//
// # Safety
// Handles must be live; `displacements` and `totals` must hold `len` values.
enum PmStatus pm_misalignment_scan(const struct PmLoState *lo,
                                   const struct PmMode *u_lo,
                                   const struct PmMode *u_ph,
                                   double half_width,
                                   const double *displacements,
                                   size_t len,
                                   double *totals);

// HOM visibility and depth from a misalignment scan over `displacements`.
//
// # Safety
// Handles must be live; `displacements` must hold `len` values; `out` writable.
enum PmStatus pm_hom_metrics(const struct PmLoState *lo,
                             const struct PmMode *u_lo,
                             const struct PmMode *u_ph,
                             double half_width,
                             const double *displacements,
                             size_t len,
                             struct PmHomMetrics *out);

// Synthesize array correlations for a known photon mode. With `pedestal`
// nonzero the LO-only term is added and recorded.
//
// # Safety
// Handles must be live; `points` must hold `len` values; `out` writable.
enum PmStatus pm_synthesize_array(const struct PmLoState *lo,
                                  const struct PmMode *u_lo,
                                  const struct PmMode *u_ph,
                                  struct PmPoint ref_point,
                                  const struct PmPoint *points,
                                  size_t len,
                                  struct PmNoise noise,
                                  uint64_t seed,
                                  bool pedestal,
                                  struct PmMeasurement **out);

// Wrap externally measured heterodyne values (pedestal already removed).
//
// # Safety
// `points` and `values` must hold `len` values; `out` writable.
enum PmStatus pm_measurement_new(struct PmPoint ref_point,
                                 const struct PmPoint *points,
                                 const double *values,
                                 size_t len,
                                 double n_mean,
                                 struct PmMeasurement **out);

// Number of array elements, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t pm_measurement_len(const struct PmMeasurement *m);

// Copy the measured values into `out` (room for `capacity` values).
//
// # Safety
// `m` must be a live handle and `out` hold `capacity` values.
enum PmStatus pm_measurement_values(const struct PmMeasurement *m, double *out, size_t capacity);

// # Safety
// `m` must be null or a live handle.
void pm_measurement_free(struct PmMeasurement *m);

// Reconstruct the photon profile. `anchor` is the photon amplitude at the
// reference point, or null for an unanchored reconstruction.
//
// # Safety
// Handles must be live, `anchor` null or valid, `out` writable.
enum PmStatus pm_reconstruct(const struct PmMeasurement *m,
                             const struct PmMode *u_lo,
                             const double *anchor,
                             struct PmProfile **out);

// Number of reconstructed amplitudes, or 0 for a null handle.
//
// # Safety
// `p` must be null or a live handle.
size_t pm_profile_len(const struct PmProfile *p);

// # Safety
// `p` must be a live handle and `out` hold `capacity` values.
enum PmStatus pm_profile_amplitudes(const struct PmProfile *p, double *out, size_t capacity);

// RMS misfit and the photon amplitude at the reference point.
//
// # Safety
// `p` must be a live handle; the outputs writable.
enum PmStatus pm_profile_summary(const struct PmProfile *p, double *residual, double *anchor_value);

// # Safety
// `p` must be null or a live handle.
void pm_profile_free(struct PmProfile *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHOTONMIX_H */
