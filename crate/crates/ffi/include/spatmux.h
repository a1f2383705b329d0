#ifndef SPATMUX_H
#define SPATMUX_H

/* Generated by cbindgen from the spatmux-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum {
  /**
   * Success.
   */
  SPX_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SPX_STATUS_NULL_POINTER = 1,
  /**
   * A parameter lies outside its mathematical domain.
   */
  SPX_STATUS_DOMAIN = 2,
  /**
   * The requested outage level is below the noise-limited floor.
   */
  SPX_STATUS_INFEASIBLE = 3,
  /**
   * A root-finding bracket could not be established.
   */
  SPX_STATUS_BRACKET = 4,
  /**
   * A numerical procedure failed.
   */
  SPX_STATUS_NUMERICAL = 5,
  /**
   * An internal invariant was violated (library bug).
   */
  SPX_STATUS_INTERNAL = 6,
} SpxStatus;

/**
 * Opaque handle: link parameters plus interferer-field parameters.
 */
typedef struct SpxModel SpxModel;

/**
 * Contention density and capacity at one target outage level.
 */
typedef struct {
  double epsilon;
  double contention_density;
  double exact_capacity;
  double asymptotic_capacity;
  uint32_t ell;
  double omega;
} SpxCapacity;

/**
 * Monte Carlo estimate with its standard error.
 */
typedef struct {
  double probability;
  double std_error;
  uint64_t trials;
} SpxOutageEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *spx_version(void);

/**
 * Static description of a status code.
 */
const char *spx_status_message(SpxStatus status);

/**
 * Copy the most recent error message of this thread into `buf`
 * (NUL-terminated, truncated to `cap` bytes). Returns the full message
 * length in bytes excluding the NUL, regardless of truncation. A null
 * or zero-capacity buffer just queries the length.
 *
 * # Safety
 * `buf` must point to at least `cap` writable bytes when non-null.
 */
size_t spx_last_error(char *buf, size_t cap);

/**
 * Create a model handle.
 *
 * `gamma` is the linear transmit SNR; pass INFINITY for the high-SNR
 * regime. `lambda` is the transmitter density and `alpha` the path loss
 * exponent (> 2). On success writes the handle through `out`; release it
 * with `spx_model_free`.
 *
 * # Safety
 * `out` must be a valid pointer to a `SpxModel*` slot.
 */
SpxStatus spx_model_new(uint32_t n_t,
                        uint32_t n_r,
                        double z,
                        double gamma,
                        double d0,
                        double lambda,
                        double alpha,
                        SpxModel **out);

/**
 * Release a handle created by `spx_model_new`. A null handle is a no-op.
 *
 * # Safety
 * `model` must be null or a pointer previously returned by
 * `spx_model_new` that has not yet been freed.
 */
void spx_model_free(SpxModel *model);

/**
 * Closed-form per-stream outage probability at the model's density.
 *
 * # Safety
 * `model` must be a live handle; `out` must point to a writable f64.
 */
SpxStatus spx_outage_probability(const SpxModel *model, double *out);

/**
 * The gamma-function geometry factor multiplying the density in the
 * outage exponent.
 *
 * # Safety
 * `model` must be a live handle; `out` must point to a writable f64.
 */
SpxStatus spx_theta(const SpxModel *model, double *out);

/**
 * Leading small-density coefficient of the outage expansion.
 *
 * # Safety
 * `model` must be a live handle; `out` must point to a writable f64.
 */
SpxStatus spx_omega(const SpxModel *model, double *out);

/**
 * Interference-cancelation degrees of freedom floor(n_r / n_t).
 *
 * # Safety
 * `model` must be a live handle; `out` must point to a writable u32.
 */
SpxStatus spx_max_cancelable(const SpxModel *model, uint32_t *out);

/**
 * Density at which the outage probability reaches `epsilon`.
 *
 * # Safety
 * `model` must be a live handle; `out` must point to a writable f64.
 */
SpxStatus spx_contention_density(const SpxModel *model, double epsilon, double *out);

/**
 * Exact and asymptotic transmission capacity at `epsilon`.
 *
 * # Safety
 * `model` must be a live handle; `out` must point to a writable
 * `SpxCapacity`.
 */
SpxStatus spx_transmission_capacity(const SpxModel *model, double epsilon, SpxCapacity *out);

/**
 * Monte Carlo outage estimate. `semianalytic` selects the
 * conditional-outage estimator (channel averaging done in closed form);
 * otherwise the full system simulation runs. Deterministic in
 * (seed, trials) independent of threading.
 *
 * # Safety
 * `model` must be a live handle; `out` must point to a writable
 * `SpxOutageEstimate`.
 */
SpxStatus spx_simulate_outage(const SpxModel *model,
                              uint64_t trials,
                              uint64_t seed,
                              double delta,
                              bool semianalytic,
                              SpxOutageEstimate *out);

/**
 * Outage probability conditioned on fixed interferer distances, supplied
 * as their alpha-th powers x_i = |D_i|^alpha. `distances_alpha` may be
 * null when `len` is zero.
 *
 * # Safety
 * `model` must be a live handle; `distances_alpha` must point to `len`
 * readable f64 values when `len > 0`; `out` must point to a writable f64.
 */
SpxStatus spx_conditional_outage(const SpxModel *model,
                                 const double *distances_alpha,
                                 size_t len,
                                 double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SPATMUX_H */
