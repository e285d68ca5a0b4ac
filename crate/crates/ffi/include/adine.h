#ifndef ADINE_H
#define ADINE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AdineStatus {
  ADINE_STATUS_OK = 0,
  ADINE_STATUS_NULL_POINTER = 1,
  ADINE_STATUS_INVALID_ARGUMENT = 2,
  ADINE_STATUS_DIMENSION_MISMATCH = 3,
  ADINE_STATUS_NON_FINITE = 4,
  ADINE_STATUS_DIVERGED = 5,
  ADINE_STATUS_IO = 6,
  ADINE_STATUS_PARSE = 7,
  ADINE_STATUS_CALLBACK = 8,
  ADINE_STATUS_PANIC = 9,
} AdineStatus;

typedef enum AdineRunKind {
  ADINE_RUN_KIND_RACE = 0,
  ADINE_RUN_KIND_TRAIN = 1,
  ADINE_RUN_KIND_SWEEP_ZETA = 2,
} AdineRunKind;

/**
 * A quadratic, cubic or 2-D saddle objective.
 */
typedef struct AdineLandscape AdineLandscape;

/**
 * An optimizer together with its velocity and step counter.
 */
typedef struct AdineOptimizer AdineOptimizer;

typedef struct AdineStepRecord {
  uint64_t t;
  /**
   * Objective at the parameters the step started from.
   */
  double loss;
  /**
   * Weighted-sum loss; meaningful only when `has_wsl` is nonzero.
   */
  double wsl;
  int has_wsl;
  double momentum;
  double grad_norm;
} AdineStepRecord;

/**
 * Objective supplied by the caller. Writes `f(x)` to `f_out` and, when
 * `grad_out` is non-null, the gradient. Returns 0 on success.
 */
typedef int (*AdineObjectiveFn)(void *user,
                                const double *x,
                                size_t n,
                                double *f_out,
                                double *grad_out);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the buffer size needed to hold
 * the whole message; `buf` may be null to query it.
 */
size_t adine_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *adine_version(void);

/**
 * `f(x) = Σ λ_i x_i²` with `|λ_i|` drawn from `U[0.99, 1.01]` and alternating signs.
 */
enum AdineStatus adine_landscape_new_quadratic(size_t n,
                                               uint64_t seed,
                                               struct AdineLandscape **out_handle);

/**
 * `f(x) = Σ θ_i x_i³` with `θ_i` drawn from `U[1, 2]`.
 */
enum AdineStatus adine_landscape_new_cubic(size_t n,
                                           uint64_t seed,
                                           struct AdineLandscape **out_handle);

/**
 * `f(x, y) = x² − y²`.
 */
enum AdineStatus adine_landscape_new_saddle2d(struct AdineLandscape **out_handle);

void adine_landscape_free(struct AdineLandscape *handle);

/**
 * Dimension of the landscape, or 0 for a null handle.
 */
size_t adine_landscape_dim(const struct AdineLandscape *handle);

/**
 * Default start point; `x_out` must hold `dim` values.
 */
enum AdineStatus adine_landscape_default_start(const struct AdineLandscape *handle,
                                               double *x_out,
                                               size_t n);

/**
 * Value and, when `grad_out` is non-null, gradient at `x`.
 */
enum AdineStatus adine_landscape_eval(const struct AdineLandscape *handle,
                                      const double *x,
                                      size_t n,
                                      double *f_out,
                                      double *grad_out);

/**
 * Classical (heavy-ball) momentum.
 */
enum AdineStatus adine_optimizer_new_cm(double eta, double m, struct AdineOptimizer **out_handle);

/**
 * Nesterov momentum with the gradient taken at the lookahead point.
 */
enum AdineStatus adine_optimizer_new_nag(double eta, double m, struct AdineOptimizer **out_handle);

/**
 * Nesterov momentum following the `a_t` schedule.
 */
enum AdineStatus adine_optimizer_new_nag_scheduled(double eta, struct AdineOptimizer **out_handle);

/**
 * Adaptive inertia: switches between `m_s < 1` and `m_g >= 1`.
 */
enum AdineStatus adine_optimizer_new_adine(double eta,
                                           double m_s,
                                           double m_g,
                                           double zeta,
                                           struct AdineOptimizer **out_handle);

void adine_optimizer_free(struct AdineOptimizer *handle);

/**
 * Forgets the velocity and step count.
 */
enum AdineStatus adine_optimizer_reset(struct AdineOptimizer *handle);

/**
 * Copies the current velocity (zeros before the first step).
 */
enum AdineStatus adine_optimizer_velocity(const struct AdineOptimizer *handle,
                                          double *v_out,
                                          size_t n);

/**
 * One step on a landscape; `theta` is updated in place. `record_out` may be null.
 */
enum AdineStatus adine_optimizer_step_landscape(struct AdineOptimizer *handle,
                                                const struct AdineLandscape *landscape,
                                                double *theta,
                                                size_t n,
                                                struct AdineStepRecord *record_out);

/**
 * One step on a caller-supplied objective; `theta` is updated in place.
 */
enum AdineStatus adine_optimizer_step_callback(struct AdineOptimizer *handle,
                                               AdineObjectiveFn objective,
                                               void *user,
                                               double *theta,
                                               size_t n,
                                               struct AdineStepRecord *record_out);

/**
 * `(prev + loss) / 2`.
 */
double adine_wsl_update(double prev, double loss);

/**
 * Weighted-sum loss of a whole loss sequence, oldest first.
 */
enum AdineStatus adine_wsl_closed_form(const double *losses, size_t n, double *out_value);

/**
 * Optimal heavy-ball step size and momentum for curvature in `[alpha, beta]`.
 */
enum AdineStatus adine_polyak_optimal(double alpha, double beta, double *eta_out, double *m_out);

/**
 * Scheduled Nesterov momentum `m_t`.
 */
double adine_nesterov_momentum(uint64_t t);

/**
 * Runs a JSON config file and writes its outputs under `out_dir`.
 */
enum AdineStatus adine_run_config(enum AdineRunKind kind,
                                  const char *config_path,
                                  const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADINE_H */
