#ifndef POISSON_AMERICAN_H
#define POISSON_AMERICAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

enum PaStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  PA_STATUS_OK = 0,
  PA_STATUS_NULL_POINTER = 1,
  PA_STATUS_INVALID_ARGUMENT = 2,
  PA_STATUS_INVALID_MODEL = 3,
  PA_STATUS_ASSUMPTION = 4,
  PA_STATUS_NO_ROOT = 5,
  PA_STATUS_BARRIER_REGIME = 6,
  PA_STATUS_NOT_SOLVED = 7,
  PA_STATUS_NUMERICAL = 8,
  PA_STATUS_PANIC = 9,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum PaStatus PaStatus;
#else
typedef int32_t PaStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

enum PaSide
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  PA_SIDE_SPECTRALLY_NEGATIVE = 0,
  PA_SIDE_SPECTRALLY_POSITIVE = 1,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum PaSide PaSide;
#else
typedef int32_t PaSide;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

enum PaOption
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  PA_OPTION_PUT = 0,
  PA_OPTION_CALL = 1,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum PaOption PaOption;
#else
typedef int32_t PaOption;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Opaque jump-diffusion model.
 */
typedef struct PaModel PaModel;

/**
 * Opaque pricing problem with its solved barriers, once solved.
 */
typedef struct PaProblem PaProblem;

/**
 * Optimal barriers: log-levels, price levels and first-order residuals.
 */
typedef struct PaBarriers {
  double l;
  double u;
  double lower_price;
  double upper_price;
  double residual_h;
  double residual_j;
  double residual_j_tilde;
  /**
   * Residual with exponential growth in u - l scaled out, relative to K.
   */
  double residual_scaled;
} PaBarriers;

typedef struct PaMcEstimate {
  double mean;
  double stderr;
  uint64_t n_effective;
  double truncated_fraction;
  double truncation_bound;
  /**
   * 1 when tilted sampling was used.
   */
  int32_t tilted;
} PaMcEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread; empty after a success.
 */
const char *pa_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pa_version(void);

/**
 * Creates a model (`side` a `PaSide` value) from drift `c`, volatility `eta` and `n_jumps` exponential
 * jump classes (rates `alphas`, parameters `betas`; may be null when
 * `n_jumps` is 0).
 *
 * # Safety
 * `alphas` and `betas` must point to `n_jumps` doubles; `out` must be valid.
 */
PaStatus pa_model_new(int32_t side,
                      double c,
                      double eta,
                      const double *alphas,
                      const double *betas,
                      size_t n_jumps,
                      struct PaModel **out);

/**
 * # Safety
 * `model` must come from `pa_model_new` and not be used afterwards.
 */
void pa_model_free(struct PaModel *model);

/**
 * Laplace exponent of the model's spectrally negative representation.
 *
 * # Safety
 * Pointers must be valid.
 */
PaStatus pa_model_psi(const struct PaModel *model, double theta, double *out);

/**
 * Largest real root of psi(s) = q.
 *
 * # Safety
 * Pointers must be valid.
 */
PaStatus pa_model_phi(const struct PaModel *model, double q, double *out);

/**
 * Creates a pricing problem (`option` a `PaOption` value); the model is copied. `x_ref` is the call
 * reference log-price, NaN for the default; ignored for puts.
 *
 * # Safety
 * Pointers must be valid.
 */
PaStatus pa_problem_new(const struct PaModel *model,
                        double strike,
                        double r,
                        double lambda,
                        int32_t option,
                        double x_ref,
                        struct PaProblem **out);

/**
 * # Safety
 * `problem` must come from `pa_problem_new` and not be used afterwards.
 */
void pa_problem_free(struct PaProblem *problem);

/**
 * Solves for the optimal barriers and keeps them in the handle.
 *
 * # Safety
 * Pointers must be valid; `out` may be null.
 */
PaStatus pa_problem_solve(struct PaProblem *problem, struct PaBarriers *out);

/**
 * V(s) at the solved barriers; `PA_STATUS_NOT_SOLVED` before `pa_problem_solve`.
 *
 * # Safety
 * Pointers must be valid.
 */
PaStatus pa_problem_value(const struct PaProblem *problem, double s, double *out);

/**
 * Value at price s of exercising at the first observation with log-price
 * in [l, u] (puts: l may be -INFINITY; calls: u may be INFINITY).
 *
 * # Safety
 * Pointers must be valid.
 */
PaStatus pa_problem_interval_value(const struct PaProblem *problem,
                                   double s,
                                   double l,
                                   double u,
                                   double *out);

/**
 * Monte Carlo estimate of the interval value at price s on the original
 * dynamics. `tilted` = 1 forces likelihood-ratio sampling at Phi(r),
 * 0 forces plain sampling, -1 chooses automatically.
 *
 * # Safety
 * Pointers must be valid.
 */
PaStatus pa_mc_estimate(const struct PaProblem *problem,
                        double s,
                        double l,
                        double u,
                        uint64_t n_paths,
                        uint64_t seed,
                        uint64_t max_observations,
                        int32_t tilted,
                        struct PaMcEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POISSON_AMERICAN_H */
