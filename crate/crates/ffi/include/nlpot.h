#ifndef NLPOT_H
#define NLPOT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NlpotStatus {
  NLPOT_STATUS_OK = 0,
  NLPOT_STATUS_NULL_POINTER = 1,
  NLPOT_STATUS_INVALID_UTF8 = 2,
  NLPOT_STATUS_SPEC_ERROR = 3,
  NLPOT_STATUS_DOMAIN_ERROR = 4,
  NLPOT_STATUS_INVALID_INPUT = 5,
  NLPOT_STATUS_UNSUPPORTED_ASYMPTOTICS = 6,
  NLPOT_STATUS_QUADRATURE_FAILURE = 7,
  NLPOT_STATUS_SOLVER_DIVERGENCE = 8,
  NLPOT_STATUS_PANIC = 9,
} NlpotStatus;

typedef enum NlpotCapacityMethod {
  NLPOT_CAPACITY_METHOD_INTEGRAL_ESTIMATE = 0,
  NLPOT_CAPACITY_METHOD_EXACT_RADIAL = 1,
  NLPOT_CAPACITY_METHOD_DYADIC_UPPER = 2,
  NLPOT_CAPACITY_METHOD_VARIATIONAL = 3,
} NlpotCapacityMethod;

typedef enum NlpotQuestion {
  NLPOT_QUESTION_SINGLETON_ZERO = 0,
  NLPOT_QUESTION_IS_PARABOLIC = 1,
  NLPOT_QUESTION_GREEN_BOUNDED = 2,
  NLPOT_QUESTION_GREEN_IN_LTAU = 3,
  NLPOT_QUESTION_GRADIENT_IN_LT = 4,
} NlpotQuestion;

typedef enum NlpotVerdictState {
  NLPOT_VERDICT_STATE_MEMBER = 0,
  NLPOT_VERDICT_STATE_NON_MEMBER = 1,
  NLPOT_VERDICT_STATE_BORDERLINE_IN = 2,
  NLPOT_VERDICT_STATE_BORDERLINE_OUT = 3,
  NLPOT_VERDICT_STATE_INCONCLUSIVE = 4,
} NlpotVerdictState;

/**
 * Opaque model handle.
 */
typedef struct NlpotModel NlpotModel;

typedef struct NlpotCapacityResult {
  double value;
  double abs_error_estimate;
  /**
   * False when the estimate was used outside its comparability range.
   */
  bool hypothesis_ok;
} NlpotCapacityResult;

typedef struct NlpotExponents {
  double ls0;
  double us0;
  double lq0;
  double uq0;
} NlpotExponents;

typedef struct NlpotCriticalExponents {
  /**
   * `INFINITY` at `p = us0`, `NAN` when `p > us0`.
   */
  double tau_p;
  double t_p;
  double q_hat;
} NlpotCriticalExponents;

typedef struct NlpotVerdict {
  enum NlpotVerdictState state;
  /**
   * `NAN` when the question has no critical exponent.
   */
  double critical_exponent;
} NlpotVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next `nlpot_*` call on the same thread.
 */
const char *nlpot_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nlpot_version(void);

/**
 * Parses a JSON model spec such as `{"kind":"log","n":3,"s":3,"beta":1}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NlpotStatus nlpot_model_from_json(const char *json, struct NlpotModel **out);

/**
 * Releases a model; null is ignored.
 *
 * # Safety
 * `model` must come from [`nlpot_model_from_json`] and not be used again.
 */
void nlpot_model_free(struct NlpotModel *model);

/**
 * Volume growth `μ(B_ρ)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum NlpotStatus nlpot_model_growth(const struct NlpotModel *model, double rho, double *out);

/**
 * Capacity of the annulus `r < |x| < big_r`. The exact and variational
 * methods need a radial weight model; the variational grid has `grid` nodes.
 *
 * # Safety
 * Pointers must be valid.
 */
enum NlpotStatus nlpot_capacity(const struct NlpotModel *model,
                                enum NlpotCapacityMethod method,
                                double p,
                                double r,
                                double big_r,
                                size_t grid,
                                struct NlpotCapacityResult *out);

/**
 * Pointwise exponent endpoints at the origin.
 *
 * # Safety
 * Pointers must be valid.
 */
enum NlpotStatus nlpot_exponents(const struct NlpotModel *model, struct NlpotExponents *out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum NlpotStatus nlpot_critical_exponents(const struct NlpotModel *model,
                                          double p,
                                          struct NlpotCriticalExponents *out);

/**
 * Radial Green profile `u(ρ)` on the unit ball; `normalized` scales it so
 * that `{u ≥ b}` has capacity `b^{1-p}`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum NlpotStatus nlpot_green_value(const struct NlpotModel *model,
                                   double p,
                                   double rho,
                                   bool normalized,
                                   double *out);

/**
 * `|∇u|(ρ)` for the unnormalized profile.
 *
 * # Safety
 * Pointers must be valid.
 */
enum NlpotStatus nlpot_green_gradient(const struct NlpotModel *model,
                                      double p,
                                      double rho,
                                      double *out);

/**
 * Answers one classification question. `exponent` is τ or t for the
 * integrability questions (`INFINITY` allowed for τ) and `NAN` otherwise.
 * The two arrays list declared Poincaré exponents at the origin and for
 * large radii; either may be null when its length is 0.
 *
 * # Safety
 * Pointers must be valid and the arrays must hold the stated lengths.
 */
enum NlpotStatus nlpot_classify(const struct NlpotModel *model,
                                enum NlpotQuestion question,
                                double p,
                                double exponent,
                                const double *poincare,
                                size_t poincare_len,
                                const double *poincare_large,
                                size_t poincare_large_len,
                                struct NlpotVerdict *out);

/**
 * Same as [`nlpot_classify`] but returns the full verdict (basis and
 * hypotheses used) as JSON. Free the string with [`nlpot_string_free`].
 *
 * # Safety
 * See [`nlpot_classify`].
 */
enum NlpotStatus nlpot_classify_json(const struct NlpotModel *model,
                                     enum NlpotQuestion question,
                                     double p,
                                     double exponent,
                                     const double *poincare,
                                     size_t poincare_len,
                                     const double *poincare_large,
                                     size_t poincare_large_len,
                                     char **out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used again.
 */
void nlpot_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NLPOT_H */
