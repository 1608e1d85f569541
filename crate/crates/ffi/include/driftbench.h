#ifndef DRIFTBENCH_H
#define DRIFTBENCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Detector output, ordered by severity.
 */
typedef enum DbSignal {
  DB_SIGNAL_STABLE = 0,
  DB_SIGNAL_WARNING = 1,
  DB_SIGNAL_DRIFT = 2,
} DbSignal;

typedef enum DbStatus {
  DB_STATUS_OK = 0,
  DB_STATUS_NULL_POINTER = 1,
  DB_STATUS_INVALID_UTF8 = 2,
  DB_STATUS_INPUT = 3,
  DB_STATUS_CONFIG = 4,
  DB_STATUS_TRAINING = 5,
  DB_STATUS_PROTOCOL = 6,
  DB_STATUS_UNDEFINED_METRIC = 7,
  DB_STATUS_OTHER = 8,
  DB_STATUS_PANIC = 9,
} DbStatus;

/**
 * Opaque drift detector.
 */
typedef struct DbDetector DbDetector;

/**
 * Opaque technique: a learner wrapped in its adaptation strategy.
 */
typedef struct DbLearner DbLearner;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *db_last_error(void);

/**
 * Seed for one (model, dataset) cell, as used by the benchmark runner.
 *
 * # Safety
 * `model_id` and `dataset_id` must be NUL-terminated strings; `out` must be writable.
 */
enum DbStatus db_derive_seed(uint64_t master_seed,
                             const char *model_id,
                             const char *dataset_id,
                             uint64_t *out);

/**
 * Cohen's kappa of a row-major `n_classes x n_classes` confusion matrix (rows are
 * actual classes).
 *
 * # Safety
 * `counts` must point to `n_classes * n_classes` values; `out` must be writable.
 */
enum DbStatus db_cohen_kappa(const uint64_t *counts, uintptr_t n_classes, double *out);

/**
 * Creates a detector: `kind` is one of `DDM`, `ADWIN`, `D3-LR`, `D3-HT`, `IBDD`.
 *
 * # Safety
 * `kind` must be a NUL-terminated string; `out` must be writable.
 */
enum DbStatus db_detector_new(const char *kind,
                              uintptr_t n_features,
                              uint64_t seed,
                              struct DbDetector **out);

/**
 * Feeds one observation. Supervised detectors read `correct`; unsupervised ones
 * read the `n_features` values at `x`.
 *
 * # Safety
 * `handle` must come from `db_detector_new`; `x` must point to `n_features` values.
 */
enum DbStatus db_detector_observe(struct DbDetector *handle,
                                  const double *x,
                                  uintptr_t n_features,
                                  bool correct,
                                  enum DbSignal *out);

/**
 * # Safety
 * `handle` must come from `db_detector_new` and not be used afterwards. Null is a no-op.
 */
void db_detector_free(struct DbDetector *handle);

/**
 * Creates a technique by id (`NB`, `DDM-HT`, `R-NB`, `ARF`, `I-RF`, ...). `reset_n`
 * and `retrain_n` set the periodic-reset and batch-retraining periods; `warm_start`
 * selects the batch start mode.
 *
 * # Safety
 * `technique` must be a NUL-terminated string; `out` must be writable.
 */
enum DbStatus db_learner_new(const char *technique,
                             uintptr_t n_features,
                             uintptr_t n_classes,
                             uintptr_t reset_n,
                             uintptr_t retrain_n,
                             bool warm_start,
                             uint64_t seed,
                             struct DbLearner **out);

/**
 * One test-then-train step on a labeled instance. `out_prediction` receives the
 * predicted class, or -1 when the technique consumed the instance without predicting.
 * `out_signal` may be null; otherwise it receives the detector's signal for this step
 * (Stable for techniques without a detector).
 *
 * # Safety
 * `handle` must come from `db_learner_new`; `x` must point to `n_features` values.
 */
enum DbStatus db_learner_step(struct DbLearner *handle,
                              uint64_t t,
                              const double *x,
                              uintptr_t n_features,
                              uintptr_t y,
                              int64_t *out_prediction,
                              enum DbSignal *out_signal);

/**
 * Predicts without learning.
 *
 * # Safety
 * `handle` must come from `db_learner_new`; `x` must point to `n_features` values.
 */
enum DbStatus db_learner_predict(const struct DbLearner *handle,
                                 const double *x,
                                 uintptr_t n_features,
                                 uintptr_t *out_class);

/**
 * Number of resets (detector- or period-triggered) so far.
 *
 * # Safety
 * `handle` must come from `db_learner_new`.
 */
enum DbStatus db_learner_resets(const struct DbLearner *handle, uint64_t *out);

/**
 * # Safety
 * `handle` must come from `db_learner_new` and not be used afterwards. Null is a no-op.
 */
void db_learner_free(struct DbLearner *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRIFTBENCH_H */
