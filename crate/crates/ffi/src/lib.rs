//! C ABI over the drift detectors, the adaptive learners, seed derivation and kappa.
//!
//! Every function returns a [`DbStatus`]; on failure the message is kept per thread
//! and read with [`db_last_error`]. Handles are opaque and must be released with the
//! matching `_free` function. A handle may be used from any thread, but not from two
//! at once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use driftbench::adaptation::{AdaptiveConfig, AdaptiveModel, StartMode};
use driftbench::detectors::{Detector, DetectorKind, DetectorSignal};
use driftbench::evaluation::{cohen_kappa, ConfusionMatrix};
use driftbench::stream::{derive_seed, Instance, RngHandle, StreamSchema};
use driftbench::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Input = 3,
    Config = 4,
    Training = 5,
    Protocol = 6,
    UndefinedMetric = 7,
    Other = 8,
    Panic = 9,
}

/// Detector output, ordered by severity.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbSignal {
    Stable = 0,
    Warning = 1,
    Drift = 2,
}

impl From<DetectorSignal> for DbSignal {
    fn from(s: DetectorSignal) -> Self {
        match s {
            DetectorSignal::Stable => DbSignal::Stable,
            DetectorSignal::Warning => DbSignal::Warning,
            DetectorSignal::Drift => DbSignal::Drift,
        }
    }
}

/// Opaque drift detector.
pub struct DbDetector {
    inner: Detector,
    n_features: usize,
}

/// Opaque technique: a learner wrapped in its adaptation strategy.
pub struct DbLearner {
    inner: AdaptiveModel,
    n_features: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DbStatus {
    match e {
        Error::Input(_) => DbStatus::Input,
        Error::Config(_) => DbStatus::Config,
        Error::Training(_) => DbStatus::Training,
        Error::Protocol(_) => DbStatus::Protocol,
        Error::UndefinedMetric(_) => DbStatus::UndefinedMetric,
        _ => DbStatus::Other,
    }
}

struct Fail(DbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(DbStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DbStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DbStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(DbStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn db_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Seed for one (model, dataset) cell, as used by the benchmark runner.
///
/// # Safety
/// `model_id` and `dataset_id` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn db_derive_seed(
    master_seed: u64,
    model_id: *const c_char,
    dataset_id: *const c_char,
    out: *mut u64,
) -> DbStatus {
    guard(|| {
        let m = str_arg(model_id, "model_id")?;
        let d = str_arg(dataset_id, "dataset_id")?;
        if m.is_empty() || d.is_empty() {
            return Err(Fail(DbStatus::Input, "ids must be non-empty".into()));
        }
        *out_arg(out, "out")? = derive_seed(master_seed, m, d);
        Ok(())
    })
}

/// Cohen's kappa of a row-major `n_classes x n_classes` confusion matrix (rows are
/// actual classes).
///
/// # Safety
/// `counts` must point to `n_classes * n_classes` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn db_cohen_kappa(
    counts: *const u64,
    n_classes: usize,
    out: *mut f64,
) -> DbStatus {
    guard(|| {
        let len = n_classes
            .checked_mul(n_classes)
            .ok_or_else(|| Fail(DbStatus::Input, "n_classes too large".into()))?;
        let counts = slice_arg(counts, len, "counts")?;
        let m = ConfusionMatrix::from_counts(counts)?;
        *out_arg(out, "out")? = cohen_kappa(&m)?;
        Ok(())
    })
}

/// Creates a detector: `kind` is one of `DDM`, `ADWIN`, `D3-LR`, `D3-HT`, `IBDD`.
///
/// # Safety
/// `kind` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn db_detector_new(
    kind: *const c_char,
    n_features: usize,
    seed: u64,
    out: *mut *mut DbDetector,
) -> DbStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let kind: DetectorKind = str_arg(kind, "kind")?.parse()?;
        if n_features == 0 {
            return Err(Fail(DbStatus::Input, "n_features must be at least 1".into()));
        }
        let inner = Detector::new(kind, n_features, RngHandle::new(seed))?;
        *out = Box::into_raw(Box::new(DbDetector { inner, n_features }));
        Ok(())
    })
}

/// Feeds one observation. Supervised detectors read `correct`; unsupervised ones
/// read the `n_features` values at `x`.
///
/// # Safety
/// `handle` must come from `db_detector_new`; `x` must point to `n_features` values.
#[no_mangle]
pub unsafe extern "C" fn db_detector_observe(
    handle: *mut DbDetector,
    x: *const f64,
    n_features: usize,
    correct: bool,
    out: *mut DbSignal,
) -> DbStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        if n_features != h.n_features {
            return Err(Fail(
                DbStatus::Input,
                format!("expected {} features, got {n_features}", h.n_features),
            ));
        }
        let x = slice_arg(x, n_features, "x")?;
        *out_arg(out, "out")? = h.inner.observe(x, correct)?.into();
        Ok(())
    })
}

/// # Safety
/// `handle` must come from `db_detector_new` and not be used afterwards. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn db_detector_free(handle: *mut DbDetector) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Creates a technique by id (`NB`, `DDM-HT`, `R-NB`, `ARF`, `I-RF`, ...). `reset_n`
/// and `retrain_n` set the periodic-reset and batch-retraining periods; `warm_start`
/// selects the batch start mode.
///
/// # Safety
/// `technique` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn db_learner_new(
    technique: *const c_char,
    n_features: usize,
    n_classes: usize,
    reset_n: usize,
    retrain_n: usize,
    warm_start: bool,
    seed: u64,
    out: *mut *mut DbLearner,
) -> DbStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let id = str_arg(technique, "technique")?;
        let start = if warm_start { StartMode::Warm } else { StartMode::Cold };
        let cfg = AdaptiveConfig::from_technique(id, reset_n, retrain_n, start)?;
        let schema = StreamSchema::anonymous(n_features, n_classes)?;
        let inner = AdaptiveModel::new(cfg, &schema, RngHandle::new(seed))?;
        *out = Box::into_raw(Box::new(DbLearner { inner, n_features }));
        Ok(())
    })
}

/// One test-then-train step on a labeled instance. `out_prediction` receives the
/// predicted class, or -1 when the technique consumed the instance without predicting.
/// `out_signal` may be null; otherwise it receives the detector's signal for this step
/// (Stable for techniques without a detector).
///
/// # Safety
/// `handle` must come from `db_learner_new`; `x` must point to `n_features` values.
#[no_mangle]
pub unsafe extern "C" fn db_learner_step(
    handle: *mut DbLearner,
    t: u64,
    x: *const f64,
    n_features: usize,
    y: usize,
    out_prediction: *mut i64,
    out_signal: *mut DbSignal,
) -> DbStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        if n_features != h.n_features {
            return Err(Fail(
                DbStatus::Input,
                format!("expected {} features, got {n_features}", h.n_features),
            ));
        }
        let x = slice_arg(x, n_features, "x")?;
        let outcome = h.inner.step(&Instance::labeled(t, x.to_vec(), y))?;
        *out_arg(out_prediction, "out_prediction")? =
            outcome.prediction.map_or(-1, |p| p.class as i64);
        if let Some(s) = out_signal.as_mut() {
            *s = outcome.signal.map_or(DbSignal::Stable, Into::into);
        }
        Ok(())
    })
}

/// Predicts without learning.
///
/// # Safety
/// `handle` must come from `db_learner_new`; `x` must point to `n_features` values.
#[no_mangle]
pub unsafe extern "C" fn db_learner_predict(
    handle: *const DbLearner,
    x: *const f64,
    n_features: usize,
    out_class: *mut usize,
) -> DbStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if n_features != h.n_features {
            return Err(Fail(
                DbStatus::Input,
                format!("expected {} features, got {n_features}", h.n_features),
            ));
        }
        let x = slice_arg(x, n_features, "x")?;
        *out_arg(out_class, "out_class")? = h.inner.predict(x)?.class;
        Ok(())
    })
}

/// Number of resets (detector- or period-triggered) so far.
///
/// # Safety
/// `handle` must come from `db_learner_new`.
#[no_mangle]
pub unsafe extern "C" fn db_learner_resets(handle: *const DbLearner, out: *mut u64) -> DbStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        *out_arg(out, "out")? = h.inner.n_resets();
        Ok(())
    })
}

/// # Safety
/// `handle` must come from `db_learner_new` and not be used afterwards. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn db_learner_free(handle: *mut DbLearner) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}
