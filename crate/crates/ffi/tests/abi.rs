use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use driftbench_ffi::*;

fn last_error() -> String {
    let p = db_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn seed_matches_core() {
    let (m, d) = (CString::new("ARF").unwrap(), CString::new("KS").unwrap());
    let mut out = 0u64;
    let s = unsafe { db_derive_seed(42, m.as_ptr(), d.as_ptr(), &mut out) };
    assert_eq!(s, DbStatus::Ok);
    assert_eq!(out, driftbench::stream::derive_seed(42, "ARF", "KS"));
    let s = unsafe { db_derive_seed(42, ptr::null(), d.as_ptr(), &mut out) };
    assert_eq!(s, DbStatus::NullPointer);
    assert!(last_error().contains("model_id"));
}

#[test]
fn kappa_through_abi() {
    let counts = [25u64, 25, 25, 25];
    let mut k = f64::NAN;
    assert_eq!(unsafe { db_cohen_kappa(counts.as_ptr(), 2, &mut k) }, DbStatus::Ok);
    assert_eq!(k, 0.0);
    let counts = [40u64, 10, 20, 30];
    assert_eq!(unsafe { db_cohen_kappa(counts.as_ptr(), 2, &mut k) }, DbStatus::Ok);
    assert!((k - 0.4).abs() < 1e-12);
    let zeros = [0u64; 4];
    assert_eq!(
        unsafe { db_cohen_kappa(zeros.as_ptr(), 2, &mut k) },
        DbStatus::UndefinedMetric
    );
}

#[test]
fn detector_lifecycle() {
    let kind = CString::new("ADWIN").unwrap();
    let mut h: *mut DbDetector = ptr::null_mut();
    assert_eq!(unsafe { db_detector_new(kind.as_ptr(), 1, 7, &mut h) }, DbStatus::Ok);
    let x = [0.0];
    let mut sig = DbSignal::Stable;
    let mut drifted = false;
    for t in 0..3000 {
        let correct = if t < 1000 { t % 10 != 0 } else { t % 10 == 0 };
        assert_eq!(
            unsafe { db_detector_observe(h, x.as_ptr(), 1, correct, &mut sig) },
            DbStatus::Ok
        );
        drifted |= sig == DbSignal::Drift;
    }
    assert!(drifted);
    assert_eq!(
        unsafe { db_detector_observe(h, x.as_ptr(), 2, true, &mut sig) },
        DbStatus::Input
    );
    unsafe { db_detector_free(h) };
    unsafe { db_detector_free(ptr::null_mut()) };

    let bad = CString::new("XYZ").unwrap();
    assert_eq!(unsafe { db_detector_new(bad.as_ptr(), 1, 7, &mut h) }, DbStatus::Config);
}

#[test]
fn learner_lifecycle() {
    let id = CString::new("R-NB").unwrap();
    let mut h: *mut DbLearner = ptr::null_mut();
    assert_eq!(
        unsafe { db_learner_new(id.as_ptr(), 2, 2, 10, 50, false, 1, &mut h) },
        DbStatus::Ok
    );
    let mut pred = 0i64;
    for t in 0..105u64 {
        let y = (t % 2) as usize;
        let x = [y as f64 * 3.0, y as f64 * 3.0];
        let s = unsafe { db_learner_step(h, t, x.as_ptr(), 2, y, &mut pred, ptr::null_mut()) };
        assert_eq!(s, DbStatus::Ok);
        assert!(pred == 0 || pred == 1);
    }
    let mut resets = 0u64;
    assert_eq!(unsafe { db_learner_resets(h, &mut resets) }, DbStatus::Ok);
    assert_eq!(resets, 10);
    let mut class = 9usize;
    let x = [3.0, 3.0];
    assert_eq!(unsafe { db_learner_predict(h, x.as_ptr(), 2, &mut class) }, DbStatus::Ok);
    assert_eq!(class, 1);
    let s = unsafe { db_learner_step(h, 105, x.as_ptr(), 2, 5, &mut pred, ptr::null_mut()) };
    assert_eq!(s, DbStatus::Input);
    unsafe { db_learner_free(h) };

    let warm = CString::new("R-RF").unwrap();
    assert_eq!(
        unsafe { db_learner_new(warm.as_ptr(), 2, 2, 10, 50, true, 1, &mut h) },
        DbStatus::Ok
    );
    let x = [0.0, 0.0];
    let s = unsafe { db_learner_step(h, 0, x.as_ptr(), 2, 0, &mut pred, ptr::null_mut()) };
    assert_eq!(s, DbStatus::Ok);
    assert_eq!(pred, -1);
    unsafe { db_learner_free(h) };
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/driftbench.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in ["db_derive_seed", "db_detector_new", "db_learner_step", "DB_STATUS_OK"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        format!("#include \"{header}\"\nint main(void) {{ DbDetector *d = 0; return db_detector_new(\"DDM\", 1, 0, &d) == DB_STATUS_OK ? 0 : 1; }}\n"),
    )
    .unwrap();
    match Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg(&src).output() {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(e) => eprintln!("no C compiler available ({e}); syntax check not run"),
    }
}
