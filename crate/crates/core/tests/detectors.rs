use std::collections::VecDeque;

use driftbench::detectors::{
    Adwin, AdwinConfig, Ddm, DdmConfig, Detector, DetectorKind, DetectorSignal, Ibdd, IbddConfig,
};
use driftbench::stream::RngHandle;
use proptest::prelude::*;

/// Steps after the change until ADWIN signals drift on a Bernoulli 0.2 -> 0.8 stream.
fn adwin_delay(seed: u64, delta: f64) -> u64 {
    let mut a = Adwin::with_delta(delta).unwrap();
    let mut r = RngHandle::new(seed);
    for _ in 0..1000 {
        a.update(r.bernoulli(0.2) as u8 as f64).unwrap();
    }
    for t in 1..=2000 {
        if a.update(r.bernoulli(0.8) as u8 as f64).unwrap().0 == DetectorSignal::Drift {
            return t;
        }
    }
    2000
}

#[test]
fn adwin_delay_shrinks_as_delta_grows() {
    let mean = |delta| (0..10).map(|s| adwin_delay(s, delta) as f64).sum::<f64>() / 10.0;
    let delays: Vec<f64> = [0.002, 0.01, 0.1].into_iter().map(mean).collect();
    assert!(
        delays.windows(2).all(|w| w[0] >= w[1]),
        "delays {delays:?}"
    );
}

/// Feeds `values` to ADWIN while keeping every value in a plain queue trimmed to the
/// detector's width; counts and sums must agree exactly.
fn shadow_check(values: &[f64], cfg: AdwinConfig) -> Result<(), TestCaseError> {
    let mut a = Adwin::new(cfg).unwrap();
    let mut shadow: VecDeque<f64> = VecDeque::new();
    for &v in values {
        a.update(v).unwrap();
        shadow.push_back(v);
        while shadow.len() as u64 > a.width() {
            shadow.pop_front();
        }
        let (n, s) = a.bucket_aggregates();
        prop_assert_eq!(n, a.width());
        prop_assert_eq!(shadow.len() as u64, a.width());
        prop_assert_eq!(s, shadow.iter().sum::<f64>());
        prop_assert_eq!(s, a.total());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn adwin_matches_shadow_window(
        p0 in 0.0f64..1.0,
        p1 in 0.0f64..1.0,
        change in 100usize..3000,
        seed in any::<u64>(),
    ) {
        let mut r = RngHandle::new(seed);
        let values: Vec<f64> = (0..4000)
            .map(|t| r.bernoulli(if t < change { p0 } else { p1 }) as u8 as f64)
            .collect();
        shadow_check(&values, AdwinConfig::default())?;
    }

    // Quarter steps keep every partial sum exact in binary floating point.
    #[test]
    fn adwin_matches_shadow_window_on_quarters(
        levels in prop::collection::vec(0u8..=4, 1..1500),
    ) {
        let values: Vec<f64> = levels.iter().map(|&l| l as f64 / 4.0).collect();
        shadow_check(&values, AdwinConfig { delta: 0.1, ..Default::default() })?;
    }

    #[test]
    fn ddm_minimum_never_increases(errors in prop::collection::vec(any::<bool>(), 1..500)) {
        let mut d = Ddm::new(DdmConfig::default());
        let mut last = f64::INFINITY;
        for e in errors {
            let sig = d.update(!e);
            if sig == DetectorSignal::Drift {
                last = f64::INFINITY;
                continue;
            }
            let (p, s) = d.minimum();
            prop_assert!(p + s <= last);
            last = p + s;
        }
    }
}

#[test]
fn ddm_flags_error_rise() {
    let mut detected = 0;
    for seed in 0..20 {
        let mut d = Ddm::new(DdmConfig::default());
        let mut r = RngHandle::new(seed);
        for _ in 0..1000 {
            d.update(!r.bernoulli(0.1));
        }
        if (0..300).any(|_| d.update(!r.bernoulli(0.6)) == DetectorSignal::Drift) {
            detected += 1;
        }
    }
    assert_eq!(detected, 20);
}

#[test]
fn ibdd_quiet_on_constant_features() {
    let mut d = Ibdd::new(3, IbddConfig::default()).unwrap();
    for _ in 0..2000 {
        assert_eq!(d.update(&[1.0, 2.0, 3.0]).unwrap(), DetectorSignal::Stable);
    }
}

#[test]
fn supervised_detectors_ignore_features() {
    for kind in [DetectorKind::Ddm, DetectorKind::Adwin] {
        let mut a = Detector::new(kind, 2, RngHandle::new(0)).unwrap();
        let mut b = Detector::new(kind, 2, RngHandle::new(0)).unwrap();
        let mut r = RngHandle::new(5);
        for t in 0..2000 {
            let correct = r.bernoulli(if t < 1000 { 0.9 } else { 0.3 });
            let sa = a.observe(&[0.0, 0.0], correct).unwrap();
            let sb = b.observe(&[r.normal(0.0, 9.0), 1e6], correct).unwrap();
            assert_eq!(sa, sb);
        }
    }
}

#[test]
fn unsupervised_detectors_check_dimension() {
    for kind in [DetectorKind::D3Linear, DetectorKind::D3Tree, DetectorKind::Ibdd] {
        let mut d = Detector::new(kind, 2, RngHandle::new(0)).unwrap();
        assert!(d.observe(&[0.0], true).is_err(), "{kind:?}");
    }
}
