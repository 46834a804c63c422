//! Feature vectors of three fixed windows against values produced by the
//! numpy/scipy reference in `oracles/features_oracle.py`.

use behavior_filter::features::{feature_names, time_features, FeatureExtractor};
use proptest::prelude::*;

mod common;

use common::golden::*;

#[test]
fn zeros_window() {
    assert_close(&features(&zeros()), &ZEROS);
    assert!(ZEROS.iter().all(|v| *v == 0.0));
}

#[test]
fn constant_window() {
    assert_close(&features(&constant()), &CONSTANT);
}

#[test]
fn noisy_window() {
    assert_close(&features(&noisy()), &NOISY);
}

#[test]
fn names_are_stable_and_unique() {
    let names = feature_names();
    assert_eq!(names.len(), 104);
    assert_eq!(names[0], "ax_min");
    assert_eq!(names[60], "ax_spec_entropy");
    assert_eq!(names[90], "sma_accel");
    assert_eq!(names[103], "mag_mean_all");
    let mut u = names.clone();
    u.sort();
    u.dedup();
    assert_eq!(u.len(), 104);
}

#[test]
fn bin_centred_sine() {
    // 100 samples at 50 Hz put 5 Hz exactly on bin 10
    let n = 100;
    let ex = FeatureExtractor::new(n, FS).unwrap();
    let x: Vec<f64> = (0..n).map(|i| (2.0 * std::f64::consts::PI * 5.0 * i as f64 / FS).sin()).collect();
    let spec = ex.spectral_features(&x);
    assert!((spec[3] - 5.0).abs() <= FS / n as f64);
    assert!(spec[0] < 0.35, "entropy {}", spec[0]);
}

#[test]
fn short_window_rejected() {
    assert!(FeatureExtractor::new(7, FS).is_err());
}

fn window() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-20.0..20.0f64, N), 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn time_features_ignore_order(x in prop::collection::vec(-20.0..20.0f64, 8..120), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut y = x.clone();
        y.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = time_features(&x);
        let b = time_features(&y);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0));
        }
    }

    #[test]
    fn offset_moves_location_only(w in window(), c in -50.0..50.0f64) {
        let shifted: Vec<Vec<f64>> = w.iter().map(|ch| ch.iter().map(|v| v + c).collect()).collect();
        let a = features(&w);
        let b = features(&shifted);
        for ch in 0..6 {
            let t = ch * 10;
            // min, max, mean, median, p25, p75 move by c
            for k in [0, 1, 2, 3, 5, 6] {
                prop_assert!((b[t + k] - a[t + k] - c).abs() < 1e-9);
            }
            // variance, skew, kurtosis fixed
            for k in [4, 8, 9] {
                prop_assert!((b[t + k] - a[t + k]).abs() < 1e-9 * a[t + k].abs().max(1.0));
            }
            for k in 0..5 {
                let s = 60 + ch * 5 + k;
                prop_assert!((b[s] - a[s]).abs() < 1e-9 * a[s].abs().max(1.0));
            }
        }
    }
}

#[test]
fn spectral_features_depend_on_order() {
    let w = noisy();
    let mut rev = w.clone();
    rev[0].sort_by(f64::total_cmp);
    let a = features(&w);
    let b = features(&rev);
    for k in 0..10 {
        assert!((a[k] - b[k]).abs() < 1e-9);
    }
    assert!((a[60] - b[60]).abs() > 1e-3);
}
