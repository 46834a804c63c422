//! Fixed windows and their reference feature vectors, produced by
//! `oracles/features_oracle.py` (numpy/scipy).

use behavior_filter::features::{extract_features, feature_names, FEATURE_COUNT};

pub const FS: f64 = 50.0;
pub const N: usize = 75;

pub fn zeros() -> Vec<Vec<f64>> {
    vec![vec![0.0; N]; 6]
}

pub fn constant() -> Vec<Vec<f64>> {
    [1.5, -2.0, 9.81, 0.25, 0.0, -0.75].iter().map(|&c| vec![c; N]).collect()
}

pub fn noisy() -> Vec<Vec<f64>> {
    let freqs = [1.0, 2.0, 3.0, 5.0, 7.0, 11.0];
    (0..6)
        .map(|c| {
            (0..N)
                .map(|i| {
                    let i = i as f64;
                    let cf = c as f64;
                    (cf + 1.0) * (2.0 * std::f64::consts::PI * freqs[c] * i / FS + 0.3 * cf).sin()
                        + 0.2 * (0.37 * i * i + cf).sin()
                        + 0.1 * cf
                })
                .collect()
        })
        .collect()
}

pub fn features(w: &[Vec<f64>]) -> Vec<f64> {
    let s: [&[f64]; 6] = std::array::from_fn(|c| w[c].as_slice());
    extract_features(&s, FS).unwrap()
}

pub fn assert_close(got: &[f64], want: &[f64]) {
    let names = feature_names();
    assert_eq!(got.len(), FEATURE_COUNT);
    for (j, (g, w)) in got.iter().zip(want).enumerate() {
        let tol = 1e-9 * w.abs().max(1.0);
        assert!((g - w).abs() <= tol, "{}: got {g}, want {w}", names[j]);
    }
}

/// Largest of `|got - want| / max(|want|, 1)` over all entries.
pub fn max_rel_err(got: &[f64], want: &[f64]) -> f64 {
    got.iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs() / w.abs().max(1.0))
        .fold(0.0, f64::max)
}

pub const ZEROS: [f64; 104] = [
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
];
pub const CONSTANT: [f64; 104] = [
    1.5,
    1.5,
    1.5,
    1.5,
    0.0,
    1.5,
    1.5,
    1.5,
    0.0,
    0.0,
    -2.0,
    -2.0,
    -2.0,
    -2.0,
    0.0,
    -2.0,
    -2.0,
    2.0,
    0.0,
    0.0,
    9.81,
    9.81,
    9.809999999999999,
    9.81,
    3.1554436208840472e-30,
    9.81,
    9.81,
    9.81,
    0.0,
    0.0,
    0.25,
    0.25,
    0.25,
    0.25,
    0.0,
    0.25,
    0.25,
    0.25,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.75,
    -0.75,
    -0.75,
    -0.75,
    0.0,
    -0.75,
    -0.75,
    0.75,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    13.309999999999999,
    1.0,
    112.5,
    150.0,
    735.7499999999999,
    18.75,
    0.0,
    56.25,
    10.123541870313966,
    0.7905694150420947,
    102.4861,
    0.625,
    14.309999999999997,
    10.154363594041724,
];
pub const NOISY: [f64; 104] = [
    -1.1319337562799028,
    1.1734456152210069,
    0.23368269889463367,
    0.4115189178702803,
    0.4698381918592487,
    -0.36148062315888535,
    0.8514377723775015,
    0.7241862989741858,
    -0.4662283303072492,
    -1.12279318469548,
    -1.9256128016942524,
    2.292434848211903,
    0.13470522291174292,
    0.13834047154584989,
    2.02987639599199,
    -1.3570365149191077,
    1.6483503465222595,
    1.4310911547038827,
    -0.0033912055295190237,
    -1.5359688733193242,
    -2.7578784899014805,
    3.094921390348024,
    0.4113953209313021,
    0.6708219564349371,
    4.3184834578947155,
    -1.5256335767472105,
    2.64407718041095,
    2.118426200739333,
    -0.14600919049238784,
    -1.4677646069177885,
    -3.888294448187862,
    4.472559367339792,
    0.42612169884115075,
    1.204566400645317,
    7.94211800670518,
    -2.759309949942729,
    3.43900982831866,
    2.850210116627974,
    -0.08049039317137734,
    -1.4875151437511898,
    -4.764200157611109,
    5.5693485302522,
    0.4786108468413268,
    0.6392064856909774,
    12.463398356825957,
    -2.8546326028325484,
    4.152505837193604,
    3.5626488319142724,
    -0.05127381197293993,
    -1.4745711159811945,
    -5.635961406370523,
    6.516357767284665,
    0.5666571271231443,
    0.3732874822135268,
    17.97774677392407,
    -3.459291816876453,
    4.652339597884781,
    4.277715169765693,
    -0.024204166512402463,
    -1.4986639634172023,
    0.257834072642199,
    1.2855551461451271,
    8.693772046891239,
    0.6666666666666666,
    2.321498645568152,
    0.26651575266474337,
    2.1445490659473605,
    27.861921840764037,
    2.0,
    1.5920999753437106,
    0.2541551950259348,
    3.028505344669748,
    60.412488461523076,
    2.6666666666666665,
    0.7682854078685213,
    0.25032776822262376,
    5.009424707962456,
    110.35869452686345,
    4.666666666666666,
    0.6140738682659781,
    0.24782371079350957,
    7.0139217569993315,
    173.24482173562453,
    7.333333333333333,
    0.6075241579271735,
    0.2474353529136835,
    11.003974952548525,
    253.12720634277161,
    11.333333333333332,
    0.45969309051423013,
    3.850545668181015,
    9.619001810949662,
    48.9287664471772,
    97.47082017401823,
    142.39133849238073,
    194.24921503200719,
    240.0565034841331,
    287.1194173050845,
    2.5339252106390617,
    6.056499401146283,
    7.060197256672504,
    39.11501148211211,
    13.46954747913068,
    6.626036874111495,
];
