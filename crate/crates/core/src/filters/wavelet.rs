//! Multi-level orthogonal DWT with symmetric boundary extension and
//! soft-threshold denoising of the detail coefficients.
//!
//! Each level keeps every coefficient whose filter support touches the
//! signal, i.e. `(n + L - 1) / 2` coefficients for a length-`n` input and
//! filter length `L`, so reconstruction is exact for any boundary extension.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::median;

/// Divisor turning the median absolute detail coefficient into a noise sigma.
pub const MAD_GAUSSIAN: f64 = 0.6745;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletFamily {
    Haar,
    Db2,
    Db4,
}

const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
const DB2: [f64; 4] = [
    0.482_962_913_144_534_1,
    0.836_516_303_737_807_7,
    0.224_143_868_042_013_4,
    -0.129_409_522_551_260_34,
];
const DB4: [f64; 8] = [
    0.230_377_813_308_896_5,
    0.714_846_570_552_915_7,
    0.630_880_767_929_858_9,
    -0.027_983_769_416_859_9,
    -0.187_034_811_719_093_1,
    0.030_841_381_835_560_7,
    0.032_883_011_666_885_2,
    -0.010_597_401_785_069,
];

impl WaveletFamily {
    /// Orthonormal scaling filter.
    pub fn scaling(self) -> &'static [f64] {
        match self {
            WaveletFamily::Haar => &HAAR,
            WaveletFamily::Db2 => &DB2,
            WaveletFamily::Db4 => &DB4,
        }
    }

    /// Quadrature mirror of the scaling filter: `g[k] = (-1)^k h[L-1-k]`.
    pub fn wavelet(self) -> Vec<f64> {
        let h = self.scaling();
        let l = h.len();
        (0..l)
            .map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] })
            .collect()
    }

    pub fn filter_len(self) -> usize {
        self.scaling().len()
    }
}

impl fmt::Display for WaveletFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WaveletFamily::Haar => "haar",
            WaveletFamily::Db2 => "db2",
            WaveletFamily::Db4 => "db4",
        })
    }
}

impl FromStr for WaveletFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(WaveletFamily::Haar),
            "db2" => Ok(WaveletFamily::Db2),
            "db4" => Ok(WaveletFamily::Db4),
            other => Err(Error::InvalidParameter(format!("unknown wavelet family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Threshold {
    /// `sigma * sqrt(2 ln N)` with sigma from the finest details.
    Universal,
    Explicit(f64),
}

/// Half-sample symmetric reflection of index `i` into `[0, n)`.
pub(crate) fn symmetric_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

/// Largest level at which the coarsest approximation still has at least
/// `L - 1` samples of support.
pub fn max_level(n: usize, family: WaveletFamily) -> usize {
    let l = family.filter_len();
    if n < l - 1 {
        return 0;
    }
    ((n as f64) / ((l - 1) as f64)).log2().floor() as usize
}

fn first_index(l: usize) -> isize {
    // smallest i with 2i + l - 1 >= 0
    -(((l - 1) / 2) as isize)
}

/// One analysis step: (approximation, details), each of length `(n + L - 1) / 2`.
pub fn dwt_step(x: &[f64], family: WaveletFamily) -> (Vec<f64>, Vec<f64>) {
    let h = family.scaling();
    let g = family.wavelet();
    let n = x.len();
    let l = h.len();
    let i0 = first_index(l);
    let count = (n + l - 1) / 2;
    let mut approx = Vec::with_capacity(count);
    let mut detail = Vec::with_capacity(count);
    for j in 0..count {
        let start = 2 * (i0 + j as isize);
        let (mut a, mut d) = (0.0, 0.0);
        for k in 0..l {
            let v = x[symmetric_index(start + k as isize, n)];
            a += h[k] * v;
            d += g[k] * v;
        }
        approx.push(a);
        detail.push(d);
    }
    (approx, detail)
}

/// Inverse of [`dwt_step`], producing `out_len` samples.
pub fn idwt_step(approx: &[f64], detail: &[f64], family: WaveletFamily, out_len: usize) -> Vec<f64> {
    let h = family.scaling();
    let g = family.wavelet();
    let l = h.len();
    let i0 = first_index(l);
    let mut out = vec![0.0; out_len];
    for (j, (&a, &d)) in approx.iter().zip(detail).enumerate() {
        let start = 2 * (i0 + j as isize);
        for k in 0..l {
            let pos = start + k as isize;
            if pos >= 0 && (pos as usize) < out_len {
                out[pos as usize] += a * h[k] + d * g[k];
            }
        }
    }
    out
}

/// Multi-level decomposition: `[cA_level, cD_level, ..., cD_1]` plus the
/// input length of every level (finest first).
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub approx: Vec<f64>,
    /// `details[0]` is the finest level.
    pub details: Vec<Vec<f64>>,
    lengths: Vec<usize>,
    family: WaveletFamily,
}

impl Decomposition {
    pub fn level(&self) -> usize {
        self.details.len()
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        let mut a = self.approx.clone();
        for lvl in (0..self.details.len()).rev() {
            a = idwt_step(&a, &self.details[lvl], self.family, self.lengths[lvl]);
        }
        a
    }
}

pub fn wavedec(x: &[f64], family: WaveletFamily, level: usize) -> Decomposition {
    let mut a = x.to_vec();
    let mut details = Vec::with_capacity(level);
    let mut lengths = Vec::with_capacity(level);
    for _ in 0..level {
        lengths.push(a.len());
        let (na, nd) = dwt_step(&a, family);
        details.push(nd);
        a = na;
    }
    Decomposition {
        approx: a,
        details,
        lengths,
        family,
    }
}

/// Robust noise estimate from the finest detail coefficients.
pub fn noise_sigma(x: &[f64], family: WaveletFamily) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let (_, d1) = dwt_step(x, family);
    let abs: Vec<f64> = d1.iter().map(|v| v.abs()).collect();
    median(&abs) / MAD_GAUSSIAN
}

pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Soft-threshold wavelet denoising. `level` is clamped to `[1, max_level]`.
pub fn wavelet_denoise(
    x: &[f64],
    family: WaveletFamily,
    level: usize,
    threshold: Threshold,
) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: n });
    }
    let level = level.min(max_level(n, family)).max(1);
    let mut dec = wavedec(x, family, level);
    let t = match threshold {
        Threshold::Universal => {
            let abs: Vec<f64> = dec.details[0].iter().map(|v| v.abs()).collect();
            let sigma = median(&abs) / MAD_GAUSSIAN;
            sigma * (2.0 * (n as f64).ln()).sqrt()
        }
        Threshold::Explicit(t) => {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "wavelet threshold must be >= 0, got {t}"
                )));
            }
            t
        }
    };
    if t > 0.0 {
        for d in &mut dec.details {
            for v in d.iter_mut() {
                *v = soft_threshold(*v, t);
            }
        }
    }
    Ok(dec.reconstruct())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt().max(1e-300);
        num / den
    }

    #[test]
    fn filters_are_orthonormal() {
        for fam in [WaveletFamily::Haar, WaveletFamily::Db2, WaveletFamily::Db4] {
            let h = fam.scaling();
            let g = fam.wavelet();
            for m in 0..h.len() / 2 {
                let hh: f64 = (0..h.len() - 2 * m).map(|k| h[k] * h[k + 2 * m]).sum();
                let hg: f64 = (0..h.len() - 2 * m).map(|k| h[k] * g[k + 2 * m]).sum();
                let expected = if m == 0 { 1.0 } else { 0.0 };
                assert!((hh - expected).abs() < 1e-12, "{fam} hh shift {m}: {hh}");
                assert!(hg.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn perfect_reconstruction_various_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2usize, 3, 5, 7, 8, 13, 16, 75, 101, 256] {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            for fam in [WaveletFamily::Haar, WaveletFamily::Db2, WaveletFamily::Db4] {
                for level in 1..=4 {
                    let dec = wavedec(&x, fam, level);
                    assert!(rel_err(&dec.reconstruct(), &x) < 1e-12, "n={n} {fam} L{level}");
                }
                let y = wavelet_denoise(&x, fam, 4, Threshold::Explicit(0.0)).unwrap();
                assert!(rel_err(&y, &x) < 1e-9);
            }
        }
    }

    #[test]
    fn coefficient_counts() {
        let dec = wavedec(&vec![0.0; 75], WaveletFamily::Db4, 3);
        assert_eq!(dec.details[0].len(), 41);
        assert_eq!(dec.details[1].len(), 24);
        assert_eq!(dec.details[2].len(), 15);
        assert_eq!(max_level(75, WaveletFamily::Db4), 3);
        assert_eq!(max_level(1024, WaveletFamily::Db4), 7);
    }

    #[test]
    fn constant_is_fixed_point() {
        let x = vec![3.7; 64];
        let y = wavelet_denoise(&x, WaveletFamily::Db4, 4, Threshold::Universal).unwrap();
        assert!(rel_err(&y, &x) < 1e-9);
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            wavelet_denoise(&[1.0], WaveletFamily::Db4, 1, Threshold::Universal),
            Err(Error::SeriesTooShort { .. })
        ));
    }
}
