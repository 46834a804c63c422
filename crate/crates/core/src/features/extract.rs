//! The 104-value feature vector of one six-channel window.
//!
//! Layout: 10 time-domain statistics for each channel (channel-major), then
//! 5 spectral statistics for each channel, then 14 aggregates across channels.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::data_model::{CHANNEL_COUNT, CHANNEL_NAMES};
use crate::error::{Error, Result};
use crate::stats::{median_sorted, percentile_sorted, sorted_copy};

pub const TIME_FEATURES: [&str; 10] = ["min", "max", "mean", "median", "var", "p25", "p75", "rms", "skew", "kurt"];
pub const SPECTRAL_FEATURES: [&str; 5] = ["spec_entropy", "spec_centroid", "spec_energy", "dom_freq", "spec_spread"];
pub const AGGREGATE_COUNT: usize = 14;
pub const FEATURE_COUNT: usize = CHANNEL_COUNT * (TIME_FEATURES.len() + SPECTRAL_FEATURES.len()) + AGGREGATE_COUNT;
pub const MIN_WINDOW: usize = 8;

/// Below this variance (or total power) the shape statistics are defined as 0.
pub const DEGENERATE: f64 = 1e-12;

/// All 104 names in output order.
pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(FEATURE_COUNT);
    for ch in CHANNEL_NAMES {
        for f in TIME_FEATURES {
            names.push(format!("{ch}_{f}"));
        }
    }
    for ch in CHANNEL_NAMES {
        for f in SPECTRAL_FEATURES {
            names.push(format!("{ch}_{f}"));
        }
    }
    names.extend(["sma_accel".to_string(), "sma_gyro".to_string()]);
    for ch in CHANNEL_NAMES {
        names.push(format!("{ch}_abs_sum"));
    }
    names.extend(
        [
            "mag_mean_accel",
            "mag_mean_gyro",
            "energy_accel",
            "energy_gyro",
            "sma_all",
            "mag_mean_all",
        ]
        .map(String::from),
    );
    names
}

/// Time-domain statistics of one channel, in [`TIME_FEATURES`] order.
pub fn time_features(x: &[f64]) -> [f64; 10] {
    let n = x.len() as f64;
    let s = sorted_copy(x);
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let (skew, kurt) = if m2 < DEGENERATE {
        (0.0, 0.0)
    } else {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    };
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    [
        s[0],
        s[s.len() - 1],
        mean,
        median_sorted(&s),
        m2,
        percentile_sorted(&s, 25.0),
        percentile_sorted(&s, 75.0),
        rms,
        skew,
        kurt,
    ]
}

/// Computes feature vectors for windows of one fixed length.
pub struct FeatureExtractor {
    n: usize,
    fs_hz: f64,
    fft: Arc<dyn Fft<f64>>,
    hann: Vec<f64>,
}

impl FeatureExtractor {
    pub fn new(window_len: usize, fs_hz: f64) -> Result<Self> {
        if window_len < MIN_WINDOW {
            return Err(Error::WindowTooShort {
                needed: MIN_WINDOW,
                got: window_len,
            });
        }
        if !(fs_hz > 0.0 && fs_hz.is_finite()) {
            return Err(Error::InvalidSampleRate(fs_hz));
        }
        let fft = FftPlanner::new().plan_fft_forward(window_len);
        // symmetric Hann
        let m = (window_len - 1) as f64;
        let hann = (0..window_len)
            .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / m).cos())
            .collect();
        Ok(Self {
            n: window_len,
            fs_hz,
            fft,
            hann,
        })
    }

    pub fn window_len(&self) -> usize {
        self.n
    }

    /// One-sided power spectrum without the DC bin: `(frequency_hz, power)`
    /// for bins `1..=n/2`, power `|X_k|^2 / n`.
    pub fn power_spectrum(&self, x: &[f64]) -> Vec<(f64, f64)> {
        let mean = x.iter().sum::<f64>() / self.n as f64;
        let mut buf: Vec<Complex<f64>> = x
            .iter()
            .zip(&self.hann)
            .map(|(v, w)| Complex::new((v - mean) * w, 0.0))
            .collect();
        self.fft.process(&mut buf);
        (1..=self.n / 2)
            .map(|k| (k as f64 * self.fs_hz / self.n as f64, buf[k].norm_sqr() / self.n as f64))
            .collect()
    }

    /// Spectral statistics of one channel, in [`SPECTRAL_FEATURES`] order.
    pub fn spectral_features(&self, x: &[f64]) -> [f64; 5] {
        let spec = self.power_spectrum(x);
        let total: f64 = spec.iter().map(|p| p.1).sum();
        if total < DEGENERATE {
            return [0.0; 5];
        }
        let mut entropy = 0.0;
        let mut centroid = 0.0;
        let mut dom = 0;
        for (i, &(f, p)) in spec.iter().enumerate() {
            let q = p / total;
            if q > 0.0 {
                entropy -= q * q.ln();
            }
            centroid += f * q;
            if p > spec[dom].1 {
                dom = i;
            }
        }
        let entropy = if spec.len() > 1 { entropy / (spec.len() as f64).ln() } else { 0.0 };
        let spread = spec
            .iter()
            .map(|&(f, p)| (f - centroid).powi(2) * p / total)
            .sum::<f64>()
            .sqrt();
        [entropy, centroid, total, spec[dom].0, spread]
    }

    /// Feature vector for one window given as six channel slices.
    pub fn extract(&self, channels: &[&[f64]; CHANNEL_COUNT]) -> Result<Vec<f64>> {
        for ch in channels {
            if ch.len() != self.n {
                return Err(Error::LengthMismatch {
                    left: self.n,
                    right: ch.len(),
                });
            }
            if ch.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("window contains missing or non-finite values".into()));
            }
        }
        let mut out = Vec::with_capacity(FEATURE_COUNT);
        for ch in channels {
            out.extend(time_features(ch));
        }
        for ch in channels {
            out.extend(self.spectral_features(ch));
        }
        out.extend(aggregate_features(channels));
        debug_assert_eq!(out.len(), FEATURE_COUNT);
        Ok(out)
    }
}

fn aggregate_features(ch: &[&[f64]; CHANNEL_COUNT]) -> [f64; AGGREGATE_COUNT] {
    let n = ch[0].len() as f64;
    let abs_sum: [f64; CHANNEL_COUNT] = std::array::from_fn(|c| ch[c].iter().map(|v| v.abs()).sum());
    let triad_mag = |base: usize| -> (f64, f64) {
        let mut mag = 0.0;
        let mut energy = 0.0;
        for i in 0..ch[0].len() {
            let e = ch[base][i].powi(2) + ch[base + 1][i].powi(2) + ch[base + 2][i].powi(2);
            mag += e.sqrt();
            energy += e;
        }
        (mag / n, energy / n)
    };
    let (mag_a, en_a) = triad_mag(0);
    let (mag_g, en_g) = triad_mag(3);
    let mag_all = (0..ch[0].len())
        .map(|i| ch.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
        .sum::<f64>()
        / n;
    [
        (abs_sum[0] + abs_sum[1] + abs_sum[2]) / n,
        (abs_sum[3] + abs_sum[4] + abs_sum[5]) / n,
        abs_sum[0],
        abs_sum[1],
        abs_sum[2],
        abs_sum[3],
        abs_sum[4],
        abs_sum[5],
        mag_a,
        mag_g,
        en_a,
        en_g,
        abs_sum.iter().sum::<f64>() / n,
        mag_all,
    ]
}

/// Convenience wrapper building a one-off extractor.
pub fn extract_features(channels: &[&[f64]; CHANNEL_COUNT], fs_hz: f64) -> Result<Vec<f64>> {
    let n = channels[0].len();
    FeatureExtractor::new(n, fs_hz)?.extract(channels)
}
