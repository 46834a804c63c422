//! Per-channel outlier flagging (global IQR fences or rolling Hampel),
//! followed by linear interpolation over the flagged and missing samples.
//!
//! Flagged samples are replaced, never deleted, so the uniform sample grid
//! survives. The reported drop rate is the percentage of samples with at
//! least one flagged channel.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data_model::{ImuRecording, CHANNEL_COUNT, CHANNEL_NAMES};
use crate::error::{Error, Result};
use crate::stats::{median_sorted, percentile_sorted};

/// Scale factor making the MAD a consistent estimator of a Gaussian sigma.
pub const MAD_TO_SIGMA: f64 = 1.4826;
/// Deviation threshold used when a Hampel window has zero MAD.
pub const ZERO_MAD_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutlierMethod {
    Iqr,
    Hampel,
    None,
}

impl FromStr for OutlierMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "iqr" => Ok(OutlierMethod::Iqr),
            "hampel" => Ok(OutlierMethod::Hampel),
            "none" => Ok(OutlierMethod::None),
            other => Err(Error::InvalidParameter(format!(
                "unknown outlier method `{other}` (expected iqr, hampel or none)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutlierConfig {
    pub method: OutlierMethod,
    pub iqr_k: f64,
    pub hampel_half_window: usize,
    pub hampel_n_sigmas: f64,
}

impl Default for OutlierConfig {
    fn default() -> Self {
        Self {
            method: OutlierMethod::Hampel,
            iqr_k: 1.5,
            hampel_half_window: 12,
            hampel_n_sigmas: 3.0,
        }
    }
}

impl OutlierConfig {
    pub fn iqr() -> Self {
        Self {
            method: OutlierMethod::Iqr,
            ..Self::default()
        }
    }

    pub fn hampel() -> Self {
        Self::default()
    }

    pub fn none() -> Self {
        Self {
            method: OutlierMethod::None,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.iqr_k > 0.0 && self.iqr_k.is_finite()) {
            return Err(Error::InvalidParameter(format!("iqr_k must be > 0, got {}", self.iqr_k)));
        }
        if self.hampel_half_window < 1 {
            return Err(Error::InvalidParameter("hampel_half_window must be >= 1".into()));
        }
        if !(self.hampel_n_sigmas > 0.0 && self.hampel_n_sigmas.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "hampel_n_sigmas must be > 0, got {}",
                self.hampel_n_sigmas
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    pub method: OutlierMethod,
    pub flagged_per_channel: [usize; CHANNEL_COUNT],
    /// Samples with at least one flagged channel.
    pub flagged_samples: usize,
    /// Channel values that were already missing on input (imputed, not counted as flagged).
    pub missing_on_input: usize,
    pub total_samples: usize,
    pub drop_rate_pct: f64,
}

impl OutlierReport {
    pub fn rows(&self) -> Vec<(String, String)> {
        let method = match self.method {
            OutlierMethod::Iqr => "iqr",
            OutlierMethod::Hampel => "hampel",
            OutlierMethod::None => "none",
        };
        let mut rows = vec![("method".to_string(), method.to_string())];
        for (c, name) in CHANNEL_NAMES.iter().enumerate() {
            rows.push((format!("flagged_{name}"), self.flagged_per_channel[c].to_string()));
        }
        rows.push(("flagged_samples".into(), self.flagged_samples.to_string()));
        rows.push(("missing_on_input".into(), self.missing_on_input.to_string()));
        rows.push(("total_samples".into(), self.total_samples.to_string()));
        rows.push(("drop_rate_pct".into(), format!("{}", self.drop_rate_pct)));
        rows
    }

    /// `metric,value` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "metric,value")?;
        for (k, v) in self.rows() {
            writeln!(out, "{k},{v}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>, comments: &[String]) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write_csv(&mut buf, comments).map_err(|e| Error::io(path, e))?;
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }
}

fn finite_count(x: &[f64]) -> usize {
    x.iter().filter(|v| v.is_finite()).count()
}

/// Flags values outside `[Q1 - k*IQR, Q3 + k*IQR]`, quartiles taken over the
/// whole channel. Missing (`NaN`) entries are ignored and never flagged.
pub fn detect_iqr(channel: &[f64], k: f64) -> Result<Vec<bool>> {
    let mut finite: Vec<f64> = channel.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.len() < 4 {
        return Err(Error::SeriesTooShort {
            needed: 4,
            got: finite.len(),
        });
    }
    finite.sort_by(f64::total_cmp);
    let q1 = percentile_sorted(&finite, 25.0);
    let q3 = percentile_sorted(&finite, 75.0);
    let iqr = q3 - q1;
    let lo = q1 - k * iqr;
    let hi = q3 + k * iqr;
    Ok(channel
        .iter()
        .map(|&v| v.is_finite() && (v < lo || v > hi))
        .collect())
}

/// Rolling-median detector with a `2*half_window + 1` window, truncated at
/// the edges. Missing entries are skipped inside windows and never flagged.
pub fn detect_hampel(channel: &[f64], half_window: usize, n_sigmas: f64) -> Result<Vec<bool>> {
    let n = channel.len();
    let needed = 2 * half_window + 1;
    if n < needed || finite_count(channel) < needed {
        return Err(Error::SeriesTooShort {
            needed,
            got: finite_count(channel).min(n),
        });
    }
    let mut window = Vec::with_capacity(needed);
    let mut dev = Vec::with_capacity(needed);
    let mut mask = vec![false; n];
    for i in 0..n {
        let x = channel[i];
        if !x.is_finite() {
            continue;
        }
        let lo = i.saturating_sub(half_window);
        let hi = (i + half_window + 1).min(n);
        window.clear();
        window.extend(channel[lo..hi].iter().copied().filter(|v| v.is_finite()));
        window.sort_by(f64::total_cmp);
        let m = median_sorted(&window);
        dev.clear();
        dev.extend(window.iter().map(|v| (v - m).abs()));
        dev.sort_by(f64::total_cmp);
        let s = MAD_TO_SIGMA * median_sorted(&dev);
        let d = (x - m).abs();
        mask[i] = if s == 0.0 { d > ZERO_MAD_EPS } else { d > n_sigmas * s };
    }
    Ok(mask)
}

/// Fills missing entries by linear interpolation over the sample index;
/// leading and trailing gaps take the nearest known value.
pub fn impute_linear(channel: &[f64]) -> Result<Vec<f64>> {
    let known: Vec<usize> = (0..channel.len()).filter(|&i| channel[i].is_finite()).collect();
    let (&first, &last) = match (known.first(), known.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::AllMissing),
    };
    let mut out = channel.to_vec();
    for v in &mut out[..first] {
        *v = channel[first];
    }
    for v in &mut out[last + 1..] {
        *v = channel[last];
    }
    for pair in known.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b > a + 1 {
            let (ya, yb) = (channel[a], channel[b]);
            let span = (b - a) as f64;
            for (j, v) in out.iter_mut().enumerate().take(b).skip(a + 1) {
                let t = (j - a) as f64 / span;
                *v = ya + (yb - ya) * t;
            }
        }
    }
    Ok(out)
}

/// Per-channel outlier mask for the configured method.
pub fn detect(channel: &[f64], cfg: &OutlierConfig) -> Result<Vec<bool>> {
    match cfg.method {
        OutlierMethod::Iqr => detect_iqr(channel, cfg.iqr_k),
        OutlierMethod::Hampel => detect_hampel(channel, cfg.hampel_half_window, cfg.hampel_n_sigmas),
        OutlierMethod::None => Ok(vec![false; channel.len()]),
    }
}

/// Samples with at least one flagged channel.
pub fn flagged_samples(rec: &ImuRecording, cfg: &OutlierConfig) -> Result<Vec<bool>> {
    cfg.validate()?;
    let mut any = vec![false; rec.len()];
    for ch in rec.channels().iter() {
        for (a, f) in any.iter_mut().zip(detect(ch, cfg)?) {
            *a |= f;
        }
    }
    Ok(any)
}

/// Detect, blank and impute every channel. The output has no missing values
/// and the same timestamps as the input.
pub fn clean(rec: &ImuRecording, cfg: &OutlierConfig) -> Result<(ImuRecording, OutlierReport)> {
    cfg.validate()?;
    let channels = rec.channels();
    let results: Vec<Result<(Vec<f64>, Vec<bool>, usize)>> = channels
        .par_iter()
        .map(|ch| {
            let missing = ch.iter().filter(|v| !v.is_finite()).count();
            let mask = detect(ch, cfg)?;
            let blanked: Vec<f64> = ch
                .iter()
                .zip(&mask)
                .map(|(&v, &flag)| if flag { f64::NAN } else { v })
                .collect();
            Ok((impute_linear(&blanked)?, mask, missing))
        })
        .collect();

    let mut cleaned: [Vec<f64>; CHANNEL_COUNT] = Default::default();
    let mut masks: Vec<Vec<bool>> = Vec::with_capacity(CHANNEL_COUNT);
    let mut flagged_per_channel = [0usize; CHANNEL_COUNT];
    let mut missing_on_input = 0;
    for (c, r) in results.into_iter().enumerate() {
        let (values, mask, missing) = r?;
        flagged_per_channel[c] = mask.iter().filter(|&&f| f).count();
        missing_on_input += missing;
        cleaned[c] = values;
        masks.push(mask);
    }
    let n = rec.len();
    let flagged_samples = (0..n).filter(|&i| masks.iter().any(|m| m[i])).count();
    let drop_rate_pct = if n == 0 {
        0.0
    } else {
        100.0 * flagged_samples as f64 / n as f64
    };
    let report = OutlierReport {
        method: cfg.method,
        flagged_per_channel,
        flagged_samples,
        missing_on_input,
        total_samples: n,
        drop_rate_pct,
    };
    Ok((rec.with_channels(&cleaned)?, report))
}
