use serde::{Deserialize, Serialize};

use crate::data_model::{Behavior, ImuRecording, LabelTrack};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowSpec {
    pub length_s: f64,
    pub overlap_fraction: f64,
    pub purity_threshold: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            length_s: 1.5,
            overlap_fraction: 0.0,
            purity_threshold: 0.8,
        }
    }
}

impl WindowSpec {
    /// Window length in samples; `length_s * fs` must be a whole number.
    pub fn samples(&self, fs_hz: f64) -> Result<usize> {
        let exact = self.length_s * fs_hz;
        let n = exact.round();
        if !(n >= 1.0) || (exact - n).abs() > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "window of {} s at {fs_hz} Hz is not a whole number of samples",
                self.length_s
            )));
        }
        Ok(n as usize)
    }

    /// Hop between window starts, at least one sample.
    pub fn step(&self, fs_hz: f64) -> Result<usize> {
        let n = self.samples(fs_hz)?;
        Ok(((n as f64 * (1.0 - self.overlap_fraction)).round() as usize).max(1))
    }

    pub fn validate(&self, fs_hz: f64) -> Result<()> {
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::InvalidParameter(format!(
                "overlap fraction must be in [0, 1), got {}",
                self.overlap_fraction
            )));
        }
        if !(self.purity_threshold > 0.0 && self.purity_threshold <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "purity threshold must be in (0, 1], got {}",
                self.purity_threshold
            )));
        }
        self.samples(fs_hz).map(|_| ())
    }
}

/// A labelled window: sample range `[start, start + len)` of the recording.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: usize,
    pub len: usize,
    pub label: Behavior,
    pub purity: f64,
    pub start_ms: f64,
}

/// Majority label of a run of per-sample labels; count ties go to the
/// behavior listed first.
pub fn majority(labels: &[Behavior]) -> (Behavior, usize) {
    let mut counts = [0usize; Behavior::ALL.len()];
    for b in labels {
        counts[b.index()] += 1;
    }
    let mut best = 0;
    for i in 1..counts.len() {
        if counts[i] > counts[best] {
            best = i;
        }
    }
    (Behavior::ALL[best], counts[best])
}

/// Cuts the recording into fixed-length windows and keeps those whose
/// majority label is a classified behavior covering at least the purity
/// threshold of the window.
pub fn make_windows(rec: &ImuRecording, track: &LabelTrack, spec: &WindowSpec) -> Result<Vec<Window>> {
    let fs = rec.sample_rate_hz();
    spec.validate(fs)?;
    let n = spec.samples(fs)?;
    if rec.len() < n {
        return Err(Error::RecordingShorterThanWindow {
            needed: n,
            got: rec.len(),
        });
    }
    let step = spec.step(fs)?;
    let labels = track.labels_for(rec);
    let mut out = Vec::new();
    let mut start = 0;
    while start + n <= rec.len() {
        let (label, count) = majority(&labels[start..start + n]);
        let purity = count as f64 / n as f64;
        if label.is_classified() && count as f64 >= spec.purity_threshold * n as f64 - 1e-9 {
            out.push(Window {
                start,
                len: n,
                label,
                purity,
                start_ms: rec.samples()[start].t_ms,
            });
        }
        start += step;
    }
    Ok(out)
}
