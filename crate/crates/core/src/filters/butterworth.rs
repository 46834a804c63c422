//! Butterworth low/high-pass as cascaded biquads, designed with the bilinear
//! transform (pre-warped cutoff) and run forward then backward for zero phase.
//!
//! Edges get an odd reflection of `3 * order` samples, and each pass starts
//! each section from its steady state for the first padded sample, so a
//! constant input produces an exactly flat response.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PassBand {
    Low,
    High,
}

/// Direct-form II transposed second-order section, `a0` normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    pub fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[0] + self.a[1])
    }

    /// State that keeps the section at rest for constant input `u`.
    fn steady_state(&self, u: f64) -> [f64; 2] {
        let y = self.dc_gain() * u;
        let z2 = self.b[2] * u - self.a[1] * y;
        let z1 = self.b[1] * u - self.a[0] * y + z2;
        [z1, z2]
    }

    fn run(&self, x: &mut [f64], mut z: [f64; 2]) {
        for v in x.iter_mut() {
            let input = *v;
            let y = self.b[0] * input + z[0];
            z[0] = self.b[1] * input - self.a[0] * y + z[1];
            z[1] = self.b[2] * input - self.a[1] * y;
            *v = y;
        }
    }
}

/// Design an even-order Butterworth filter as `order / 2` biquads.
pub fn design(cutoff_hz: f64, fs_hz: f64, order: usize, band: PassBand) -> Result<Vec<Biquad>> {
    let nyquist = fs_hz / 2.0;
    if !(fs_hz > 0.0 && fs_hz.is_finite()) {
        return Err(Error::InvalidSampleRate(fs_hz));
    }
    if !(cutoff_hz > 0.0 && cutoff_hz < nyquist) {
        return Err(Error::CutoffOutOfRange {
            cutoff_hz,
            nyquist_hz: nyquist,
        });
    }
    if order == 0 || order % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "Butterworth order must be even and positive, got {order}"
        )));
    }
    let k = (std::f64::consts::PI * cutoff_hz / fs_hz).tan();
    let k2 = k * k;
    let sections = (0..order / 2)
        .map(|i| {
            let theta = std::f64::consts::PI * (2 * i + 1) as f64 / (2 * order) as f64;
            let q = 1.0 / (2.0 * theta.sin());
            let norm = 1.0 / (1.0 + k / q + k2);
            let a = [2.0 * (k2 - 1.0) * norm, (1.0 - k / q + k2) * norm];
            let b = match band {
                PassBand::Low => {
                    let b0 = k2 * norm;
                    [b0, 2.0 * b0, b0]
                }
                PassBand::High => [norm, -2.0 * norm, norm],
            };
            Biquad { b, a }
        })
        .collect();
    Ok(sections)
}

fn cascade(sections: &[Biquad], x: &mut [f64]) {
    let x0 = x[0];
    let mut level = x0;
    for s in sections {
        let z = s.steady_state(level);
        s.run(x, z);
        level *= s.dc_gain();
    }
}

/// Zero-phase Butterworth filtering. Requires `x.len() > 3 * order`.
pub fn butterworth_zero_phase(
    x: &[f64],
    cutoff_hz: f64,
    fs_hz: f64,
    order: usize,
    band: PassBand,
) -> Result<Vec<f64>> {
    let sections = design(cutoff_hz, fs_hz, order, band)?;
    let n = x.len();
    let pad = 3 * order;
    if n <= pad {
        return Err(Error::SeriesTooShort {
            needed: pad + 1,
            got: n,
        });
    }
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

    cascade(&sections, &mut ext);
    ext.reverse();
    cascade(&sections, &mut ext);
    ext.reverse();
    Ok(ext[pad..pad + n].to_vec())
}

/// Magnitude response of the cascade at `freq_hz`.
pub fn magnitude_response(sections: &[Biquad], freq_hz: f64, fs_hz: f64) -> f64 {
    let w = 2.0 * std::f64::consts::PI * freq_hz / fs_hz;
    let (c1, s1, c2, s2) = (w.cos(), w.sin(), (2.0 * w).cos(), (2.0 * w).sin());
    sections
        .iter()
        .map(|s| {
            let nr = s.b[0] + s.b[1] * c1 + s.b[2] * c2;
            let ni = -(s.b[1] * s1 + s.b[2] * s2);
            let dr = 1.0 + s.a[0] * c1 + s.a[1] * c2;
            let di = -(s.a[0] * s1 + s.a[1] * s2);
            ((nr * nr + ni * ni) / (dr * dr + di * di)).sqrt()
        })
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_power_at_cutoff() {
        for order in [2, 4, 6] {
            for band in [PassBand::Low, PassBand::High] {
                let s = design(5.0, 50.0, order, band).unwrap();
                let g = magnitude_response(&s, 5.0, 50.0);
                assert!((g - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9, "{order} {band:?} {g}");
            }
        }
        let lp = design(5.0, 50.0, 4, PassBand::Low).unwrap();
        assert!((magnitude_response(&lp, 0.0, 50.0) - 1.0).abs() < 1e-12);
        let hp = design(0.5, 50.0, 4, PassBand::High).unwrap();
        assert!(magnitude_response(&hp, 0.0, 50.0) < 1e-12);
    }

    #[test]
    fn constants() {
        let x = vec![2.5; 100];
        let lp = butterworth_zero_phase(&x, 5.0, 50.0, 4, PassBand::Low).unwrap();
        assert!(lp.iter().all(|v| (v - 2.5).abs() < 1e-6));
        let hp = butterworth_zero_phase(&x, 0.5, 50.0, 4, PassBand::High).unwrap();
        assert!(hp.iter().all(|v| v.abs() < 1e-6), "{:?}", &hp[..5]);
    }

    #[test]
    fn argument_validation() {
        let x = vec![0.0; 100];
        assert!(matches!(
            butterworth_zero_phase(&x, 30.0, 50.0, 4, PassBand::Low),
            Err(Error::CutoffOutOfRange { .. })
        ));
        assert!(matches!(
            butterworth_zero_phase(&x[..12], 5.0, 50.0, 4, PassBand::Low),
            Err(Error::SeriesTooShort { needed: 13, got: 12 })
        ));
        assert!(butterworth_zero_phase(&x, 5.0, 50.0, 3, PassBand::Low).is_err());
    }

    #[test]
    fn zero_group_delay() {
        let fs = 50.0;
        let x: Vec<f64> = (0..400)
            .map(|i| {
                let t = i as f64 / fs;
                (2.0 * PI * 1.0 * t).sin() + 0.5 * (2.0 * PI * 2.2 * t + 0.3).sin()
            })
            .collect();
        let y = butterworth_zero_phase(&x, 5.0, fs, 4, PassBand::Low).unwrap();
        let xcorr = |lag: isize| -> f64 {
            (100..300)
                .map(|i| x[i] * y[(i as isize + lag) as usize])
                .sum()
        };
        let best = (-10..=10).max_by(|a, b| xcorr(*a).total_cmp(&xcorr(*b))).unwrap();
        assert_eq!(best, 0);
    }
}
