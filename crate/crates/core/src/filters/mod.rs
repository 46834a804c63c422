//! The single-channel denoising filters and their string specs.
//!
//! A spec is a filter name with optional parameter overrides:
//! `wavelet`, `tvd:lambda=0.2`, `median:window=7`, `lpf:cutoff=5,order=4`,
//! `hpf:cutoff=0.5`, `savgol:window=11,polyorder=3`, `raw`.

pub mod butterworth;
pub mod median;
pub mod savgol;
pub mod tvd;
pub mod wavelet;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use butterworth::{butterworth_zero_phase, PassBand};
pub use median::median_filter;
pub use savgol::savitzky_golay;
pub use tvd::{tv_denoise, tv_objective};
pub use wavelet::{wavelet_denoise, Threshold, WaveletFamily};

/// Scale applied to the wavelet noise estimate when no TV lambda is given.
pub const TVD_AUTO_LAMBDA_SCALE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FilterKind {
    Raw,
    Wavelet {
        family: WaveletFamily,
        level: usize,
        threshold: Threshold,
    },
    Tvd {
        /// `None` ties lambda to the segment's noise level.
        lambda: Option<f64>,
    },
    Median {
        window: usize,
    },
    Hpf {
        cutoff_hz: f64,
        order: usize,
    },
    Lpf {
        cutoff_hz: f64,
        order: usize,
    },
    SavitzkyGolay {
        window: usize,
        polyorder: usize,
    },
}

impl FilterKind {
    pub fn wavelet() -> Self {
        FilterKind::Wavelet {
            family: WaveletFamily::Db4,
            level: 4,
            threshold: Threshold::Universal,
        }
    }

    pub fn tvd() -> Self {
        FilterKind::Tvd { lambda: None }
    }

    pub fn median() -> Self {
        FilterKind::Median { window: 5 }
    }

    pub fn lpf() -> Self {
        FilterKind::Lpf {
            cutoff_hz: 5.0,
            order: 4,
        }
    }

    pub fn hpf() -> Self {
        FilterKind::Hpf {
            cutoff_hz: 0.5,
            order: 4,
        }
    }

    pub fn savgol() -> Self {
        FilterKind::SavitzkyGolay {
            window: 11,
            polyorder: 3,
        }
    }

    /// Defaults for every kind, in the order reports list them.
    pub fn all_defaults() -> [FilterKind; 7] {
        [
            FilterKind::Raw,
            Self::wavelet(),
            Self::tvd(),
            Self::median(),
            Self::hpf(),
            Self::lpf(),
            Self::savgol(),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            FilterKind::Raw => "raw",
            FilterKind::Wavelet { .. } => "wavelet",
            FilterKind::Tvd { .. } => "tvd",
            FilterKind::Median { .. } => "median",
            FilterKind::Hpf { .. } => "hpf",
            FilterKind::Lpf { .. } => "lpf",
            FilterKind::SavitzkyGolay { .. } => "savgol",
        }
    }

    /// Human-readable label for report tables.
    pub fn label(&self) -> &'static str {
        match self {
            FilterKind::Raw => "Raw data",
            FilterKind::Wavelet { .. } => "Wavelet",
            FilterKind::Tvd { .. } => "TVD",
            FilterKind::Median { .. } => "Median",
            FilterKind::Hpf { .. } => "HPF",
            FilterKind::Lpf { .. } => "LPF",
            FilterKind::SavitzkyGolay { .. } => "Savitzky-Golay",
        }
    }

    /// Shortest series the filter accepts; shorter segments are passed through
    /// by the router.
    pub fn min_len(&self) -> usize {
        match *self {
            FilterKind::Raw | FilterKind::Tvd { .. } => 1,
            FilterKind::Wavelet { .. } => 2,
            FilterKind::Median { .. } => 1,
            FilterKind::Hpf { order, .. } | FilterKind::Lpf { order, .. } => 3 * order + 1,
            FilterKind::SavitzkyGolay { window, .. } => window,
        }
    }

    pub fn validate(&self, fs_hz: f64) -> Result<()> {
        match *self {
            FilterKind::Raw => Ok(()),
            FilterKind::Wavelet { level, threshold, .. } => {
                if level == 0 {
                    return Err(Error::InvalidParameter("wavelet level must be >= 1".into()));
                }
                if let Threshold::Explicit(t) = threshold {
                    if !(t >= 0.0 && t.is_finite()) {
                        return Err(Error::InvalidParameter(format!("wavelet threshold {t} < 0")));
                    }
                }
                Ok(())
            }
            FilterKind::Tvd { lambda } => match lambda {
                Some(l) if !(l >= 0.0 && l.is_finite()) => {
                    Err(Error::InvalidParameter(format!("TV lambda {l} < 0")))
                }
                _ => Ok(()),
            },
            FilterKind::Median { window } => {
                if window < 3 || window % 2 == 0 {
                    Err(Error::EvenWindow(window))
                } else {
                    Ok(())
                }
            }
            FilterKind::Hpf { cutoff_hz, order } | FilterKind::Lpf { cutoff_hz, order } => {
                butterworth::design(cutoff_hz, fs_hz, order, PassBand::Low).map(|_| ())
            }
            FilterKind::SavitzkyGolay { window, polyorder } => {
                if window % 2 == 0 || window < polyorder + 2 {
                    Err(Error::InvalidWindowOrder { window, polyorder })
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Noise-tied TV lambda for a segment.
pub fn auto_tv_lambda(x: &[f64]) -> f64 {
    TVD_AUTO_LAMBDA_SCALE * wavelet::noise_sigma(x, WaveletFamily::Db4)
}

/// Run one filter over one channel segment.
pub fn apply_filter(x: &[f64], kind: &FilterKind, fs_hz: f64) -> Result<Vec<f64>> {
    match *kind {
        FilterKind::Raw => Ok(x.to_vec()),
        FilterKind::Wavelet {
            family,
            level,
            threshold,
        } => wavelet_denoise(x, family, level, threshold),
        FilterKind::Tvd { lambda } => {
            let l = lambda.unwrap_or_else(|| auto_tv_lambda(x));
            tv_denoise(x, l)
        }
        FilterKind::Median { window } => median_filter(x, window),
        FilterKind::Hpf { cutoff_hz, order } => {
            butterworth_zero_phase(x, cutoff_hz, fs_hz, order, PassBand::High)
        }
        FilterKind::Lpf { cutoff_hz, order } => {
            butterworth_zero_phase(x, cutoff_hz, fs_hz, order, PassBand::Low)
        }
        FilterKind::SavitzkyGolay { window, polyorder } => savitzky_golay(x, window, polyorder),
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FilterKind::Raw => write!(f, "raw"),
            FilterKind::Wavelet {
                family,
                level,
                threshold,
            } => {
                let t = match threshold {
                    Threshold::Universal => "universal".to_string(),
                    Threshold::Explicit(v) => fmt_num(v),
                };
                write!(f, "wavelet:family={family},level={level},threshold={t}")
            }
            FilterKind::Tvd { lambda } => match lambda {
                Some(l) => write!(f, "tvd:lambda={}", fmt_num(l)),
                None => write!(f, "tvd:lambda=auto"),
            },
            FilterKind::Median { window } => write!(f, "median:window={window}"),
            FilterKind::Hpf { cutoff_hz, order } => {
                write!(f, "hpf:cutoff={},order={order}", fmt_num(cutoff_hz))
            }
            FilterKind::Lpf { cutoff_hz, order } => {
                write!(f, "lpf:cutoff={},order={order}", fmt_num(cutoff_hz))
            }
            FilterKind::SavitzkyGolay { window, polyorder } => {
                write!(f, "savgol:window={window},polyorder={polyorder}")
            }
        }
    }
}

fn bad(token: &str, reason: impl Into<String>) -> Error {
    Error::BadFilterSpec {
        token: token.to_string(),
        reason: reason.into(),
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| bad(&format!("{key}={value}"), "not a valid number"))
}

/// Build a filter from its name and `key=value` overrides.
pub fn filter_from_parts(name: &str, params: &[(String, String)]) -> Result<FilterKind> {
    let mut kind = match name.trim().to_ascii_lowercase().as_str() {
        "raw" => FilterKind::Raw,
        "wavelet" => FilterKind::wavelet(),
        "tvd" => FilterKind::tvd(),
        "median" => FilterKind::median(),
        "lpf" => FilterKind::lpf(),
        "hpf" => FilterKind::hpf(),
        "savgol" | "savitzky-golay" => FilterKind::savgol(),
        _ => return Err(bad(name, "unknown filter name")),
    };
    for (key, value) in params {
        let token = format!("{key}={value}");
        match (&mut kind, key.as_str()) {
            (FilterKind::Wavelet { family, .. }, "family") => *family = value.parse().map_err(|_| bad(&token, "unknown wavelet family"))?,
            (FilterKind::Wavelet { level, .. }, "level") => *level = parse_num(key, value)?,
            (FilterKind::Wavelet { threshold, .. }, "threshold") => {
                *threshold = if value.eq_ignore_ascii_case("universal") {
                    Threshold::Universal
                } else {
                    Threshold::Explicit(parse_num(key, value)?)
                }
            }
            (FilterKind::Tvd { lambda }, "lambda") => {
                *lambda = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(parse_num(key, value)?)
                }
            }
            (FilterKind::Median { window }, "window") => *window = parse_num(key, value)?,
            (FilterKind::Lpf { cutoff_hz, .. } | FilterKind::Hpf { cutoff_hz, .. }, "cutoff") => {
                *cutoff_hz = parse_num(key, value)?
            }
            (FilterKind::Lpf { order, .. } | FilterKind::Hpf { order, .. }, "order") => {
                *order = parse_num(key, value)?
            }
            (FilterKind::SavitzkyGolay { window, .. }, "window") => *window = parse_num(key, value)?,
            (FilterKind::SavitzkyGolay { polyorder, .. }, "polyorder") => {
                *polyorder = parse_num(key, value)?
            }
            _ => return Err(bad(&token, format!("unknown parameter for `{name}`"))),
        }
    }
    Ok(kind)
}

/// Parse `k=v,k=v` into pairs.
pub(crate) fn parse_params(s: &str) -> Result<Vec<(String, String)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| bad(p, "expected key=value"))?;
            Ok((k.trim().to_ascii_lowercase(), v.trim().to_string()))
        })
        .collect()
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        // an unknown name is the more useful diagnostic than its parameters
        filter_from_parts(name, &[])?;
        filter_from_parts(name, &parse_params(params)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_defaults_and_overrides() {
        assert_eq!("raw".parse::<FilterKind>().unwrap(), FilterKind::Raw);
        assert_eq!("lpf".parse::<FilterKind>().unwrap(), FilterKind::lpf());
        assert_eq!(
            "lpf:cutoff=3,order=6".parse::<FilterKind>().unwrap(),
            FilterKind::Lpf { cutoff_hz: 3.0, order: 6 }
        );
        assert_eq!(
            "tvd:lambda=0.25".parse::<FilterKind>().unwrap(),
            FilterKind::Tvd { lambda: Some(0.25) }
        );
        assert_eq!(
            "wavelet:threshold=0,level=2,family=haar".parse::<FilterKind>().unwrap(),
            FilterKind::Wavelet {
                family: WaveletFamily::Haar,
                level: 2,
                threshold: Threshold::Explicit(0.0)
            }
        );
    }

    #[test]
    fn display_round_trips() {
        for k in FilterKind::all_defaults() {
            assert_eq!(k.to_string().parse::<FilterKind>().unwrap(), k);
        }
    }

    #[test]
    fn bad_specs_name_the_token() {
        match "lowpass".parse::<FilterKind>() {
            Err(Error::BadFilterSpec { token, .. }) => assert_eq!(token, "lowpass"),
            other => panic!("{other:?}"),
        }
        match "lpf:cutof=5".parse::<FilterKind>() {
            Err(Error::BadFilterSpec { token, .. }) => assert_eq!(token, "cutof=5"),
            other => panic!("{other:?}"),
        }
        assert!("median:window=x".parse::<FilterKind>().is_err());
    }

    #[test]
    fn dispatch() {
        let x = [1.0, 5.0, 1.0, 1.0, 1.0];
        assert_eq!(apply_filter(&x, &FilterKind::Raw, 50.0).unwrap(), x.to_vec());
        assert_eq!(
            apply_filter(&x, &FilterKind::Median { window: 3 }, 50.0).unwrap(),
            vec![1.0; 5]
        );
        assert_eq!(
            apply_filter(&x, &FilterKind::Tvd { lambda: Some(0.0) }, 50.0).unwrap(),
            x.to_vec()
        );
    }
}
