//! Run configuration persisted as TOML, and its content hash.
//!
//! Every section has defaults, so a config file only needs the keys it
//! changes. The hash covers everything that can change a result and
//! leaves out the output directory, so the same config run into two
//! directories produces identical files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifiers::{parse_model_list, ModelKind};
use crate::data_model::Behavior;
use crate::error::{Error, Result};
use crate::features::WindowSpec;
use crate::filters::FilterKind;
use crate::outlier::OutlierConfig;
use crate::pipeline::HoldoutParams;
use crate::router::FilterCombination;
use crate::synth::SynthConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub train_fraction: f64,
    pub stratified: bool,
    /// Features kept by elimination; 0 keeps all of them.
    pub select: usize,
}

impl Default for SplitSection {
    fn default() -> Self {
        let h = HoldoutParams::default();
        Self {
            train_fraction: h.train_fraction,
            stratified: h.stratified,
            select: h.select.unwrap_or(0),
        }
    }
}

impl SplitSection {
    pub fn holdout_params(&self) -> HoldoutParams {
        HoldoutParams {
            train_fraction: self.train_fraction,
            stratified: self.stratified,
            select: (self.select > 0).then_some(self.select),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvSection {
    pub k: usize,
    /// Re-run elimination inside each training fold; 0 turns it off.
    pub rfe_per_fold: usize,
}

impl Default for CvSection {
    fn default() -> Self {
        Self { k: 10, rfe_per_fold: 0 }
    }
}

/// The synthetic-data knobs exposed on the command line. Everything else
/// comes from [`SynthConfig::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub duration_s: f64,
    pub noise_active: f64,
    pub noise_inactive: f64,
    pub noise_jitter: f64,
    pub amplitude_jitter: f64,
    pub spike_rate: f64,
    pub spike_magnitude: f64,
}

impl Default for SynthSection {
    fn default() -> Self {
        let d = SynthConfig::default();
        Self {
            duration_s: d.duration_s,
            noise_active: d.noise_active,
            noise_inactive: d.noise_inactive,
            noise_jitter: d.noise_jitter,
            amplitude_jitter: d.amplitude_jitter,
            spike_rate: d.spike_rate,
            spike_magnitude: d.spike_magnitude,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSection {
    /// Filter specs, one grid row each; empty means the default list.
    pub filters: Vec<String>,
    pub outlier_table: bool,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            filters: Vec::new(),
            outlier_table: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub sample_rate_hz: f64,
    /// Filter combination, e.g. `uniform:raw` or `behavior:wavelet:lpf`.
    pub filter: String,
    /// Comma-separated model names, or `all`.
    pub models: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    pub window: WindowSpec,
    pub outlier: OutlierConfig,
    pub split: SplitSection,
    pub cv: CvSection,
    pub synth: SynthSection,
    pub compare: CompareSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            sample_rate_hz: 50.0,
            filter: FilterCombination::behavior(FilterKind::wavelet(), FilterKind::lpf()).to_string(),
            models: "rf".into(),
            out_dir: None,
            window: WindowSpec::default(),
            outlier: OutlierConfig::default(),
            split: SplitSection::default(),
            cv: CvSection::default(),
            synth: SynthSection::default(),
            compare: CompareSection::default(),
        }
    }
}

/// Parses a filter combination. Besides the `uniform:` / `behavior:` forms
/// and preset names, a bare filter spec such as `lpf:cutoff=3` means that
/// filter applied uniformly.
pub fn parse_combination(s: &str) -> Result<FilterCombination> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    if lower.starts_with("uniform:") || lower.starts_with("behavior:") || FilterCombination::preset(t).is_some() {
        t.parse()
    } else {
        t.parse::<FilterKind>().map(FilterCombination::uniform)
    }
}

/// The default `compare` rows: every filter on its own, then the routed presets.
pub fn default_compare_filters() -> Vec<FilterCombination> {
    let mut v: Vec<FilterCombination> = FilterKind::all_defaults()
        .into_iter()
        .map(FilterCombination::uniform)
        .collect();
    v.extend(FilterCombination::presets().into_iter().map(|(_, c)| c));
    v
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.normalized()
    }

    /// Validates every section and rewrites the filter and model strings in
    /// canonical form, so equivalent configs hash the same.
    pub fn normalized(mut self) -> Result<Self> {
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return Err(Error::InvalidSampleRate(self.sample_rate_hz));
        }
        let combo = self.combination()?;
        combo.validate(self.sample_rate_hz)?;
        self.filter = combo.to_string();
        self.models = self.model_kinds()?.iter().map(|m| m.name()).collect::<Vec<_>>().join(",");
        self.compare.filters = self
            .compare
            .filters
            .iter()
            .map(|f| parse_combination(f).map(|c| c.to_string()))
            .collect::<Result<_>>()?;
        self.window.validate(self.sample_rate_hz)?;
        self.outlier.validate()?;
        if !(self.split.train_fraction > 0.0 && self.split.train_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "split.train_fraction must be in (0, 1), got {}",
                self.split.train_fraction
            )));
        }
        if self.cv.k < 2 {
            return Err(Error::InvalidConfig(format!("cv.k must be at least 2, got {}", self.cv.k)));
        }
        self.synth_config().validate()?;
        Ok(self)
    }

    pub fn combination(&self) -> Result<FilterCombination> {
        parse_combination(&self.filter)
    }

    pub fn model_kinds(&self) -> Result<Vec<ModelKind>> {
        parse_model_list(&self.models)
    }

    pub fn compare_filters(&self) -> Result<Vec<FilterCombination>> {
        if self.compare.filters.is_empty() {
            Ok(default_compare_filters())
        } else {
            self.compare.filters.iter().map(|f| parse_combination(f)).collect()
        }
    }

    pub fn synth_config(&self) -> SynthConfig {
        let s = &self.synth;
        SynthConfig {
            fs_hz: self.sample_rate_hz,
            duration_s: s.duration_s,
            behaviors: Behavior::CLASSIFIED.to_vec(),
            noise_active: s.noise_active,
            noise_inactive: s.noise_inactive,
            noise_jitter: s.noise_jitter,
            amplitude_jitter: s.amplitude_jitter,
            spike_rate: s.spike_rate,
            spike_magnitude: s.spike_magnitude,
            seed: self.seed,
            ..SynthConfig::default()
        }
    }

    /// Canonical TOML of everything except the output directory.
    pub fn canonical_toml(&self) -> Result<String> {
        let mut c = self.clone();
        c.out_dir = None;
        toml::to_string(&c).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Lowercase hex SHA-256 of [`canonical_toml`](Self::canonical_toml).
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.canonical_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default().normalized().unwrap();
        let text = c.canonical_toml().unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.normalized().unwrap(), c);
    }

    #[test]
    fn partial_file_and_unknown_key() {
        let c: RunConfig = toml::from_str("seed = 4\n[window]\nlength_s = 2.0\n").unwrap();
        assert_eq!(c.seed, 4);
        assert_eq!(c.window.length_s, 2.0);
        assert_eq!(c.window.purity_threshold, 0.8);
        assert!(toml::from_str::<RunConfig>("sede = 4\n").is_err());
        assert!(toml::from_str::<RunConfig>("[window]\nlenght_s = 2.0\n").is_err());
    }

    #[test]
    fn hash_ignores_out_dir_and_spelling() {
        let a = RunConfig::default().normalized().unwrap();
        let mut b = a.clone();
        b.out_dir = Some("elsewhere".into());
        b.filter = "wavelet+lpf".into();
        b.models = "forest".into();
        let b = b.normalized().unwrap();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        let mut c = a.clone();
        c.seed = 1;
        assert_ne!(a.hash().unwrap(), c.hash().unwrap());
        assert_eq!(a.hash().unwrap().len(), 64);
    }

    #[test]
    fn bare_filter_is_uniform() {
        assert_eq!(parse_combination("lpf").unwrap(), FilterCombination::uniform(FilterKind::lpf()));
        assert_eq!(
            parse_combination("lpf:cutoff=3").unwrap(),
            FilterCombination::uniform(FilterKind::Lpf { cutoff_hz: 3.0, order: 4 })
        );
        assert_eq!(
            parse_combination("tvd+median").unwrap(),
            FilterCombination::behavior(FilterKind::tvd(), FilterKind::median())
        );
        let e = parse_combination("behavior:wavelet:bogus").unwrap_err().to_string();
        assert!(e.contains("bogus"), "{e}");
        assert_eq!(default_compare_filters().len(), 11);
    }
}
