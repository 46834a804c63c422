//! End-to-end compositions: clean, route-filter, featurize, split, select,
//! scale, train and score.

use serde::{Deserialize, Serialize};

use crate::classifiers::ModelKind;
use crate::data_model::{ImuRecording, LabelTrack};
use crate::error::Result;
use crate::evaluation::{fit_and_score, split_holdout, EvalReport};
use crate::features::{featurize_recording, FeatureMatrix, WindowSpec, DEFAULT_TARGET};
use crate::outlier::{clean, OutlierConfig, OutlierReport};
use crate::router::{apply_combination_with_stats, plan_segments, FilterCombination};

#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub recording: ImuRecording,
    pub outliers: OutlierReport,
    pub passthrough_segments: usize,
}

/// Outlier removal and imputation followed by (possibly routed) filtering.
pub fn preprocess(
    rec: &ImuRecording,
    track: &LabelTrack,
    outlier: &OutlierConfig,
    combo: &FilterCombination,
) -> Result<Preprocessed> {
    let (cleaned, report) = clean(rec, outlier)?;
    let plan = plan_segments(&cleaned, track);
    let routed = apply_combination_with_stats(&cleaned, &plan, combo, cleaned.sample_rate_hz())?;
    Ok(Preprocessed {
        recording: routed.recording,
        outliers: report,
        passthrough_segments: routed.passthrough_segments,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoldoutParams {
    pub train_fraction: f64,
    pub stratified: bool,
    /// Features kept by elimination on the training split; `None` keeps all.
    pub select: Option<usize>,
}

impl Default for HoldoutParams {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            stratified: true,
            select: Some(DEFAULT_TARGET),
        }
    }
}

/// Splits, selects on the training rows, scales, trains and scores.
pub fn holdout(kind: &ModelKind, m: &FeatureMatrix, params: &HoldoutParams, seed: u64) -> Result<EvalReport> {
    let (tr, te) = split_holdout(&m.y(), params.train_fraction, params.stratified, seed)?;
    let select = params.select.filter(|&t| t < m.n_features());
    fit_and_score(kind, &m.subset(&tr), &m.subset(&te), select, seed)
}

/// Preprocess and featurize one labelled recording.
pub fn recording_features(
    rec: &ImuRecording,
    track: &LabelTrack,
    outlier: &OutlierConfig,
    combo: &FilterCombination,
    window: &WindowSpec,
) -> Result<(FeatureMatrix, Preprocessed)> {
    let pre = preprocess(rec, track, outlier, combo)?;
    let m = featurize_recording(&pre.recording, track, window)?;
    Ok((m, pre))
}
