//! Uniform versus behavior-routed filtering.
//!
//! In behavior-specific mode every maximal run of same-group samples is
//! filtered on its own, so edge padding only ever reflects samples of the
//! same run and a change in one run cannot leak into another.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data_model::{group_of, ActivityGroup, ImuRecording, LabelTrack, CHANNEL_COUNT};
use crate::error::{Error, Result};
use crate::filters::{apply_filter, filter_from_parts, parse_params, FilterKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FilterCombination {
    Uniform { filter: FilterKind },
    BehaviorSpecific { active: FilterKind, inactive: FilterKind },
}

impl FilterCombination {
    pub fn uniform(filter: FilterKind) -> Self {
        FilterCombination::Uniform { filter }
    }

    pub fn behavior(active: FilterKind, inactive: FilterKind) -> Self {
        FilterCombination::BehaviorSpecific { active, inactive }
    }

    /// The four routed presets: active filter first.
    pub fn presets() -> [(&'static str, FilterCombination); 4] {
        [
            ("wavelet+median", Self::behavior(FilterKind::wavelet(), FilterKind::median())),
            ("wavelet+lpf", Self::behavior(FilterKind::wavelet(), FilterKind::lpf())),
            ("tvd+lpf", Self::behavior(FilterKind::tvd(), FilterKind::lpf())),
            ("tvd+median", Self::behavior(FilterKind::tvd(), FilterKind::median())),
        ]
    }

    pub fn preset(name: &str) -> Option<FilterCombination> {
        Self::presets()
            .into_iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name.trim()))
            .map(|(_, c)| c)
    }

    /// Routed combinations with the same filter on both sides behave as uniform.
    pub fn is_effectively_uniform(&self) -> bool {
        match self {
            FilterCombination::Uniform { .. } => true,
            FilterCombination::BehaviorSpecific { active, inactive } => active == inactive,
        }
    }

    pub fn filter_for(&self, group: ActivityGroup) -> &FilterKind {
        match self {
            FilterCombination::Uniform { filter } => filter,
            FilterCombination::BehaviorSpecific { active, inactive } => match group {
                ActivityGroup::Active => active,
                ActivityGroup::Inactive => inactive,
            },
        }
    }

    /// Report label, e.g. `Wavelet` or `Wavelet + LPF`.
    pub fn label(&self) -> String {
        match self {
            FilterCombination::Uniform { filter } => filter.label().to_string(),
            FilterCombination::BehaviorSpecific { active, inactive } => {
                format!("{} + {}", active.label(), inactive.label())
            }
        }
    }

    pub fn validate(&self, fs_hz: f64) -> Result<()> {
        match self {
            FilterCombination::Uniform { filter } => filter.validate(fs_hz),
            FilterCombination::BehaviorSpecific { active, inactive } => {
                active.validate(fs_hz)?;
                inactive.validate(fs_hz)
            }
        }
    }
}

impl fmt::Display for FilterCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterCombination::Uniform { filter } => write!(f, "uniform:{filter}"),
            FilterCombination::BehaviorSpecific { active, inactive } => {
                write!(f, "behavior:{active}:{inactive}")
            }
        }
    }
}

/// Split colon-separated tokens into filters: a name token optionally
/// followed by one `key=value,...` token.
fn parse_filter_list(tokens: &[&str]) -> Result<Vec<FilterKind>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let name = tokens[i];
        if name.contains('=') {
            return Err(Error::BadFilterSpec {
                token: name.to_string(),
                reason: "parameters without a filter name".into(),
            });
        }
        let params = match tokens.get(i + 1) {
            Some(next) if next.contains('=') => {
                i += 1;
                parse_params(next)?
            }
            _ => Vec::new(),
        };
        out.push(filter_from_parts(name, &params)?);
        i += 1;
    }
    Ok(out)
}

impl FromStr for FilterCombination {
    type Err = Error;

    /// `uniform:<spec>`, `behavior:<active>:<inactive>`, or a preset name
    /// such as `wavelet+lpf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(c) = Self::preset(s) {
            return Ok(c);
        }
        let (mode, rest) = s.split_once(':').ok_or_else(|| Error::BadFilterSpec {
            token: s.to_string(),
            reason: "expected `uniform:<spec>` or `behavior:<active>:<inactive>`".into(),
        })?;
        let tokens: Vec<&str> = rest.split(':').collect();
        let filters = parse_filter_list(&tokens)?;
        match (mode.to_ascii_lowercase().as_str(), filters.as_slice()) {
            ("uniform", [f]) => Ok(Self::uniform(*f)),
            ("behavior", [a, i]) => Ok(Self::behavior(*a, *i)),
            ("uniform", _) => Err(Error::BadFilterSpec {
                token: rest.to_string(),
                reason: "uniform mode takes exactly one filter".into(),
            }),
            ("behavior", _) => Err(Error::BadFilterSpec {
                token: rest.to_string(),
                reason: "behavior mode takes an active and an inactive filter".into(),
            }),
            (other, _) => Err(Error::BadFilterSpec {
                token: other.to_string(),
                reason: "unknown filter mode".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub start: usize,
    /// Exclusive.
    pub end: usize,
    pub group: ActivityGroup,
}

impl Run {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Maximal same-group runs covering every sample index exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SegmentPlan {
    pub runs: Vec<Run>,
}

impl SegmentPlan {
    pub fn from_groups(groups: &[ActivityGroup]) -> Self {
        let mut runs: Vec<Run> = Vec::new();
        for (i, &g) in groups.iter().enumerate() {
            match runs.last_mut() {
                Some(r) if r.group == g => r.end = i + 1,
                _ => runs.push(Run {
                    start: i,
                    end: i + 1,
                    group: g,
                }),
            }
        }
        SegmentPlan { runs }
    }

    pub fn single(n: usize, group: ActivityGroup) -> Self {
        SegmentPlan {
            runs: if n == 0 {
                Vec::new()
            } else {
                vec![Run { start: 0, end: n, group }]
            },
        }
    }

    pub fn total_len(&self) -> usize {
        self.runs.last().map_or(0, |r| r.end)
    }
}

pub fn plan_segments(rec: &ImuRecording, track: &LabelTrack) -> SegmentPlan {
    let groups: Vec<ActivityGroup> = rec
        .samples()
        .iter()
        .map(|s| group_of(track.behavior_at(s.t_ms)))
        .collect();
    SegmentPlan::from_groups(&groups)
}

/// Result of routing, with the number of (run, channel) pieces that were
/// too short for their filter and passed through unchanged.
#[derive(Debug, Clone)]
pub struct RoutedRecording {
    pub recording: ImuRecording,
    pub passthrough_segments: usize,
}

fn filter_piece(x: &[f64], kind: &FilterKind, fs_hz: f64) -> Result<(Vec<f64>, bool)> {
    if x.len() < kind.min_len() {
        return Ok((x.to_vec(), true));
    }
    Ok((apply_filter(x, kind, fs_hz)?, false))
}

pub fn apply_combination_with_stats(
    rec: &ImuRecording,
    plan: &SegmentPlan,
    combo: &FilterCombination,
    fs_hz: f64,
) -> Result<RoutedRecording> {
    combo.validate(fs_hz)?;
    if rec.has_missing() {
        return Err(Error::InvalidParameter(
            "recording has missing values; clean it before filtering".into(),
        ));
    }
    let n = rec.len();
    let channels = rec.channels();
    let (filtered, passthrough): ([Vec<f64>; CHANNEL_COUNT], usize) = match combo {
        FilterCombination::Uniform { filter } => {
            let results: Vec<Result<(Vec<f64>, bool)>> = channels
                .par_iter()
                .map(|ch| filter_piece(ch, filter, fs_hz))
                .collect();
            let mut out: [Vec<f64>; CHANNEL_COUNT] = Default::default();
            let mut skipped = 0;
            for (c, r) in results.into_iter().enumerate() {
                let (v, s) = r?;
                out[c] = v;
                skipped += usize::from(s);
            }
            (out, skipped)
        }
        FilterCombination::BehaviorSpecific { .. } => {
            if plan.total_len() != n {
                return Err(Error::LengthMismatch {
                    left: plan.total_len(),
                    right: n,
                });
            }
            let jobs: Vec<(usize, Run)> = (0..CHANNEL_COUNT)
                .flat_map(|c| plan.runs.iter().map(move |r| (c, *r)))
                .collect();
            let results: Vec<Result<(Vec<f64>, bool)>> = jobs
                .par_iter()
                .map(|(c, run)| {
                    filter_piece(&channels[*c][run.start..run.end], combo.filter_for(run.group), fs_hz)
                })
                .collect();
            let mut out: [Vec<f64>; CHANNEL_COUNT] = std::array::from_fn(|_| vec![0.0; n]);
            let mut skipped = 0;
            for ((c, run), r) in jobs.iter().zip(results) {
                let (v, s) = r?;
                out[*c][run.start..run.end].copy_from_slice(&v);
                skipped += usize::from(s);
            }
            (out, skipped)
        }
    };
    Ok(RoutedRecording {
        recording: rec.with_channels(&filtered)?,
        passthrough_segments: passthrough,
    })
}

/// Filter a clean recording according to `combo`; timestamps and length are kept.
pub fn apply_combination(
    rec: &ImuRecording,
    plan: &SegmentPlan,
    combo: &FilterCombination,
    fs_hz: f64,
) -> Result<ImuRecording> {
    apply_combination_with_stats(rec, plan, combo, fs_hz).map(|r| r.recording)
}
