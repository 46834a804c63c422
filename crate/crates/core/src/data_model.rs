//! Domain types for 6-axis motion recordings and their behavior labels.
//!
//! Recording CSV: `t_ms,ax,ay,az,gx,gy,gz` with accelerations in g and
//! angular rates in deg/s. A cell that is empty, `NaN`, or otherwise
//! non-numeric is read as a missing value (stored as `f64::NAN`).
//!
//! Label CSV: `start_ms,end_ms,behavior`, intervals half-open.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CHANNEL_COUNT: usize = 6;
pub const CHANNEL_NAMES: [&str; CHANNEL_COUNT] = ["ax", "ay", "az", "gx", "gy", "gz"];
pub const RECORDING_HEADER: &str = "t_ms,ax,ay,az,gx,gy,gz";
pub const LABEL_HEADER: &str = "start_ms,end_ms,behavior";

/// Allowed deviation of a sample period from the nominal period.
pub const JITTER_TOLERANCE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Behavior {
    Eating,
    Lying,
    Walking,
    Standing,
    Interacting,
    Drinking,
    Unknown,
}

impl Behavior {
    pub const ALL: [Behavior; 7] = [
        Behavior::Eating,
        Behavior::Lying,
        Behavior::Walking,
        Behavior::Standing,
        Behavior::Interacting,
        Behavior::Drinking,
        Behavior::Unknown,
    ];

    /// The five behaviors used as classification targets. Drinking and
    /// Unknown windows are dropped before training.
    pub const CLASSIFIED: [Behavior; 5] = [
        Behavior::Eating,
        Behavior::Lying,
        Behavior::Walking,
        Behavior::Standing,
        Behavior::Interacting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Behavior::Eating => "Eating",
            Behavior::Lying => "Lying",
            Behavior::Walking => "Walking",
            Behavior::Standing => "Standing",
            Behavior::Interacting => "Interacting",
            Behavior::Drinking => "Drinking",
            Behavior::Unknown => "Unknown",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_classified(self) -> bool {
        !matches!(self, Behavior::Drinking | Behavior::Unknown)
    }

    pub fn group(self) -> ActivityGroup {
        group_of(self)
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Behavior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        Behavior::ALL
            .iter()
            .copied()
            .find(|b| b.name().eq_ignore_ascii_case(trimmed))
            .ok_or_else(|| Error::UnknownBehaviorName(trimmed.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActivityGroup {
    Active,
    Inactive,
}

impl fmt::Display for ActivityGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActivityGroup::Active => f.write_str("Active"),
            ActivityGroup::Inactive => f.write_str("Inactive"),
        }
    }
}

/// Active = Eating, Walking, Interacting, Drinking. Everything else,
/// including Unknown, is routed as Inactive.
pub fn group_of(b: Behavior) -> ActivityGroup {
    match b {
        Behavior::Eating | Behavior::Walking | Behavior::Interacting | Behavior::Drinking => {
            ActivityGroup::Active
        }
        Behavior::Lying | Behavior::Standing | Behavior::Unknown => ActivityGroup::Inactive,
    }
}

/// One time step of accelerometer (g) and gyroscope (deg/s) readings.
/// A `NaN` channel value means "missing".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuSample {
    pub t_ms: f64,
    pub values: [f64; CHANNEL_COUNT],
}

impl ImuSample {
    pub fn new(t_ms: f64, values: [f64; CHANNEL_COUNT]) -> Self {
        Self { t_ms, values }
    }

    pub fn ax(&self) -> f64 {
        self.values[0]
    }
    pub fn ay(&self) -> f64 {
        self.values[1]
    }
    pub fn az(&self) -> f64 {
        self.values[2]
    }
    pub fn gx(&self) -> f64 {
        self.values[3]
    }
    pub fn gy(&self) -> f64 {
        self.values[4]
    }
    pub fn gz(&self) -> f64 {
        self.values[5]
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(|v| v.is_nan())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImuRecording {
    samples: Vec<ImuSample>,
    sample_rate_hz: f64,
    pub subject_id: String,
    pub session_id: String,
}

impl ImuRecording {
    /// Validates ordering, the jitter tolerance, and the finite-or-missing rule.
    /// Infinite channel values are converted to missing.
    pub fn new(mut samples: Vec<ImuSample>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidSampleRate(sample_rate_hz));
        }
        let nominal = 1000.0 / sample_rate_hz;
        for (i, pair) in samples.windows(2).enumerate() {
            let (prev, cur) = (pair[0].t_ms, pair[1].t_ms);
            if !(cur > prev) {
                return Err(Error::UnsortedTimestamps {
                    row: i + 1,
                    prev,
                    current: cur,
                });
            }
            let period = cur - prev;
            if (period - nominal).abs() > JITTER_TOLERANCE * nominal + 1e-9 {
                return Err(Error::TimestampJitter {
                    row: i + 1,
                    period_ms: period,
                    nominal_ms: nominal,
                });
            }
        }
        for s in &mut samples {
            for v in &mut s.values {
                if !v.is_finite() {
                    *v = f64::NAN;
                }
            }
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            subject_id: String::new(),
            session_id: String::new(),
        })
    }

    /// Builds a recording on a uniform grid starting at `t0_ms` from
    /// per-channel columns of equal length.
    pub fn from_channels(
        channels: &[Vec<f64>; CHANNEL_COUNT],
        sample_rate_hz: f64,
        t0_ms: f64,
    ) -> Result<Self> {
        let n = channels[0].len();
        if let Some(bad) = channels.iter().find(|c| c.len() != n) {
            return Err(Error::LengthMismatch {
                left: n,
                right: bad.len(),
            });
        }
        let period = 1000.0 / sample_rate_hz;
        let samples = (0..n)
            .map(|i| {
                let mut values = [0.0; CHANNEL_COUNT];
                for (c, v) in values.iter_mut().enumerate() {
                    *v = channels[c][i];
                }
                ImuSample::new(t0_ms + i as f64 * period, values)
            })
            .collect();
        Self::new(samples, sample_rate_hz)
    }

    pub fn with_ids(mut self, subject_id: impl Into<String>, session_id: impl Into<String>) -> Self {
        self.subject_id = subject_id.into();
        self.session_id = session_id.into();
        self
    }

    pub fn samples(&self) -> &[ImuSample] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn timestamps(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t_ms).collect()
    }

    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.values[c]).collect()
    }

    pub fn channels(&self) -> [Vec<f64>; CHANNEL_COUNT] {
        std::array::from_fn(|c| self.channel(c))
    }

    pub fn has_missing(&self) -> bool {
        self.samples.iter().any(ImuSample::has_missing)
    }

    /// Copy of this recording with channel data replaced; timestamps and ids kept.
    pub fn with_channels(&self, channels: &[Vec<f64>; CHANNEL_COUNT]) -> Result<Self> {
        for c in channels {
            if c.len() != self.len() {
                return Err(Error::LengthMismatch {
                    left: self.len(),
                    right: c.len(),
                });
            }
        }
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, s)| ImuSample::new(s.t_ms, std::array::from_fn(|c| channels[c][i])))
            .collect();
        Ok(Self {
            samples,
            sample_rate_hz: self.sample_rate_hz,
            subject_id: self.subject_id.clone(),
            session_id: self.session_id.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelInterval {
    pub start_ms: f64,
    pub end_ms: f64,
    pub behavior: Behavior,
}

impl LabelInterval {
    pub fn new(start_ms: f64, end_ms: f64, behavior: Behavior) -> Self {
        Self {
            start_ms,
            end_ms,
            behavior,
        }
    }

    pub fn contains(&self, t_ms: f64) -> bool {
        self.start_ms <= t_ms && t_ms < self.end_ms
    }
}

/// Non-overlapping, sorted behavior intervals on the recording clock.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabelTrack {
    intervals: Vec<LabelInterval>,
}

impl LabelTrack {
    /// Sorts by start and rejects empty or overlapping intervals.
    pub fn new(mut intervals: Vec<LabelInterval>) -> Result<Self> {
        for iv in &intervals {
            if !(iv.start_ms < iv.end_ms) || !iv.start_ms.is_finite() || !iv.end_ms.is_finite() {
                return Err(Error::InvalidInterval {
                    start: iv.start_ms,
                    end: iv.end_ms,
                });
            }
        }
        intervals.sort_by(|a, b| a.start_ms.total_cmp(&b.start_ms));
        for pair in intervals.windows(2) {
            if pair[1].start_ms < pair[0].end_ms {
                return Err(Error::OverlappingIntervals {
                    first_start: pair[0].start_ms,
                    first_end: pair[0].end_ms,
                    second_start: pair[1].start_ms,
                    second_end: pair[1].end_ms,
                });
            }
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[LabelInterval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Behavior of the interval covering `t_ms`, or Unknown in a gap.
    pub fn behavior_at(&self, t_ms: f64) -> Behavior {
        // last interval starting at or before t
        let idx = self.intervals.partition_point(|iv| iv.start_ms <= t_ms);
        if idx == 0 {
            return Behavior::Unknown;
        }
        let iv = &self.intervals[idx - 1];
        if iv.contains(t_ms) {
            iv.behavior
        } else {
            Behavior::Unknown
        }
    }

    /// Per-sample labels for a recording.
    pub fn labels_for(&self, rec: &ImuRecording) -> Vec<Behavior> {
        rec.samples().iter().map(|s| self.behavior_at(s.t_ms)).collect()
    }
}

pub fn behavior_at(track: &LabelTrack, t_ms: f64) -> Behavior {
    track.behavior_at(t_ms)
}

fn reader_for(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))
}

fn check_header(path: &Path, rdr: &mut csv::Reader<std::fs::File>, expected: &str) -> Result<()> {
    let headers = rdr.headers().map_err(|e| Error::csv(path, e))?;
    let found = headers.iter().collect::<Vec<_>>().join(",");
    if found != expected {
        return Err(Error::MalformedHeader {
            path: path.to_path_buf(),
            expected: expected.to_string(),
            found,
        });
    }
    Ok(())
}

fn parse_cell(cell: &str) -> f64 {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => v,
        _ => f64::NAN,
    }
}

fn line_of(record: &csv::StringRecord, fallback: usize) -> usize {
    record.position().map(|p| p.line() as usize).unwrap_or(fallback)
}

/// Reads a recording CSV. Non-numeric channel cells become missing values;
/// the timestamp column must parse.
pub fn load_recording(path: impl AsRef<Path>, sample_rate_hz: f64) -> Result<ImuRecording> {
    let path = path.as_ref();
    let mut rdr = reader_for(path)?;
    check_header(path, &mut rdr, RECORDING_HEADER)?;
    let mut samples = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        let line = line_of(&row, i + 2);
        if row.len() != CHANNEL_COUNT + 1 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected {} fields, found {}", CHANNEL_COUNT + 1, row.len()),
            });
        }
        let t_ms: f64 = row[0].parse().ok().filter(|t: &f64| t.is_finite()).ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("invalid timestamp `{}`", &row[0]),
        })?;
        let values = std::array::from_fn(|c| parse_cell(&row[c + 1]));
        samples.push(ImuSample::new(t_ms, values));
    }
    if samples.is_empty() {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(ImuRecording::new(samples, sample_rate_hz)?.with_ids(String::new(), stem))
}

pub(crate) fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

/// Writes the recording CSV body to any writer. `comment` lines are
/// emitted first, each prefixed with `# `.
pub fn write_recording_to<W: Write>(rec: &ImuRecording, mut out: W, comments: &[String]) -> std::io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{RECORDING_HEADER}")?;
    for s in rec.samples() {
        write!(out, "{}", fmt_value(s.t_ms))?;
        for v in s.values {
            write!(out, ",{}", fmt_value(v))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_recording(rec: &ImuRecording, path: impl AsRef<Path>) -> Result<()> {
    write_recording_with_comments(rec, path, &[])
}

pub fn write_recording_with_comments(
    rec: &ImuRecording,
    path: impl AsRef<Path>,
    comments: &[String],
) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = std::io::BufWriter::new(file);
    write_recording_to(rec, &mut buf, comments).map_err(|e| Error::io(path, e))?;
    buf.flush().map_err(|e| Error::io(path, e))
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<LabelTrack> {
    let path = path.as_ref();
    let mut rdr = reader_for(path)?;
    check_header(path, &mut rdr, LABEL_HEADER)?;
    let mut intervals = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        let line = line_of(&row, i + 2);
        if row.len() != 3 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected 3 fields, found {}", row.len()),
            });
        }
        let num = |cell: &str| {
            cell.parse::<f64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("invalid time `{cell}`"),
            })
        };
        let start = num(&row[0])?;
        let end = num(&row[1])?;
        let behavior: Behavior = row[2].parse()?;
        intervals.push(LabelInterval::new(start, end, behavior));
    }
    LabelTrack::new(intervals)
}

pub fn write_labels_to<W: Write>(track: &LabelTrack, mut out: W, comments: &[String]) -> std::io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{LABEL_HEADER}")?;
    for iv in track.intervals() {
        writeln!(out, "{},{},{}", fmt_value(iv.start_ms), fmt_value(iv.end_ms), iv.behavior)?;
    }
    Ok(())
}

pub fn write_labels(track: &LabelTrack, path: impl AsRef<Path>, comments: &[String]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = std::io::BufWriter::new(file);
    write_labels_to(track, &mut buf, comments).map_err(|e| Error::io(path, e))?;
    buf.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_three_rows() {
        let f = write_tmp("t_ms,ax,ay,az,gx,gy,gz\n0,0,0,1,0,0,0\n20,0.1,0,1,0,0,0\n40,0.2,0,1,0,0,0\n");
        let rec = load_recording(f.path(), 50.0).unwrap();
        assert_eq!(rec.len(), 3);
        assert_eq!(rec.samples()[2].ax(), 0.2);
    }

    #[test]
    fn nan_and_empty_cells_are_missing() {
        let f = write_tmp("t_ms,ax,ay,az,gx,gy,gz\n0,0,0,1,0,0,0\n20,NaN,0,,0,0,0\n40,0.2,0,1,0,0,0\n");
        let rec = load_recording(f.path(), 50.0).unwrap();
        assert!(rec.samples()[1].ax().is_nan());
        assert!(rec.samples()[1].az().is_nan());
        assert!(!rec.samples()[0].has_missing());
    }

    #[test]
    fn decreasing_timestamps_rejected() {
        let f = write_tmp("t_ms,ax,ay,az,gx,gy,gz\n40,0,0,1,0,0,0\n20,0,0,1,0,0,0\n");
        assert!(matches!(
            load_recording(f.path(), 50.0),
            Err(Error::UnsortedTimestamps { .. })
        ));
    }

    #[test]
    fn jitter_beyond_tolerance_rejected() {
        let f = write_tmp("t_ms,ax,ay,az,gx,gy,gz\n0,0,0,1,0,0,0\n20,0,0,1,0,0,0\n45,0,0,1,0,0,0\n");
        assert!(matches!(
            load_recording(f.path(), 50.0),
            Err(Error::TimestampJitter { .. })
        ));
        let ok = write_tmp("t_ms,ax,ay,az,gx,gy,gz\n0,0,0,1,0,0,0\n23,0,0,1,0,0,0\n40,0,0,1,0,0,0\n");
        assert!(load_recording(ok.path(), 50.0).is_ok());
    }

    #[test]
    fn bad_header_and_empty_file() {
        let f = write_tmp("time,ax,ay,az,gx,gy,gz\n0,0,0,1,0,0,0\n");
        assert!(matches!(
            load_recording(f.path(), 50.0),
            Err(Error::MalformedHeader { .. })
        ));
        let e = write_tmp("t_ms,ax,ay,az,gx,gy,gz\n");
        assert!(matches!(load_recording(e.path(), 50.0), Err(Error::EmptyFile { .. })));
    }

    #[test]
    fn label_loading() {
        let f = write_tmp("start_ms,end_ms,behavior\n0,1000,Eating\n");
        assert_eq!(load_labels(f.path()).unwrap().len(), 1);

        let f = write_tmp("start_ms,end_ms,behavior\n0,500,Lying\n400,800,Eating\n");
        assert!(matches!(
            load_labels(f.path()),
            Err(Error::OverlappingIntervals { .. })
        ));

        let f = write_tmp("start_ms,end_ms,behavior\n0,500,Sleeping\n");
        assert!(matches!(load_labels(f.path()), Err(Error::UnknownBehaviorName(n)) if n == "Sleeping"));

        let f = write_tmp("start_ms,end_ms,behavior\n500,900,lying\n0,500,WALKING\n");
        let t = load_labels(f.path()).unwrap();
        assert_eq!(t.intervals()[0].behavior, Behavior::Walking);
    }

    #[test]
    fn behavior_lookup_is_half_open() {
        let t = LabelTrack::new(vec![LabelInterval::new(0.0, 1000.0, Behavior::Eating)]).unwrap();
        assert_eq!(t.behavior_at(500.0), Behavior::Eating);
        assert_eq!(t.behavior_at(1500.0), Behavior::Unknown);
        assert_eq!(t.behavior_at(1000.0), Behavior::Unknown);
        assert_eq!(t.behavior_at(0.0), Behavior::Eating);
        assert_eq!(t.behavior_at(-1.0), Behavior::Unknown);
    }

    #[test]
    fn groups_partition_labelled_behaviors() {
        assert_eq!(group_of(Behavior::Walking), ActivityGroup::Active);
        assert_eq!(group_of(Behavior::Lying), ActivityGroup::Inactive);
        assert_eq!(group_of(Behavior::Unknown), ActivityGroup::Inactive);
        let labelled = &Behavior::ALL[..6];
        let active = labelled.iter().filter(|b| group_of(**b) == ActivityGroup::Active).count();
        assert_eq!(active, 4);
        assert_eq!(labelled.len() - active, 2);
    }
}
