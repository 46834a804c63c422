//! Windowing, the 104-value feature vector, RFE selection and min-max scaling.

mod extract;
mod rfe;
mod scale;
mod windows;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

pub use extract::{
    extract_features, feature_names, time_features, FeatureExtractor, AGGREGATE_COUNT, FEATURE_COUNT,
    SPECTRAL_FEATURES, TIME_FEATURES,
};
pub use rfe::{rfe_select, rfe_select_with, RfeParams, DEFAULT_TARGET};
pub use scale::{apply_minmax, fit_minmax, load_scaler, save_scaler, ScalerParams};
pub use windows::{majority, make_windows, Window, WindowSpec};

use crate::data_model::{Behavior, ImuRecording, LabelTrack, CHANNEL_COUNT};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub values: Vec<f64>,
    pub label: Behavior,
    pub window_start_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub feature_names: Vec<String>,
    pub rows: Vec<FeatureRow>,
    /// Indices into the full feature list when this matrix is a selection.
    pub selected_indices: Option<Vec<usize>>,
}

impl FeatureMatrix {
    pub fn new(feature_names: Vec<String>, rows: Vec<FeatureRow>) -> Result<Self> {
        let m = Self {
            feature_names,
            rows,
            selected_indices: None,
        };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        let d = self.feature_names.len();
        for (r, row) in self.rows.iter().enumerate() {
            if row.values.len() != d {
                return Err(Error::ShapeMismatch {
                    expected: d,
                    got: row.values.len(),
                });
            }
            if let Some(c) = row.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature { row: r, col: c });
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn x(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.values.clone()).collect()
    }

    /// Labels as behavior indices, the class ids used by the classifiers.
    pub fn y(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.label.index()).collect()
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            rows: rows.iter().map(|&i| self.rows[i].clone()).collect(),
            selected_indices: self.selected_indices.clone(),
        }
    }

    /// Keeps the given columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        let d = self.n_features();
        if let Some(&bad) = indices.iter().find(|&&i| i >= d) {
            return Err(Error::InvalidParameter(format!("feature index {bad} out of range 0..{d}")));
        }
        let base = self.selected_indices.clone();
        Ok(Self {
            feature_names: indices.iter().map(|&i| self.feature_names[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| FeatureRow {
                    values: indices.iter().map(|&i| r.values[i]).collect(),
                    ..*r
                })
                .collect(),
            selected_indices: Some(match base {
                Some(b) => indices.iter().map(|&i| b[i]).collect(),
                None => indices.to_vec(),
            }),
        })
    }

    /// Concatenates rows of matrices with identical feature lists.
    pub fn concat(parts: Vec<FeatureMatrix>) -> Result<Self> {
        let mut it = parts.into_iter();
        let mut first = it.next().ok_or(Error::EmptyMatrix)?;
        for m in it {
            if m.feature_names != first.feature_names {
                return Err(Error::ShapeMismatch {
                    expected: first.n_features(),
                    got: m.n_features(),
                });
            }
            first.rows.extend(m.rows);
        }
        Ok(first)
    }

    pub fn write_csv<W: Write>(&self, out: W, comments: &[String]) -> Result<()> {
        let mut out = out;
        for c in comments {
            writeln!(out, "# {c}").map_err(|e| Error::io("<features>", e))?;
        }
        let mut w = csv::Writer::from_writer(out);
        let to_err = |e: csv::Error| Error::csv("<features>", e);
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.extend(["label", "window_start_ms"]);
        w.write_record(&header).map_err(to_err)?;
        for row in &self.rows {
            let mut rec: Vec<String> = row.values.iter().map(|v| format!("{v:?}")).collect();
            rec.push(row.label.name().to_string());
            rec.push(format!("{}", row.window_start_ms));
            w.write_record(&rec).map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::io("<features>", e))
    }

    pub fn save(&self, path: &Path, comments: &[String]) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f), comments).map_err(|e| relabel(e, path))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::csv(path, e))?
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        let d = header.len().saturating_sub(2);
        if header.len() < 3 || header[d] != "label" || header[d + 1] != "window_start_ms" {
            return Err(Error::MalformedHeader {
                path: path.to_path_buf(),
                expected: "<feature names>,label,window_start_ms".into(),
                found: header.join(","),
            });
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::csv(path, e))?;
            let line = rec.position().map_or(i + 2, |p| p.line() as usize);
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line,
                message,
            };
            if rec.len() != header.len() {
                return Err(parse_err(format!("expected {} fields, got {}", header.len(), rec.len())));
            }
            let mut values = Vec::with_capacity(d);
            for field in rec.iter().take(d) {
                values.push(
                    field
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| parse_err(format!("bad number `{field}`")))?,
                );
            }
            let label: Behavior = rec[d].parse().map_err(|e: Error| parse_err(e.to_string()))?;
            let window_start_ms = rec[d + 1]
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad timestamp `{}`", &rec[d + 1])))?;
            rows.push(FeatureRow {
                values,
                label,
                window_start_ms,
            });
        }
        FeatureMatrix::new(header[..d].to_vec(), rows)
    }
}

fn relabel(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        Error::Csv { source, .. } => Error::csv(path, source),
        other => other,
    }
}

/// Windows a clean recording and extracts one feature row per kept window.
pub fn featurize_recording(rec: &ImuRecording, track: &LabelTrack, spec: &WindowSpec) -> Result<FeatureMatrix> {
    if rec.has_missing() {
        return Err(Error::InvalidParameter("recording still contains missing values".into()));
    }
    let windows = make_windows(rec, track, spec)?;
    let n = spec.samples(rec.sample_rate_hz())?;
    let ex = FeatureExtractor::new(n, rec.sample_rate_hz())?;
    let channels = rec.channels();
    let rows = windows
        .par_iter()
        .map(|w| {
            let slices: [&[f64]; CHANNEL_COUNT] = std::array::from_fn(|c| &channels[c][w.start..w.start + w.len]);
            Ok(FeatureRow {
                values: ex.extract(&slices)?,
                label: w.label,
                window_start_ms: w.start_ms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureMatrix::new(feature_names(), rows)
}

/// Writes selected indices as `index,name` rows.
pub fn save_selection(indices: &[usize], names: &[String], path: &Path, comments: &[String]) -> Result<()> {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str("index,name\n");
    for &i in indices {
        let name = names.get(i).map_or("", String::as_str);
        out.push_str(&format!("{i},{name}\n"));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_selection(path: &Path) -> Result<Vec<usize>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        out.push(rec[0].trim().parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            message: format!("bad index `{}`", &rec[0]),
        })?);
    }
    Ok(out)
}
