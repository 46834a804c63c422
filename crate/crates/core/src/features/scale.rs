use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-feature bounds learned from training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

pub fn fit_minmax(x: &[Vec<f64>]) -> Result<ScalerParams> {
    let first = x.first().ok_or(Error::EmptyMatrix)?;
    let mut min = first.clone();
    let mut max = first.clone();
    for row in &x[1..] {
        if row.len() != min.len() {
            return Err(Error::ShapeMismatch {
                expected: min.len(),
                got: row.len(),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    Ok(ScalerParams { min, max })
}

/// `(x - min) / (max - min)`, 0 for constant features. No clipping, so
/// unseen rows may fall outside [0, 1].
pub fn apply_minmax(x: &[Vec<f64>], p: &ScalerParams) -> Result<Vec<Vec<f64>>> {
    x.iter()
        .map(|row| {
            if row.len() != p.min.len() {
                return Err(Error::ShapeMismatch {
                    expected: p.min.len(),
                    got: row.len(),
                });
            }
            Ok(row
                .iter()
                .zip(p.min.iter().zip(&p.max))
                .map(|(v, (lo, hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
                .collect())
        })
        .collect()
}

pub fn save_scaler(p: &ScalerParams, names: &[String], path: &Path, comments: &[String]) -> Result<()> {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str("feature,min,max\n");
    for (j, (lo, hi)) in p.min.iter().zip(&p.max).enumerate() {
        let name = names.get(j).map_or("", String::as_str);
        out.push_str(&format!("{name},{lo:?},{hi:?}\n"));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_scaler(path: &Path) -> Result<ScalerParams> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let mut p = ScalerParams {
        min: Vec::new(),
        max: Vec::new(),
    };
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let num = |k: usize| -> Result<f64> {
            rec.get(k).and_then(|s| s.trim().parse().ok()).ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message: "expected `feature,min,max`".into(),
            })
        };
        p.min.push(num(1)?);
        p.max.push(num(2)?);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let train = vec![vec![2.0, 7.0], vec![4.0, 7.0]];
        let p = fit_minmax(&train).unwrap();
        assert_eq!(apply_minmax(&train, &p).unwrap(), vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(apply_minmax(&[vec![5.0, 9.0]], &p).unwrap(), vec![vec![1.5, 0.0]]);
        assert!(matches!(fit_minmax(&[]), Err(Error::EmptyMatrix)));
    }

    #[test]
    fn sidecar_round_trip() {
        let p = ScalerParams {
            min: vec![0.1, -3.0],
            max: vec![1.0 / 3.0, 2.5],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        save_scaler(&p, &["a".into(), "b".into()], &path, &["x=1".into()]).unwrap();
        assert_eq!(load_scaler(&path).unwrap(), p);
    }
}
