//! Holdout and stratified k-fold splits, weighted classification metrics,
//! confusion matrices and cross-validation summaries.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{train, ModelKind};
use crate::data_model::Behavior;
use crate::error::{Error, Result};
use crate::features::{apply_minmax, fit_minmax, rfe_select, FeatureMatrix};

/// Display name of a class id: the behavior name when the id is a behavior
/// index, the number otherwise.
pub fn class_name(c: usize) -> String {
    Behavior::ALL
        .get(c)
        .map_or_else(|| c.to_string(), |b| b.name().to_string())
}

fn sorted_classes(y: &[usize]) -> Vec<usize> {
    let mut c = y.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

/// Row indices of each class, in row order.
fn by_class(y: &[usize]) -> Vec<(usize, Vec<usize>)> {
    sorted_classes(y)
        .into_iter()
        .map(|c| (c, (0..y.len()).filter(|&i| y[i] == c).collect()))
        .collect()
}

fn class_rng(seed: u64, class: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(class as u64 + 1);
    rng
}

/// Splits row indices into (train, test), both ascending.
///
/// Stratified mode shuffles each class with its own seeded stream and puts
/// `round(fraction * n_c)` rows of it (clamped to leave one on each side)
/// into the training set.
pub fn split_holdout(y: &[usize], train_fraction: f64, stratified: bool, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    if stratified {
        for (c, mut idx) in by_class(y) {
            if idx.len() < 2 {
                return Err(Error::ClassTooSmall {
                    class: class_name(c),
                    count: idx.len(),
                    needed: 2,
                });
            }
            idx.shuffle(&mut class_rng(seed, c));
            let n_train = ((train_fraction * idx.len() as f64).round() as usize).clamp(1, idx.len() - 1);
            train.extend_from_slice(&idx[..n_train]);
            test.extend_from_slice(&idx[n_train..]);
        }
    } else {
        let mut idx: Vec<usize> = (0..y.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let n_train = (train_fraction * y.len() as f64).round() as usize;
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// `k` disjoint folds (ascending row indices) covering every row. Each
/// class is shuffled and dealt round-robin, starting where the previous
/// class stopped so fold sizes stay balanced too.
pub fn stratified_kfold(y: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    let mut folds = vec![Vec::new(); k];
    let mut offset = 0;
    for (c, mut idx) in by_class(y) {
        if idx.len() < k {
            return Err(Error::ClassTooSmall {
                class: class_name(c),
                count: idx.len(),
                needed: k,
            });
        }
        idx.shuffle(&mut class_rng(seed, c));
        for (p, &i) in idx.iter().enumerate() {
            folds[(p + offset) % k].push(i);
        }
        offset = (offset + idx.len()) % k;
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<usize>,
    /// `counts[true][predicted]`, indexed like `classes`.
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn write_csv(&self) -> String {
        let mut s = String::from("true\\pred");
        for &c in &self.classes {
            s.push(',');
            s.push_str(&class_name(c));
        }
        s.push('\n');
        for (i, &c) in self.classes.iter().enumerate() {
            s.push_str(&class_name(c));
            for v in &self.counts[i] {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class: Vec<ClassMetrics>,
    pub confusion: ConfusionMatrix,
    pub drop_rate_pct: Option<f64>,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Per-class and support-weighted precision, recall and F1.
pub fn compute_metrics(y_true: &[usize], y_pred: &[usize], classes: &[usize]) -> Result<EvalReport> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    let pos = |c: usize| {
        classes
            .iter()
            .position(|&k| k == c)
            .ok_or_else(|| Error::InvalidParameter(format!("label {c} is not in the class list")))
    };
    let k = classes.len();
    let mut counts = vec![vec![0u64; k]; k];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        counts[pos(t)?][pos(p)?] += 1;
    }
    let n = y_true.len() as f64;
    let mut per_class = Vec::with_capacity(k);
    let (mut wp, mut wr, mut wf) = (0.0, 0.0, 0.0);
    for i in 0..k {
        let tp = counts[i][i] as f64;
        let support: u64 = counts[i].iter().sum();
        let predicted: u64 = counts.iter().map(|row| row[i]).sum();
        let precision = ratio(tp, predicted as f64);
        let recall = ratio(tp, support as f64);
        let f1 = ratio(2.0 * precision * recall, precision + recall);
        let w = ratio(support as f64, n);
        wp += w * precision;
        wr += w * recall;
        wf += w * f1;
        per_class.push(ClassMetrics {
            class: classes[i],
            precision,
            recall,
            f1,
            support,
        });
    }
    let confusion = ConfusionMatrix {
        classes: classes.to_vec(),
        counts,
    };
    Ok(EvalReport {
        accuracy: ratio(confusion.trace() as f64, n),
        precision: wp,
        recall: wr,
        f1: wf,
        per_class,
        confusion,
        drop_rate_pct: None,
    })
}

impl EvalReport {
    pub fn metric_rows(&self) -> Vec<(String, f64)> {
        let mut rows = vec![
            ("accuracy".to_string(), self.accuracy),
            ("precision".to_string(), self.precision),
            ("recall".to_string(), self.recall),
            ("f1".to_string(), self.f1),
        ];
        if let Some(d) = self.drop_rate_pct {
            rows.push(("drop_rate_pct".to_string(), d));
        }
        for c in &self.per_class {
            let name = class_name(c.class);
            rows.push((format!("precision[{name}]"), c.precision));
            rows.push((format!("recall[{name}]"), c.recall));
            rows.push((format!("f1[{name}]"), c.f1));
            rows.push((format!("support[{name}]"), c.support as f64));
        }
        rows
    }

    /// `metric,value` CSV.
    pub fn metrics_csv(&self) -> String {
        let mut s = String::from("metric,value\n");
        for (k, v) in self.metric_rows() {
            let _ = writeln!(s, "{k},{v}");
        }
        s
    }

    pub fn text_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<14}{:>10}{:>10}{:>10}{:>9}", "class", "precision", "recall", "f1", "support");
        for c in &self.per_class {
            let _ = writeln!(
                s,
                "{:<14}{:>10.4}{:>10.4}{:>10.4}{:>9}",
                class_name(c.class),
                c.precision,
                c.recall,
                c.f1,
                c.support
            );
        }
        let _ = writeln!(
            s,
            "{:<14}{:>10.4}{:>10.4}{:>10.4}{:>9}",
            "weighted",
            self.precision,
            self.recall,
            self.f1,
            self.confusion.total()
        );
        let _ = writeln!(s, "accuracy {:.4}", self.accuracy);
        if let Some(d) = self.drop_rate_pct {
            let _ = writeln!(s, "outlier drop rate {d:.2}%");
        }
        s
    }

    /// Writes `metrics.csv`, `confusion.csv` and `report.txt` into `dir`,
    /// each starting with the `# `-prefixed comment lines.
    pub fn save(&self, dir: &Path, comments: &[String]) -> Result<()> {
        let header: String = comments.iter().map(|c| format!("# {c}\n")).collect();
        for (name, body) in [
            ("metrics.csv", self.metrics_csv()),
            ("confusion.csv", self.confusion.write_csv()),
            ("report.txt", self.text_table()),
        ] {
            let p = dir.join(name);
            std::fs::write(&p, format!("{header}{body}")).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricSet {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MetricSet {
    fn of(r: &EvalReport) -> Self {
        Self {
            accuracy: r.accuracy,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
        }
    }

    fn as_array(&self) -> [f64; 4] {
        [self.accuracy, self.precision, self.recall, self.f1]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Self {
            accuracy: a[0],
            precision: a[1],
            recall: a[2],
            f1: a[3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub folds: Vec<EvalReport>,
    pub mean: MetricSet,
    /// Population standard deviation across folds.
    pub std: MetricSet,
}

impl CvSummary {
    pub fn from_folds(folds: Vec<EvalReport>) -> Self {
        let n = folds.len().max(1) as f64;
        let vals: Vec<[f64; 4]> = folds.iter().map(|f| MetricSet::of(f).as_array()).collect();
        let mean: [f64; 4] = std::array::from_fn(|j| vals.iter().map(|v| v[j]).sum::<f64>() / n);
        let std: [f64; 4] =
            std::array::from_fn(|j| (vals.iter().map(|v| (v[j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt());
        Self {
            folds,
            mean: MetricSet::from_array(mean),
            std: MetricSet::from_array(std),
        }
    }

    /// `fold,accuracy,precision,recall,f1` rows followed by mean and std rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("fold,accuracy,precision,recall,f1\n");
        for (i, f) in self.folds.iter().enumerate() {
            let _ = writeln!(s, "{},{},{},{},{}", i + 1, f.accuracy, f.precision, f.recall, f.f1);
        }
        for (name, m) in [("mean", self.mean), ("std", self.std)] {
            let _ = writeln!(s, "{name},{},{},{},{}", m.accuracy, m.precision, m.recall, m.f1);
        }
        s
    }

    pub fn text(&self) -> String {
        let m = self.mean;
        let d = self.std;
        format!(
            "{}-fold CV (population std)\naccuracy  {:.4} ± {:.4}\nprecision {:.4} ± {:.4}\nrecall    {:.4} ± {:.4}\nf1        {:.4} ± {:.4}\n",
            self.folds.len(),
            m.accuracy,
            d.accuracy,
            m.precision,
            d.precision,
            m.recall,
            d.recall,
            m.f1,
            d.f1
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CvOptions {
    /// Re-run feature elimination inside every training fold, keeping this
    /// many features. `None` uses the columns as given.
    pub rfe_per_fold: Option<usize>,
}

/// Scales on the training rows, optionally selects features there, trains
/// and scores on the test rows.
pub fn fit_and_score(
    kind: &ModelKind,
    train_m: &FeatureMatrix,
    test_m: &FeatureMatrix,
    rfe_target: Option<usize>,
    seed: u64,
) -> Result<EvalReport> {
    let (train_m, test_m) = match rfe_target {
        Some(t) => {
            let sel = rfe_select(&train_m.x(), &train_m.y(), t, seed)?;
            (train_m.select_columns(&sel)?, test_m.select_columns(&sel)?)
        }
        None => (train_m.clone(), test_m.clone()),
    };
    let scaler = fit_minmax(&train_m.x())?;
    let xtr = apply_minmax(&train_m.x(), &scaler)?;
    let xte = apply_minmax(&test_m.x(), &scaler)?;
    let ytr = train_m.y();
    let yte = test_m.y();
    let model = train(kind, &xtr, &ytr, seed)?;
    let pred = model.predict(&xte)?;
    let mut classes = model.classes.clone();
    classes.extend(yte.iter().copied());
    let classes = sorted_classes(&classes);
    compute_metrics(&yte, &pred, &classes)
}

/// Stratified k-fold cross-validation. Folds run in parallel; fold `i`
/// trains with seed `seed + i`.
pub fn cross_validate(kind: &ModelKind, m: &FeatureMatrix, k: usize, seed: u64, opts: &CvOptions) -> Result<CvSummary> {
    let y = m.y();
    let folds = stratified_kfold(&y, k, seed)?;
    let reports = (0..k)
        .into_par_iter()
        .map(|i| {
            let test = &folds[i];
            let train_idx: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .flat_map(|(_, f)| f.iter().copied())
                .collect();
            fit_and_score(
                kind,
                &m.subset(&train_idx),
                &m.subset(test),
                opts.rfe_per_fold,
                seed.wrapping_add(i as u64),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CvSummary::from_folds(reports))
}
