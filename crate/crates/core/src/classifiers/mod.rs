//! From-scratch classifiers behind one train / predict interface.
//!
//! Labels are arbitrary `usize` class ids. A trained model keeps the sorted
//! list of ids it saw and predicts only those.

pub mod forest;
pub mod gbt;
pub mod knn;
pub mod naive_bayes;
pub mod svc;
pub mod tree;

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use forest::{fit_forest, Forest, ForestParams};
use gbt::{fit_gbt, Gbt, GbtParams};
use knn::Knn;
use naive_bayes::{fit_nb, GaussianNb};
use svc::{fit_svc, LinearSvc, SvcParams};
use tree::{grow, Criterion, SortedColumns, Tree, TreeParams};

pub const MODEL_FORMAT: &str = "behavior-filter-model";
pub const MODEL_VERSION: u32 = 1;

/// Index of the first maximum, so ties go to the lowest index.
pub(crate) fn argmax_first(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelKind {
    DecisionTree {
        max_depth: Option<usize>,
        min_samples_split: usize,
    },
    RandomForest(ForestParams),
    GradientBoostedTrees(GbtParams),
    Knn {
        k: usize,
    },
    GaussianNb {
        var_smoothing: f64,
    },
    LinearSvc(SvcParams),
}

impl ModelKind {
    pub fn decision_tree() -> Self {
        ModelKind::DecisionTree {
            max_depth: None,
            min_samples_split: 2,
        }
    }

    pub fn random_forest() -> Self {
        ModelKind::RandomForest(ForestParams::default())
    }

    pub fn gbt() -> Self {
        ModelKind::GradientBoostedTrees(GbtParams::default())
    }

    pub fn knn() -> Self {
        ModelKind::Knn { k: 5 }
    }

    pub fn gaussian_nb() -> Self {
        ModelKind::GaussianNb { var_smoothing: 1e-9 }
    }

    pub fn linear_svc() -> Self {
        ModelKind::LinearSvc(SvcParams::default())
    }

    /// Every model with default hyperparameters, in report column order.
    pub fn all_defaults() -> Vec<Self> {
        vec![
            Self::random_forest(),
            Self::gbt(),
            Self::knn(),
            Self::decision_tree(),
            Self::linear_svc(),
            Self::gaussian_nb(),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::DecisionTree { .. } => "dt",
            ModelKind::RandomForest(_) => "rf",
            ModelKind::GradientBoostedTrees(_) => "gbt",
            ModelKind::Knn { .. } => "knn",
            ModelKind::GaussianNb { .. } => "nb",
            ModelKind::LinearSvc(_) => "svc",
        }
    }

    /// Column heading used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::DecisionTree { .. } => "DT",
            ModelKind::RandomForest(_) => "RF",
            ModelKind::GradientBoostedTrees(_) => "GBT (XGB slot)",
            ModelKind::Knn { .. } => "KNN",
            ModelKind::GaussianNb { .. } => "NB",
            ModelKind::LinearSvc(_) => "Linear SVC",
        }
    }

    pub fn supports_proba(&self) -> bool {
        matches!(
            self,
            ModelKind::RandomForest(_) | ModelKind::GradientBoostedTrees(_) | ModelKind::GaussianNb { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        match *self {
            ModelKind::DecisionTree {
                max_depth,
                min_samples_split,
            } => {
                if max_depth == Some(0) {
                    return bad("max_depth must be positive");
                }
                if min_samples_split < 2 {
                    return bad("min_samples_split must be at least 2");
                }
            }
            ModelKind::RandomForest(p) => {
                if p.n_trees == 0 {
                    return bad("n_trees must be positive");
                }
                if p.max_features == Some(0) || p.max_depth == Some(0) {
                    return bad("max_features and max_depth must be positive");
                }
            }
            ModelKind::GradientBoostedTrees(p) => {
                if p.rounds == 0 || p.max_depth == 0 {
                    return bad("rounds and max_depth must be positive");
                }
                if !(p.learning_rate > 0.0 && p.learning_rate.is_finite()) {
                    return bad("learning_rate must be positive");
                }
            }
            ModelKind::Knn { k } => {
                if k == 0 {
                    return bad("k must be positive");
                }
            }
            ModelKind::GaussianNb { var_smoothing } => {
                if !(var_smoothing > 0.0 && var_smoothing.is_finite()) {
                    return bad("var_smoothing must be positive");
                }
            }
            ModelKind::LinearSvc(p) => {
                if !(p.lambda > 0.0 && p.lambda.is_finite()) || p.epochs == 0 {
                    return bad("lambda and epochs must be positive");
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    /// Accepts the short names (`rf`, `gbt`, `knn`, `dt`, `svc`, `nb`) and a
    /// few long aliases; every model gets default hyperparameters.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dt" | "tree" | "decision_tree" => Ok(Self::decision_tree()),
            "rf" | "forest" | "random_forest" => Ok(Self::random_forest()),
            "gbt" | "xgb" | "gbm" | "boosting" => Ok(Self::gbt()),
            "knn" => Ok(Self::knn()),
            "nb" | "gnb" | "naive_bayes" => Ok(Self::gaussian_nb()),
            "svc" | "svm" | "linear_svc" => Ok(Self::linear_svc()),
            other => Err(Error::InvalidParameter(format!("unknown model `{other}`"))),
        }
    }
}

/// Parses a comma-separated model list; `all` expands to every model.
pub fn parse_model_list(s: &str) -> Result<Vec<ModelKind>> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if tok.eq_ignore_ascii_case("all") {
            out.extend(ModelKind::all_defaults());
        } else {
            out.push(tok.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("empty model list".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Learned {
    Tree(Tree),
    Forest(Forest),
    Gbt(Gbt),
    Knn(Knn),
    GaussianNb(GaussianNb),
    LinearSvc(LinearSvc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    /// Sorted class ids seen in training; internal index `i` means `classes[i]`.
    pub classes: Vec<usize>,
    pub n_features: usize,
    pub seed: u64,
    pub learned: Learned,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: TrainedModel,
}

fn check_rows(x: &[Vec<f64>], expected: Option<usize>) -> Result<usize> {
    let d = match expected {
        Some(d) => d,
        None => x.first().map(Vec::len).ok_or(Error::EmptyMatrix)?,
    };
    for (r, row) in x.iter().enumerate() {
        if row.len() != d {
            return Err(Error::ShapeMismatch {
                expected: d,
                got: row.len(),
            });
        }
        if let Some(c) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature { row: r, col: c });
        }
    }
    Ok(d)
}

/// Trains `kind` on rows `x` with labels `y`. Deterministic in `seed`.
pub fn train(kind: &ModelKind, x: &[Vec<f64>], y: &[usize], seed: u64) -> Result<TrainedModel> {
    kind.validate()?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            got: x.len(),
        });
    }
    let d = check_rows(x, None)?;
    if d == 0 {
        return Err(Error::ShapeMismatch { expected: 1, got: 0 });
    }
    let mut classes: Vec<usize> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let yi: Vec<usize> = y.iter().map(|c| classes.binary_search(c).unwrap()).collect();
    let k = classes.len();

    let learned = match *kind {
        ModelKind::DecisionTree {
            max_depth,
            min_samples_split,
        } => {
            let sorted = SortedColumns::new(x);
            let params = TreeParams {
                max_depth,
                min_samples_split,
                max_features: None,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = grow(
                x,
                &sorted,
                &vec![1; x.len()],
                Criterion::Gini { y: &yi, n_classes: k },
                &params,
                &mut rng,
            );
            Learned::Tree(g.tree)
        }
        ModelKind::RandomForest(p) => Learned::Forest(fit_forest(x, &yi, k, &p, seed).forest),
        ModelKind::GradientBoostedTrees(p) => Learned::Gbt(fit_gbt(x, &yi, k, &p, seed)),
        ModelKind::Knn { k: nn } => Learned::Knn(Knn {
            k: nn,
            x: x.to_vec(),
            y: yi,
            n_classes: k,
        }),
        ModelKind::GaussianNb { var_smoothing } => Learned::GaussianNb(fit_nb(x, &yi, k, var_smoothing)),
        ModelKind::LinearSvc(p) => Learned::LinearSvc(fit_svc(x, &yi, k, &p, seed)),
    };
    Ok(TrainedModel {
        kind: *kind,
        classes,
        n_features: d,
        seed,
        learned,
    })
}

impl TrainedModel {
    fn predict_index(&self, row: &[f64]) -> usize {
        match &self.learned {
            Learned::Tree(t) => argmax_first(t.predict_value(row)),
            Learned::Forest(f) => f.predict(row),
            Learned::Gbt(g) => argmax_first(&g.raw_scores(row)),
            Learned::Knn(m) => m.predict(row),
            Learned::GaussianNb(m) => m.predict(row),
            Learned::LinearSvc(m) => m.predict(row),
        }
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<usize>> {
        if x.is_empty() {
            return Ok(Vec::new());
        }
        check_rows(x, Some(self.n_features))?;
        Ok(x.par_iter().map(|r| self.classes[self.predict_index(r)]).collect())
    }

    /// Per-class scores in the order of [`TrainedModel::classes`].
    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if !self.kind.supports_proba() {
            return Err(Error::Unsupported(format!(
                "{} has no probability output",
                self.kind.label()
            )));
        }
        if x.is_empty() {
            return Ok(Vec::new());
        }
        check_rows(x, Some(self.n_features))?;
        Ok(x
            .par_iter()
            .map(|r| match &self.learned {
                Learned::Forest(f) => f.vote_fractions(r),
                Learned::Gbt(g) => g.proba(r),
                Learned::GaussianNb(m) => m.proba(r),
                _ => unreachable!("checked by supports_proba"),
            })
            .collect())
    }

    /// Training log-loss history for boosted models.
    pub fn train_loss(&self) -> Option<&[f64]> {
        match &self.learned {
            Learned::Gbt(g) => Some(&g.train_loss),
            _ => None,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let doc = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        serde_json::to_writer(&mut w, &doc).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let fmt_err = |message: String| Error::Format {
            path: path.to_path_buf(),
            message,
        };
        let doc: ModelFile = serde_json::from_reader(BufReader::new(file)).map_err(|e| fmt_err(e.to_string()))?;
        if doc.format != MODEL_FORMAT {
            return Err(fmt_err(format!("not a model file (format `{}`)", doc.format)));
        }
        if doc.version != MODEL_VERSION {
            return Err(fmt_err(format!("unsupported model version {}", doc.version)));
        }
        Ok(doc.model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// `per_class` rows per class around centers 6 sigma apart.
    fn blobs(n_classes: usize, per_class: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for c in 0..n_classes {
            let center = [6.0 * c as f64, if c % 2 == 0 { 0.0 } else { 6.0 }];
            for _ in 0..per_class {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                x.push(vec![center[0] + a, center[1] + b]);
                y.push(c);
            }
        }
        (x, y)
    }

    fn accuracy(p: &[usize], y: &[usize]) -> f64 {
        p.iter().zip(y).filter(|(a, b)| a == b).count() as f64 / y.len() as f64
    }

    fn xor() -> (Vec<Vec<f64>>, Vec<usize>) {
        (
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]],
            vec![0, 1, 1, 0],
        )
    }

    #[test]
    fn every_model_fits_blobs() {
        let (x, y) = blobs(2, 100, 1);
        for kind in ModelKind::all_defaults() {
            let m = train(&kind, &x, &y, 7).unwrap();
            let acc = accuracy(&m.predict(&x).unwrap(), &y);
            assert!(acc >= 0.95, "{}: {acc}", kind.label());
        }
    }

    #[test]
    fn xor_tree_vs_linear() {
        let (x, y) = xor();
        let dt = train(&ModelKind::decision_tree(), &x, &y, 0).unwrap();
        assert_eq!(dt.predict(&x).unwrap(), y);
        let svc = train(&ModelKind::linear_svc(), &x, &y, 0).unwrap();
        assert!(accuracy(&svc.predict(&x).unwrap(), &y) <= 0.75);
    }

    #[test]
    fn errors() {
        let (x, _) = xor();
        assert!(matches!(
            train(&ModelKind::knn(), &x, &[1, 1, 1, 1], 0),
            Err(Error::SingleClass)
        ));
        let bad = vec![vec![0.0, f64::NAN], vec![1.0, 1.0]];
        assert!(matches!(
            train(&ModelKind::knn(), &bad, &[0, 1], 0),
            Err(Error::NonFiniteFeature { row: 0, col: 1 })
        ));
        let (x, y) = xor();
        let m = train(&ModelKind::knn(), &x, &y, 0).unwrap();
        assert!(matches!(
            m.predict(&[vec![0.0; 3]]),
            Err(Error::ShapeMismatch { expected: 2, got: 3 })
        ));
        assert!(matches!(m.predict_proba(&x), Err(Error::Unsupported(_))));
        assert!(ModelKind::Knn { k: 0 }.validate().is_err());
    }

    #[test]
    fn classes_are_original_ids() {
        let (x, y) = blobs(3, 30, 2);
        let y: Vec<usize> = y.iter().map(|c| c * 10 + 3).collect();
        let m = train(&ModelKind::decision_tree(), &x, &y, 0).unwrap();
        assert_eq!(m.classes, vec![3, 13, 23]);
        assert_eq!(m.predict(&x).unwrap(), y);
    }

    #[test]
    fn knn_k1_memorizes() {
        let (x, y) = blobs(3, 40, 4);
        let m = train(&ModelKind::Knn { k: 1 }, &x, &y, 0).unwrap();
        assert_eq!(m.predict(&x).unwrap(), y);
    }

    #[test]
    fn knn_distance_tie_prefers_lower_index() {
        // query at 0 is equidistant from rows 0 (class 1) and 1 (class 0)
        let x = vec![vec![-1.0], vec![1.0], vec![5.0]];
        let y = vec![1, 0, 0];
        let m = train(&ModelKind::Knn { k: 1 }, &x, &y, 0).unwrap();
        assert_eq!(m.predict(&[vec![0.0]]).unwrap(), vec![1]);
    }

    #[test]
    fn nb_tie_goes_to_lowest_class() {
        let x = vec![vec![-1.0], vec![-3.0], vec![1.0], vec![3.0]];
        let y = vec![0, 0, 1, 1];
        let m = train(&ModelKind::gaussian_nb(), &x, &y, 0).unwrap();
        assert_eq!(m.predict(&[vec![0.0]]).unwrap(), vec![0]);
        let p = m.predict_proba(&[vec![0.0]]).unwrap();
        assert!((p[0][0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nb_posterior_at_class_mean() {
        // means 0 and 1, shared variance 1e-4: the closed-form posterior
        // at x=0 is 1 / (1 + exp(-1 / 2e-4)) which is 1 to machine precision
        let x = vec![vec![-0.01], vec![0.01], vec![0.99], vec![1.01]];
        let y = vec![0, 0, 1, 1];
        let m = train(&ModelKind::gaussian_nb(), &x, &y, 0).unwrap();
        let p = m.predict_proba(&[vec![0.0]]).unwrap();
        assert!(p[0][0] > 0.99);
    }

    #[test]
    fn proba_rows_sum_to_one() {
        let (x, y) = blobs(4, 30, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q: Vec<Vec<f64>> = (0..50)
            .map(|_| vec![rng.random_range(-10.0..30.0), rng.random_range(-10.0..15.0)])
            .collect();
        for kind in [ModelKind::random_forest(), ModelKind::gbt(), ModelKind::gaussian_nb()] {
            let m = train(&kind, &x, &y, 1).unwrap();
            for row in m.predict_proba(&q).unwrap() {
                assert!(row.iter().all(|v| v.is_finite() && *v >= 0.0));
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn unanimous_forest_gives_probability_one() {
        let (x, y) = blobs(2, 50, 6);
        let m = train(&ModelKind::random_forest(), &x, &y, 3).unwrap();
        let p = m.predict_proba(&[vec![0.0, 0.0]]).unwrap();
        assert_eq!(p[0][0], 1.0);
    }

    #[test]
    fn gbt_loss_never_rises() {
        let (x, y) = blobs(5, 40, 8);
        let m = train(&ModelKind::gbt(), &x, &y, 0).unwrap();
        let loss = m.train_loss().unwrap();
        assert_eq!(loss.len(), 101);
        assert!(loss.windows(2).all(|w| w[1] <= w[0]));
        assert!(loss[100] < loss[0]);
    }

    #[test]
    fn single_tree_forest_equals_decision_tree() {
        let (x, y) = blobs(3, 40, 10);
        let d = x[0].len();
        let rf = ModelKind::RandomForest(ForestParams {
            n_trees: 1,
            max_features: Some(d),
            bootstrap: false,
            max_depth: None,
        });
        let a = train(&rf, &x, &y, 5).unwrap();
        let b = train(&ModelKind::decision_tree(), &x, &y, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![rng.random_range(-5.0..20.0), rng.random_range(-5.0..12.0)])
            .collect();
        assert_eq!(a.predict(&q).unwrap(), b.predict(&q).unwrap());
    }

    #[test]
    fn deterministic_and_round_trips() {
        let (x, y) = blobs(3, 30, 11);
        let dir = tempfile::tempdir().unwrap();
        for kind in ModelKind::all_defaults() {
            let a = train(&kind, &x, &y, 42).unwrap();
            let b = train(&kind, &x, &y, 42).unwrap();
            assert_eq!(a, b, "{}", kind.label());
            let path = dir.path().join(format!("{}.json", kind.name()));
            a.save(&path).unwrap();
            let c = TrainedModel::load(&path).unwrap();
            assert_eq!(a.predict(&x).unwrap(), c.predict(&x).unwrap());
            assert_eq!(a, c);
        }
    }

    #[test]
    fn parse_models() {
        assert_eq!(parse_model_list("all").unwrap().len(), 6);
        assert_eq!(parse_model_list("rf, xgb").unwrap(), vec![ModelKind::random_forest(), ModelKind::gbt()]);
        assert!(parse_model_list("lstm").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn tree_models_ignore_monotone_transforms(seed in 0u64..1000) {
            // Features live on a small grid where each value occurs many times,
            // so every bootstrap sample contains every grid value (probability of
            // a miss is about e^-30) and queries never fall between split points
            // in a way that depends on where the midpoint lands.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x = Vec::new();
            let mut y = Vec::new();
            for _ in 0..120 {
                let a = rng.random_range(0..4) as f64;
                let b = rng.random_range(0..4) as f64;
                let noisy = rng.random_bool(0.1);
                y.push(if noisy { rng.random_range(0..3) } else { ((a + b) as usize) % 3 });
                x.push(vec![a, b]);
            }
            let warp = |r: &Vec<f64>| vec![r[0].exp(), r[1] * 3.0 + r[1].powi(3)];
            let xt: Vec<Vec<f64>> = x.iter().map(warp).collect();
            let q: Vec<Vec<f64>> = (0..16).map(|i| vec![(i / 4) as f64, (i % 4) as f64]).collect();
            let qt: Vec<Vec<f64>> = q.iter().map(warp).collect();
            let small_rf = ModelKind::RandomForest(ForestParams { n_trees: 10, ..ForestParams::default() });
            let small_gbt = ModelKind::GradientBoostedTrees(GbtParams { rounds: 10, ..GbtParams::default() });
            for kind in [ModelKind::decision_tree(), small_rf, small_gbt] {
                let a = train(&kind, &x, &y, seed).unwrap().predict(&q).unwrap();
                let b = train(&kind, &xt, &y, seed).unwrap().predict(&qt).unwrap();
                prop_assert_eq!(a, b, "{}", kind.label());
            }
        }
    }
}
