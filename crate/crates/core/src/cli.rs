//! Command-line front end. Each command reads CSV inputs, writes CSV/text
//! outputs into the output directory, and stamps every file with the hash
//! of the effective configuration.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{train, ModelKind, TrainedModel, MODEL_FORMAT, MODEL_VERSION};
use crate::config::RunConfig;
use crate::data_model::{load_labels, load_recording, write_labels, write_recording_with_comments};
use crate::error::{Error, Result};
use crate::evaluation::{compute_metrics, cross_validate, fit_and_score, split_holdout, CvOptions, EvalReport};
use crate::features::{
    apply_minmax, featurize_recording, fit_minmax, load_selection, rfe_select, save_scaler, save_selection,
    FeatureMatrix, ScalerParams,
};
use crate::outlier::{OutlierConfig, OutlierMethod};
use crate::pipeline::{preprocess, recording_features};
use crate::router::FilterCombination;
use crate::synth::generate;

#[derive(Debug, Parser)]
#[command(name = "behavior-filter", version, about = "Behavior-specific filtering and classification of 6-axis IMU data")]
pub struct Cli {
    /// Seed for every random choice (splits, forests, synthetic data).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML run configuration; command-line flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for output files (created if missing). Default `out`.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub sample_rate_hz: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct OutlierOpts {
    /// iqr, hampel or none.
    #[arg(long)]
    pub outlier: Option<OutlierMethod>,
    #[arg(long)]
    pub iqr_k: Option<f64>,
    /// Full Hampel window in samples (odd).
    #[arg(long)]
    pub hampel_window: Option<usize>,
    #[arg(long)]
    pub hampel_nsig: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct WindowOpts {
    #[arg(long)]
    pub window_s: Option<f64>,
    #[arg(long)]
    pub overlap: Option<f64>,
    #[arg(long)]
    pub purity: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct SplitOpts {
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Plain random holdout instead of a per-class split.
    #[arg(long)]
    pub no_stratify: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labelled synthetic recording with known truth.
    Synth {
        #[arg(long)]
        duration_s: Option<f64>,
        #[arg(long)]
        spike_rate: Option<f64>,
        #[arg(long)]
        spike_magnitude: Option<f64>,
    },
    /// Remove outliers and apply the filter combination.
    Preprocess {
        #[arg(long)]
        recording: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[command(flatten)]
        outlier: OutlierOpts,
        /// `uniform:<spec>`, `behavior:<active>:<inactive>` or a preset.
        #[arg(long)]
        filter_mode: Option<String>,
    },
    /// Window a (preprocessed) recording and extract features.
    Featurize {
        #[arg(long)]
        recording: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[command(flatten)]
        window: WindowOpts,
    },
    /// Recursive feature elimination on the training split.
    Select {
        #[arg(long)]
        features: PathBuf,
        /// Number of features to keep.
        #[arg(long)]
        target: Option<usize>,
        #[command(flatten)]
        split: SplitOpts,
    },
    /// Fit scaler and model on the training split (or all rows).
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        selection: Option<PathBuf>,
        /// Model name (rf, gbt, knn, dt, svc, nb).
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        all_rows: bool,
        #[command(flatten)]
        split: SplitOpts,
    },
    /// Score a trained model on the test split (or all rows).
    Evaluate {
        /// `model.json` written by `train`.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        all_rows: bool,
        #[command(flatten)]
        split: SplitOpts,
    },
    /// Stratified k-fold cross-validation.
    Crossval {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        selection: Option<PathBuf>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        /// Re-select this many features inside each training fold.
        #[arg(long)]
        rfe_per_fold: Option<usize>,
    },
    /// Filter-by-model accuracy grid on one labelled recording.
    Compare {
        #[arg(long)]
        recording: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// One grid row per occurrence; defaults to every filter and preset.
        #[arg(long = "filter")]
        filters: Vec<String>,
        /// Comma-separated model names or `all`.
        #[arg(long)]
        models: Option<String>,
        #[arg(long)]
        no_outlier_table: bool,
        /// Features kept by elimination (0 keeps all).
        #[arg(long)]
        select: Option<usize>,
        #[command(flatten)]
        outlier: OutlierOpts,
        #[command(flatten)]
        window: WindowOpts,
        #[command(flatten)]
        split: SplitOpts,
    },
}

/// Everything `evaluate` needs to score new feature rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format: String,
    pub version: u32,
    pub config_sha256: String,
    /// Column names the bundle expects, before selection.
    pub input_features: Vec<String>,
    pub selection: Option<Vec<usize>>,
    pub scaler: ScalerParams,
    pub model: TrainedModel,
}

impl ModelBundle {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let b: ModelBundle = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if b.format != MODEL_FORMAT || b.version != MODEL_VERSION {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!("unsupported model file {} v{}", b.format, b.version),
            });
        }
        Ok(b)
    }

    /// Selects, scales and predicts. The matrix must have the columns the
    /// bundle was trained on.
    pub fn predict(&self, m: &FeatureMatrix) -> Result<Vec<usize>> {
        if m.n_features() != self.input_features.len() {
            return Err(Error::ShapeMismatch {
                expected: self.input_features.len(),
                got: m.n_features(),
            });
        }
        let m = match &self.selection {
            Some(s) => m.select_columns(s)?,
            None => m.clone(),
        };
        self.model.predict(&apply_minmax(&m.x(), &self.scaler)?)
    }
}

/// Output directory plus the comment lines stamped on every file.
struct Outputs {
    dir: PathBuf,
    comments: Vec<String>,
    written: Vec<PathBuf>,
}

impl Outputs {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let p = self.path(name);
        let mut s: String = self.comments.iter().map(|c| format!("# {c}\n")).collect();
        s.push_str(body);
        std::fs::write(&p, s).map_err(|e| Error::io(&p, e))
    }
}

fn apply_outlier(cfg: &mut RunConfig, o: &OutlierOpts) -> Result<()> {
    if let Some(m) = o.outlier {
        cfg.outlier.method = m;
    }
    if let Some(k) = o.iqr_k {
        cfg.outlier.iqr_k = k;
    }
    if let Some(w) = o.hampel_window {
        if w < 3 || w % 2 == 0 {
            return Err(Error::InvalidParameter(format!("hampel window must be odd and at least 3, got {w}")));
        }
        cfg.outlier.hampel_half_window = (w - 1) / 2;
    }
    if let Some(n) = o.hampel_nsig {
        cfg.outlier.hampel_n_sigmas = n;
    }
    Ok(())
}

fn apply_window(cfg: &mut RunConfig, w: &WindowOpts) {
    if let Some(v) = w.window_s {
        cfg.window.length_s = v;
    }
    if let Some(v) = w.overlap {
        cfg.window.overlap_fraction = v;
    }
    if let Some(v) = w.purity {
        cfg.window.purity_threshold = v;
    }
}

fn apply_split(cfg: &mut RunConfig, s: &SplitOpts) {
    if let Some(f) = s.train_fraction {
        cfg.split.train_fraction = f;
    }
    if s.no_stratify {
        cfg.split.stratified = false;
    }
}

/// Defaults, then the config file, then command-line flags.
pub fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = &cli.out_dir {
        cfg.out_dir = Some(d.clone());
    }
    if let Some(fs) = cli.sample_rate_hz {
        cfg.sample_rate_hz = fs;
    }
    match &cli.command {
        Command::Synth {
            duration_s,
            spike_rate,
            spike_magnitude,
        } => {
            if let Some(v) = duration_s {
                cfg.synth.duration_s = *v;
            }
            if let Some(v) = spike_rate {
                cfg.synth.spike_rate = *v;
            }
            if let Some(v) = spike_magnitude {
                cfg.synth.spike_magnitude = *v;
            }
        }
        Command::Preprocess { outlier, filter_mode, .. } => {
            apply_outlier(&mut cfg, outlier)?;
            if let Some(f) = filter_mode {
                cfg.filter = f.clone();
            }
        }
        Command::Featurize { window, .. } => apply_window(&mut cfg, window),
        Command::Select { target, split, .. } => {
            if let Some(t) = target {
                cfg.split.select = *t;
            }
            apply_split(&mut cfg, split);
        }
        Command::Train { model, split, .. } => {
            if let Some(m) = model {
                cfg.models = m.clone();
            }
            apply_split(&mut cfg, split);
        }
        Command::Evaluate { split, .. } => apply_split(&mut cfg, split),
        Command::Crossval {
            model, k, rfe_per_fold, ..
        } => {
            if let Some(m) = model {
                cfg.models = m.clone();
            }
            if let Some(k) = k {
                cfg.cv.k = *k;
            }
            if let Some(r) = rfe_per_fold {
                cfg.cv.rfe_per_fold = *r;
            }
        }
        Command::Compare {
            filters,
            models,
            no_outlier_table,
            select,
            outlier,
            window,
            split,
            ..
        } => {
            if !filters.is_empty() {
                cfg.compare.filters = filters.clone();
            }
            if let Some(m) = models {
                cfg.models = m.clone();
            }
            if *no_outlier_table {
                cfg.compare.outlier_table = false;
            }
            if let Some(s) = select {
                cfg.split.select = *s;
            }
            apply_outlier(&mut cfg, outlier)?;
            apply_window(&mut cfg, window);
            apply_split(&mut cfg, split);
        }
    }
    cfg.normalized()
}

/// Parses arguments and runs one command, returning the files written.
pub fn run_from<I, T>(args: I) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    run(&cli)
}

pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let cfg = effective_config(cli)?;
    let hash = cfg.hash()?;
    let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut out = Outputs {
        dir,
        comments: vec![format!("config_sha256={hash}")],
        written: Vec::new(),
    };
    let toml_text = cfg.canonical_toml()?;
    out.text("config.toml", &toml_text)?;

    match &cli.command {
        Command::Synth { .. } => cmd_synth(&cfg, &mut out)?,
        Command::Preprocess { recording, labels, .. } => cmd_preprocess(&cfg, recording, labels, &mut out)?,
        Command::Featurize { recording, labels, .. } => cmd_featurize(&cfg, recording, labels, &mut out)?,
        Command::Select { features, .. } => cmd_select(&cfg, features, &mut out)?,
        Command::Train {
            features,
            selection,
            all_rows,
            ..
        } => cmd_train(&cfg, features, selection.as_deref(), *all_rows, &hash, &mut out)?,
        Command::Evaluate {
            model,
            features,
            all_rows,
            ..
        } => cmd_evaluate(&cfg, model, features, *all_rows, &mut out)?,
        Command::Crossval { features, selection, .. } => cmd_crossval(&cfg, features, selection.as_deref(), &mut out)?,
        Command::Compare { recording, labels, .. } => cmd_compare(&cfg, recording, labels, &mut out)?,
    }
    Ok(out.written)
}

fn cmd_synth(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let truth = generate(&cfg.synth_config())?;
    let p = out.path("recording.csv");
    write_recording_with_comments(&truth.noisy, &p, &out.comments)?;
    let p = out.path("labels.csv");
    write_labels(&truth.labels, &p, &out.comments)?;
    out.text("truth_spikes.csv", &truth.spikes_csv())?;
    let p = out.path("truth_clean.csv");
    write_recording_with_comments(&truth.clean, &p, &out.comments)
}

fn cmd_preprocess(cfg: &RunConfig, recording: &Path, labels: &Path, out: &mut Outputs) -> Result<()> {
    let rec = load_recording(recording, cfg.sample_rate_hz)?;
    let track = load_labels(labels)?;
    let pre = preprocess(&rec, &track, &cfg.outlier, &cfg.combination()?)?;
    let p = out.path("preprocessed.csv");
    write_recording_with_comments(&pre.recording, &p, &out.comments)?;
    let p = out.path("outlier_report.csv");
    pre.outliers.save(&p, &out.comments)?;
    if pre.passthrough_segments > 0 {
        eprintln!(
            "note: {} segment/channel pieces were shorter than their filter and passed through",
            pre.passthrough_segments
        );
    }
    Ok(())
}

fn cmd_featurize(cfg: &RunConfig, recording: &Path, labels: &Path, out: &mut Outputs) -> Result<()> {
    let rec = load_recording(recording, cfg.sample_rate_hz)?;
    let track = load_labels(labels)?;
    let m = featurize_recording(&rec, &track, &cfg.window)?;
    let p = out.path("features.csv");
    m.save(&p, &out.comments)
}

fn split_rows(cfg: &RunConfig, m: &FeatureMatrix) -> Result<(Vec<usize>, Vec<usize>)> {
    split_holdout(&m.y(), cfg.split.train_fraction, cfg.split.stratified, cfg.seed)
}

fn cmd_select(cfg: &RunConfig, features: &Path, out: &mut Outputs) -> Result<()> {
    let m = FeatureMatrix::load(features)?;
    if cfg.split.select == 0 {
        return Err(Error::InvalidParameter("select needs a target above 0".into()));
    }
    let (tr, _) = split_rows(cfg, &m)?;
    let train_m = m.subset(&tr);
    let sel = rfe_select(&train_m.x(), &train_m.y(), cfg.split.select, cfg.seed)?;
    let p = out.path("selection.csv");
    save_selection(&sel, &m.feature_names, &p, &out.comments)
}

fn first_model(cfg: &RunConfig) -> Result<ModelKind> {
    Ok(cfg.model_kinds()?.remove(0))
}

fn with_selection(m: &FeatureMatrix, selection: Option<&Path>) -> Result<(FeatureMatrix, Option<Vec<usize>>)> {
    match selection {
        Some(p) => {
            let sel = load_selection(p)?;
            Ok((m.select_columns(&sel)?, Some(sel)))
        }
        None => Ok((m.clone(), None)),
    }
}

fn cmd_train(
    cfg: &RunConfig,
    features: &Path,
    selection: Option<&Path>,
    all_rows: bool,
    hash: &str,
    out: &mut Outputs,
) -> Result<()> {
    let m = FeatureMatrix::load(features)?;
    let rows = if all_rows { (0..m.n_rows()).collect() } else { split_rows(cfg, &m)?.0 };
    let (sm, sel) = with_selection(&m.subset(&rows), selection)?;
    let scaler = fit_minmax(&sm.x())?;
    let model = train(&first_model(cfg)?, &apply_minmax(&sm.x(), &scaler)?, &sm.y(), cfg.seed)?;
    let p = out.path("scaler.csv");
    save_scaler(&scaler, &sm.feature_names, &p, &out.comments)?;
    if let Some(s) = &sel {
        let p = out.path("selection.csv");
        save_selection(s, &m.feature_names, &p, &out.comments)?;
    }
    let bundle = ModelBundle {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        config_sha256: hash.into(),
        input_features: m.feature_names.clone(),
        selection: sel,
        scaler,
        model,
    };
    let p = out.path("model.json");
    bundle.save(&p)
}

fn cmd_evaluate(cfg: &RunConfig, model: &Path, features: &Path, all_rows: bool, out: &mut Outputs) -> Result<()> {
    let bundle = ModelBundle::load(model)?;
    let m = FeatureMatrix::load(features)?;
    if m.n_features() != bundle.input_features.len() {
        return Err(Error::ShapeMismatch {
            expected: bundle.input_features.len(),
            got: m.n_features(),
        });
    }
    let rows = if all_rows { (0..m.n_rows()).collect() } else { split_rows(cfg, &m)?.1 };
    let test = m.subset(&rows);
    let pred = bundle.predict(&test)?;
    let y = test.y();
    let mut classes = bundle.model.classes.clone();
    classes.extend(&y);
    classes.sort_unstable();
    classes.dedup();
    let report = compute_metrics(&y, &pred, &classes)?;
    for name in ["metrics.csv", "confusion.csv", "report.txt"] {
        out.path(name);
    }
    report.save(&out.dir, &out.comments)
}

fn cmd_crossval(cfg: &RunConfig, features: &Path, selection: Option<&Path>, out: &mut Outputs) -> Result<()> {
    let m = FeatureMatrix::load(features)?;
    let (m, _) = with_selection(&m, selection)?;
    let opts = CvOptions {
        rfe_per_fold: (cfg.cv.rfe_per_fold > 0).then_some(cfg.cv.rfe_per_fold),
    };
    let kind = first_model(cfg)?;
    let summary = cross_validate(&kind, &m, cfg.cv.k, cfg.seed, &opts)?;
    out.text("cv.csv", &summary.to_csv())?;
    out.text("cv.txt", &format!("model {}\n{}", kind.label(), summary.text()))
}

/// One accuracy/precision/recall/F1 grid over filters and models.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareGrid {
    pub filters: Vec<FilterCombination>,
    pub models: Vec<ModelKind>,
    /// `cells[f][m]`.
    pub cells: Vec<Vec<EvalReport>>,
}

impl CompareGrid {
    fn mean_of(&self, f: usize, get: impl Fn(&EvalReport) -> f64) -> f64 {
        let row = &self.cells[f];
        row.iter().map(get).sum::<f64>() / row.len() as f64
    }

    /// Rows are filters in the given order, columns are models plus the row average.
    pub fn accuracy_csv(&self) -> String {
        let mut s = String::from("method");
        for m in &self.models {
            let _ = write!(s, ",{}", m.label());
        }
        s.push_str(",Average\n");
        for (f, combo) in self.filters.iter().enumerate() {
            s.push_str(&combo.label());
            for r in &self.cells[f] {
                let _ = write!(s, ",{}", r.accuracy);
            }
            let _ = writeln!(s, ",{}", self.mean_of(f, |r| r.accuracy));
        }
        s
    }

    /// Per-filter weighted precision, recall and F1, averaged over models.
    pub fn prf_csv(&self) -> String {
        let mut s = String::from("method,precision,recall,f1\n");
        for (f, combo) in self.filters.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                combo.label(),
                self.mean_of(f, |r| r.precision),
                self.mean_of(f, |r| r.recall),
                self.mean_of(f, |r| r.f1)
            );
        }
        s
    }

    pub fn text(&self) -> String {
        let width = self.filters.iter().map(|c| c.label().len()).max().unwrap_or(6).max(6) + 2;
        let mut s = String::from("Accuracy (%)\n");
        let _ = write!(s, "{:<width$}", "method");
        for m in &self.models {
            let _ = write!(s, "{:>16}", m.label());
        }
        let _ = writeln!(s, "{:>10}", "Average");
        for (f, combo) in self.filters.iter().enumerate() {
            let _ = write!(s, "{:<width$}", combo.label());
            for r in &self.cells[f] {
                let _ = write!(s, "{:>16.2}", 100.0 * r.accuracy);
            }
            let _ = writeln!(s, "{:>10.2}", 100.0 * self.mean_of(f, |r| r.accuracy));
        }
        let _ = writeln!(s, "\nAverage over models (%)");
        let _ = writeln!(s, "{:<width$}{:>10}{:>10}{:>10}", "method", "precision", "recall", "f1");
        for (f, combo) in self.filters.iter().enumerate() {
            let _ = writeln!(
                s,
                "{:<width$}{:>10.2}{:>10.2}{:>10.2}",
                combo.label(),
                100.0 * self.mean_of(f, |r| r.precision),
                100.0 * self.mean_of(f, |r| r.recall),
                100.0 * self.mean_of(f, |r| r.f1)
            );
        }
        let _ = writeln!(s, "\nfilter specs");
        for combo in &self.filters {
            let _ = writeln!(s, "  {:<width$}{combo}", combo.label());
        }
        s
    }
}

/// Holdout scores of every model on every filter combination. Each filter
/// is preprocessed, featurized, split and feature-selected once; the model
/// cells then run in parallel. The result does not depend on scheduling.
pub fn compare_grid(
    rec: &crate::data_model::ImuRecording,
    track: &crate::data_model::LabelTrack,
    cfg: &RunConfig,
    filters: &[FilterCombination],
    models: &[ModelKind],
) -> Result<CompareGrid> {
    if filters.is_empty() || models.is_empty() {
        return Err(Error::InvalidParameter("compare needs at least one filter and one model".into()));
    }
    let hp = cfg.split.holdout_params();
    let prepared = filters
        .par_iter()
        .map(|combo| {
            let (m, _) = recording_features(rec, track, &cfg.outlier, combo, &cfg.window)?;
            let (tr, te) = split_holdout(&m.y(), hp.train_fraction, hp.stratified, cfg.seed)?;
            let (tr, te) = (m.subset(&tr), m.subset(&te));
            match hp.select.filter(|&t| t < m.n_features()) {
                Some(t) => {
                    let sel = rfe_select(&tr.x(), &tr.y(), t, cfg.seed)?;
                    Ok((tr.select_columns(&sel)?, te.select_columns(&sel)?))
                }
                None => Ok((tr, te)),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..filters.len())
        .flat_map(|f| (0..models.len()).map(move |m| (f, m)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(f, m)| fit_and_score(&models[m], &prepared[f].0, &prepared[f].1, None, cfg.seed))
        .collect::<Result<Vec<_>>>()?;
    let mut it = reports.into_iter();
    let cells = (0..filters.len())
        .map(|_| it.by_ref().take(models.len()).collect())
        .collect();
    Ok(CompareGrid {
        filters: filters.to_vec(),
        models: models.to_vec(),
        cells,
    })
}

/// IQR versus Hampel cleaning of the unfiltered recording, scored with one
/// model. Returns `(method, report)` pairs; reports carry the drop rate.
pub fn compare_outliers(
    rec: &crate::data_model::ImuRecording,
    track: &crate::data_model::LabelTrack,
    cfg: &RunConfig,
    model: &ModelKind,
) -> Result<Vec<(&'static str, EvalReport)>> {
    let hp = cfg.split.holdout_params();
    [("IQR", OutlierMethod::Iqr), ("Hampel", OutlierMethod::Hampel)]
        .par_iter()
        .map(|&(name, method)| {
            let oc = OutlierConfig { method, ..cfg.outlier };
            let (m, pre) = recording_features(
                rec,
                track,
                &oc,
                &FilterCombination::uniform(crate::filters::FilterKind::Raw),
                &cfg.window,
            )?;
            let mut r = crate::pipeline::holdout(model, &m, &hp, cfg.seed)?;
            r.drop_rate_pct = Some(pre.outliers.drop_rate_pct);
            Ok((name, r))
        })
        .collect()
}

fn outliers_csv(rows: &[(&str, EvalReport)]) -> String {
    let mut s = String::from("metric");
    for (name, _) in rows {
        let _ = write!(s, ",{name}");
    }
    s.push('\n');
    let metrics: [(&str, fn(&EvalReport) -> f64); 5] = [
        ("accuracy", |r| r.accuracy),
        ("precision", |r| r.precision),
        ("recall", |r| r.recall),
        ("f1", |r| r.f1),
        ("drop_rate_pct", |r| r.drop_rate_pct.unwrap_or(0.0)),
    ];
    for (label, get) in metrics {
        s.push_str(label);
        for (_, r) in rows {
            let _ = write!(s, ",{}", get(r));
        }
        s.push('\n');
    }
    s
}

fn cmd_compare(cfg: &RunConfig, recording: &Path, labels: &Path, out: &mut Outputs) -> Result<()> {
    let rec = load_recording(recording, cfg.sample_rate_hz)?;
    let track = load_labels(labels)?;
    let filters = cfg.compare_filters()?;
    let models = cfg.model_kinds()?;
    let grid = compare_grid(&rec, &track, cfg, &filters, &models)?;
    out.text("compare_accuracy.csv", &grid.accuracy_csv())?;
    out.text("compare_prf.csv", &grid.prf_csv())?;
    let mut text = grid.text();
    if cfg.compare.outlier_table {
        let rows = compare_outliers(&rec, &track, cfg, &models[0])?;
        let csv = outliers_csv(&rows);
        out.text("compare_outliers.csv", &csv)?;
        let _ = writeln!(text, "\nOutlier handling, unfiltered data, {}", models[0].label());
        text.push_str(&csv);
    }
    out.text("compare.txt", &text)
}

/// Process entry point: runs the command and maps errors to exit code 1.
pub fn main_entry() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            std::process::ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::FAILURE
        }
    }
}
