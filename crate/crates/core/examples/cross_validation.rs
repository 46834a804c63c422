//! Stratified 10-fold cross-validation of a random forest on
//! behavior-routed features.

use behavior_filter::classifiers::ModelKind;
use behavior_filter::evaluation::{cross_validate, CvOptions};
use behavior_filter::features::WindowSpec;
use behavior_filter::outlier::OutlierConfig;
use behavior_filter::pipeline::recording_features;
use behavior_filter::router::FilterCombination;
use behavior_filter::synth::{generate, SynthConfig};

fn main() -> behavior_filter::Result<()> {
    let truth = generate(&SynthConfig {
        duration_s: 600.0,
        seed: 8,
        ..SynthConfig::default()
    })?;
    let combo: FilterCombination = "behavior:wavelet:lpf".parse()?;
    let (m, _) = recording_features(&truth.noisy, &truth.labels, &OutlierConfig::hampel(), &combo, &WindowSpec::default())?;
    let summary = cross_validate(&ModelKind::random_forest(), &m, 10, 8, &CvOptions::default())?;
    print!("{}", summary.text());
    for (i, f) in summary.folds.iter().enumerate() {
        println!("fold {:>2}: {:.4}", i + 1, f.accuracy);
    }
    Ok(())
}
