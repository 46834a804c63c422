//! Train every model on the same features and compare holdout scores.

use behavior_filter::classifiers::ModelKind;
use behavior_filter::features::WindowSpec;
use behavior_filter::outlier::OutlierConfig;
use behavior_filter::pipeline::{holdout, recording_features, HoldoutParams};
use behavior_filter::router::FilterCombination;
use behavior_filter::synth::{generate, SynthConfig};

fn main() -> behavior_filter::Result<()> {
    let truth = generate(&SynthConfig {
        duration_s: 600.0,
        seed: 3,
        ..SynthConfig::default()
    })?;
    let combo: FilterCombination = "wavelet+lpf".parse()?;
    let (m, _) = recording_features(&truth.noisy, &truth.labels, &OutlierConfig::hampel(), &combo, &WindowSpec::default())?;
    let params = HoldoutParams::default();
    for kind in ModelKind::all_defaults() {
        let r = holdout(&kind, &m, &params, 3)?;
        println!("{:<16} accuracy {:.4}  f1 {:.4}", kind.label(), r.accuracy, r.f1);
    }

    let r = holdout(&ModelKind::random_forest(), &m, &params, 3)?;
    println!("\nRF per class\n{}", r.text_table());
    Ok(())
}
