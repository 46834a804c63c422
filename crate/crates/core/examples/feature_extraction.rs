//! Window a synthetic recording, extract the 104 features per window and
//! keep the 20 most useful ones.

use behavior_filter::features::{featurize_recording, rfe_select, WindowSpec};
use behavior_filter::synth::{generate, SynthConfig};

fn main() -> behavior_filter::Result<()> {
    let truth = generate(&SynthConfig {
        duration_s: 300.0,
        seed: 6,
        ..SynthConfig::default()
    })?;
    let m = featurize_recording(&truth.noisy, &truth.labels, &WindowSpec::default())?;
    println!("{} windows x {} features", m.n_rows(), m.n_features());
    let first = &m.rows[0];
    println!("first window ({}, t={} ms):", first.label, first.window_start_ms);
    for (name, v) in m.feature_names.iter().zip(&first.values).take(8) {
        println!("  {name:<16} {v:>10.4}");
    }

    let keep = rfe_select(&m.x(), &m.y(), 20, 0)?;
    let names: Vec<&str> = keep.iter().map(|&i| m.feature_names[i].as_str()).collect();
    println!("kept: {}", names.join(", "));
    Ok(())
}
