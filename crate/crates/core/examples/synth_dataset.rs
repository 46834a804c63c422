//! Generate a labelled synthetic recording and write it as CSV.
//!
//! cargo run --example synth_dataset -- [out_dir] [seed]

use std::path::PathBuf;

use behavior_filter::data_model::{write_labels, write_recording};
use behavior_filter::synth::{generate, SynthConfig};

fn main() -> behavior_filter::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "synth_out".into()));
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    std::fs::create_dir_all(&dir).map_err(|e| behavior_filter::Error::Io { path: dir.clone(), source: e })?;

    let cfg = SynthConfig {
        duration_s: 300.0,
        spike_rate: 0.01,
        seed,
        ..SynthConfig::default()
    };
    let truth = generate(&cfg)?;
    write_recording(&truth.noisy, dir.join("recording.csv"))?;
    write_labels(&truth.labels, dir.join("labels.csv"), &[])?;

    println!("{} samples, {} segments, {} spikes", truth.noisy.len(), truth.schedule.len(), truth.spike_indices.len());
    for seg in truth.schedule.iter().take(5) {
        println!("  {:<12} {:5.1} s", seg.behavior, seg.duration_s);
    }
    println!("wrote {}", dir.display());
    Ok(())
}
