//! Inject spikes into a synthetic recording and compare IQR and Hampel
//! cleaning against the known spike positions.

use behavior_filter::outlier::{clean, flagged_samples, OutlierConfig};
use behavior_filter::synth::{generate, SynthConfig};

fn main() -> behavior_filter::Result<()> {
    let truth = generate(&SynthConfig {
        duration_s: 300.0,
        spike_rate: 0.02,
        spike_magnitude: 8.0,
        seed: 4,
        ..SynthConfig::default()
    })?;
    let n = truth.noisy.len();
    println!("{} samples, {} spikes", n, truth.spike_indices.len());

    for cfg in [OutlierConfig::iqr(), OutlierConfig::hampel()] {
        let flags = flagged_samples(&truth.noisy, &cfg)?;
        let caught = truth.spike_indices.iter().filter(|&&i| flags[i]).count();
        let (_, report) = clean(&truth.noisy, &cfg)?;
        println!(
            "{:?}: flagged {:.2}% of samples, caught {}/{} spikes",
            cfg.method,
            report.drop_rate_pct,
            caught,
            truth.spike_indices.len()
        );
    }
    Ok(())
}
