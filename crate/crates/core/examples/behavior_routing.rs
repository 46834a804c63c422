//! Filter a recording uniformly and behavior-routed, and show what each
//! does to an active and an inactive stretch.

use behavior_filter::data_model::{group_of, ActivityGroup};
use behavior_filter::router::{apply_combination_with_stats, plan_segments, FilterCombination};
use behavior_filter::synth::{generate, SynthConfig};

fn main() -> behavior_filter::Result<()> {
    let truth = generate(&SynthConfig {
        duration_s: 120.0,
        seed: 2,
        ..SynthConfig::default()
    })?;
    let rec = &truth.noisy;
    let plan = plan_segments(rec, &truth.labels);
    println!("{} runs", plan.runs.len());
    for run in plan.runs.iter().take(6) {
        println!("  samples {:>5}..{:<5} {}", run.start, run.end, run.group);
    }

    let clean = truth.clean.channel(0);
    let noisy = rec.channel(0);
    let labels = truth.labels.labels_for(rec);
    for spec in ["uniform:lpf", "uniform:wavelet", "behavior:wavelet:lpf"] {
        let combo: FilterCombination = spec.parse()?;
        let routed = apply_combination_with_stats(rec, &plan, &combo, rec.sample_rate_hz())?;
        let out = routed.recording.channel(0);
        let mut err = [(0.0, 0usize); 2];
        for i in 0..out.len() {
            let g = usize::from(group_of(labels[i]) == ActivityGroup::Inactive);
            err[g].0 += (out[i] - clean[i]).powi(2);
            err[g].1 += 1;
        }
        let rmse = |(s, n): (f64, usize)| (s / n.max(1) as f64).sqrt();
        println!(
            "{:<24} ax rms error active {:.4}, inactive {:.4} (raw {:.4})",
            combo.label(),
            rmse(err[0]),
            rmse(err[1]),
            (noisy.iter().zip(&clean).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / noisy.len() as f64).sqrt()
        );
    }
    Ok(())
}
