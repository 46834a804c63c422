//! Filter-by-model accuracy grid on a few seeds, the same table the
//! `compare` command writes, plus the routed-vs-uniform trend.
//!
//! cargo run --release --example compare_filters -- [n_seeds]

use behavior_filter::classifiers::ModelKind;
use behavior_filter::cli::compare_grid;
use behavior_filter::config::RunConfig;
use behavior_filter::filters::FilterKind;
use behavior_filter::router::FilterCombination;
use behavior_filter::synth::generate;

fn main() -> behavior_filter::Result<()> {
    let n_seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let filters = [
        FilterCombination::uniform(FilterKind::Raw),
        FilterCombination::uniform(FilterKind::lpf()),
        FilterCombination::uniform(FilterKind::wavelet()),
        FilterCombination::behavior(FilterKind::wavelet(), FilterKind::lpf()),
    ];
    let models = [ModelKind::random_forest(), ModelKind::knn(), ModelKind::gaussian_nb()];
    for seed in 0..n_seeds {
        let cfg = RunConfig {
            seed,
            ..RunConfig::default()
        }
        .normalized()?;
        let truth = generate(&cfg.synth_config())?;
        let grid = compare_grid(&truth.noisy, &truth.labels, &cfg, &filters, &models)?;
        println!("seed {seed}");
        print!("{}", grid.accuracy_csv());
        println!();
    }
    Ok(())
}
