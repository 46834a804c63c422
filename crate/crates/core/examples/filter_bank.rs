//! Run every filter on a noisy two-tone signal and report how much of the
//! slow tone and of the noise each one keeps.

use behavior_filter::filters::{apply_filter, FilterKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const FS: f64 = 50.0;

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

fn main() -> behavior_filter::Result<()> {
    let n = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let normal = Normal::new(0.0, 0.3).unwrap();
    let clean: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::TAU * 1.0 * i as f64 / FS).sin() + 0.5)
        .collect();
    let noisy: Vec<f64> = clean.iter().map(|v| v + normal.sample(&mut rng)).collect();

    println!("{:<60} {:>10}", "filter", "rms error");
    for kind in FilterKind::all_defaults() {
        let y = apply_filter(&noisy, &kind, FS)?;
        let err: Vec<f64> = y.iter().zip(&clean).map(|(a, b)| a - b).collect();
        println!("{:<60} {:>10.4}", kind.to_string(), rms(&err));
    }

    // parameters can be overridden inline
    let custom: FilterKind = "lpf:cutoff=2,order=6".parse()?;
    let y = apply_filter(&noisy, &custom, FS)?;
    let err: Vec<f64> = y.iter().zip(&clean).map(|(a, b)| a - b).collect();
    println!("{:<60} {:>10.4}", custom.to_string(), rms(&err));
    Ok(())
}
