//! Recursive feature elimination ranked by random-forest impurity importance.

use crate::classifiers::forest::{fit_forest, ForestParams};
use crate::error::{Error, Result};

pub const DEFAULT_TARGET: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfeParams {
    pub target: usize,
    /// Fraction of the remaining features dropped per round (at least one).
    pub step_fraction: f64,
    pub forest: ForestParams,
}

impl Default for RfeParams {
    fn default() -> Self {
        Self {
            target: DEFAULT_TARGET,
            step_fraction: 0.1,
            forest: ForestParams::default(),
        }
    }
}

/// Default elimination down to `target` features.
pub fn rfe_select(x: &[Vec<f64>], y: &[usize], target: usize, seed: u64) -> Result<Vec<usize>> {
    rfe_select_with(
        x,
        y,
        &RfeParams {
            target,
            ..RfeParams::default()
        },
        seed,
    )
}

/// Returns the surviving column indices in ascending order. Among equally
/// unimportant features the higher index is dropped first.
pub fn rfe_select_with(x: &[Vec<f64>], y: &[usize], params: &RfeParams, seed: u64) -> Result<Vec<usize>> {
    let d = x.first().map(Vec::len).ok_or(Error::EmptyMatrix)?;
    if params.target == 0 || params.target > d {
        return Err(Error::TooFewFeatures {
            target: params.target,
            available: d,
        });
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let mut classes = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let yi: Vec<usize> = y.iter().map(|c| classes.binary_search(c).unwrap()).collect();

    let mut remaining: Vec<usize> = (0..d).collect();
    while remaining.len() > params.target {
        let sub: Vec<Vec<f64>> = x
            .iter()
            .map(|row| remaining.iter().map(|&j| row[j]).collect())
            .collect();
        let imp = fit_forest(&sub, &yi, classes.len(), &params.forest, seed).importances;
        let n_drop = ((remaining.len() as f64 * params.step_fraction).ceil() as usize)
            .max(1)
            .min(remaining.len() - params.target);
        let mut order: Vec<usize> = (0..remaining.len()).collect();
        order.sort_by(|&a, &b| imp[a].total_cmp(&imp[b]).then(b.cmp(&a)));
        let mut drop = vec![false; remaining.len()];
        for &pos in &order[..n_drop] {
            drop[pos] = true;
        }
        remaining = remaining
            .iter()
            .zip(&drop)
            .filter(|(_, &dropped)| !dropped)
            .map(|(&j, _)| j)
            .collect();
    }
    Ok(remaining)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_when_target_is_width() {
        let x = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 2.0]];
        assert_eq!(rfe_select(&x, &[0, 1], 3, 0).unwrap(), vec![0, 1, 2]);
        assert!(matches!(
            rfe_select(&x, &[0, 1], 4, 0),
            Err(Error::TooFewFeatures { target: 4, available: 3 })
        ));
        assert!(matches!(rfe_select(&x, &[1, 1], 2, 0), Err(Error::SingleClass)));
    }

    #[test]
    fn keeps_informative_columns() {
        // columns 0..10 carry the label, 10..30 are noise
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..200 {
            let c = i % 2;
            let mut row: Vec<f64> = (0..10).map(|_| c as f64 + rng.random_range(-0.3..0.3)).collect();
            row.extend((0..20).map(|_| rng.random_range(0.0..1.0)));
            x.push(row);
            y.push(c);
        }
        let params = RfeParams {
            target: 10,
            forest: ForestParams {
                n_trees: 30,
                ..ForestParams::default()
            },
            ..RfeParams::default()
        };
        let sel = rfe_select_with(&x, &y, &params, 1).unwrap();
        assert_eq!(sel.len(), 10);
        assert!(sel.iter().filter(|&&j| j < 10).count() >= 9, "{sel:?}");
        assert_eq!(sel, rfe_select_with(&x, &y, &params, 1).unwrap());
    }
}
