use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow, Criterion, SortedColumns, Tree, TreeParams};
use super::argmax_first;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` means `ceil(sqrt(d))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_features: None,
            bootstrap: true,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
    pub n_classes: usize,
}

/// Forest plus mean per-tree normalized impurity importances.
pub struct FittedForest {
    pub forest: Forest,
    pub importances: Vec<f64>,
}

pub fn default_max_features(d: usize) -> usize {
    ((d as f64).sqrt().ceil() as usize).max(1)
}

/// Each tree draws from its own ChaCha stream, so results do not depend on
/// how the trees are scheduled across threads.
pub fn fit_forest(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: &ForestParams, seed: u64) -> FittedForest {
    let n = x.len();
    let d = x.first().map_or(0, Vec::len);
    let sorted = SortedColumns::new(x);
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_split: 2,
        max_features: Some(params.max_features.unwrap_or_else(|| default_max_features(d))),
    };
    let grown: Vec<(Tree, Vec<f64>)> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64 + 1);
            let weights = if params.bootstrap {
                let mut w = vec![0u32; n];
                for _ in 0..n {
                    w[rng.random_range(0..n)] += 1;
                }
                w
            } else {
                vec![1u32; n]
            };
            let g = grow(
                x,
                &sorted,
                &weights,
                Criterion::Gini { y, n_classes },
                &tree_params,
                &mut rng,
            );
            let total: f64 = g.importances.iter().sum();
            let imp = if total > 0.0 {
                g.importances.iter().map(|v| v / total).collect()
            } else {
                vec![0.0; d]
            };
            (g.tree, imp)
        })
        .collect();
    let mut importances = vec![0.0; d];
    for (_, imp) in &grown {
        for (a, b) in importances.iter_mut().zip(imp) {
            *a += b;
        }
    }
    let k = grown.len().max(1) as f64;
    importances.iter_mut().for_each(|v| *v /= k);
    FittedForest {
        forest: Forest {
            trees: grown.into_iter().map(|(t, _)| t).collect(),
            n_classes,
        },
        importances,
    }
}

impl Forest {
    /// Fraction of trees voting for each class.
    pub fn vote_fractions(&self, row: &[f64]) -> Vec<f64> {
        let mut votes = vec![0.0; self.n_classes];
        for t in &self.trees {
            votes[argmax_first(t.predict_value(row))] += 1.0;
        }
        let total = self.trees.len() as f64;
        votes.iter_mut().for_each(|v| *v /= total);
        votes
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        argmax_first(&self.vote_fractions(row))
    }
}
