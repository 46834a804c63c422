use serde::{Deserialize, Serialize};

use super::argmax_first;

/// Brute-force k-nearest-neighbors over stored training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<usize>,
    pub n_classes: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

impl Knn {
    /// Vote counts of the `k` nearest rows. Equal distances keep the lower
    /// training index.
    pub fn votes(&self, row: &[f64]) -> Vec<f64> {
        let mut d: Vec<(f64, usize)> = self.x.iter().enumerate().map(|(i, r)| (sq_dist(r, row), i)).collect();
        let k = self.k.min(d.len());
        d.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0.0; self.n_classes];
        for &(_, i) in &d[..k] {
            votes[self.y[i]] += 1.0;
        }
        votes
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        argmax_first(&self.votes(row))
    }
}
