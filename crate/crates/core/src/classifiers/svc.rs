//! One-vs-rest linear SVM trained with Pegasos subgradient steps on the
//! L2-regularized hinge loss. A constant feature carries the bias.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::argmax_first;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvcParams {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvcParams {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            epochs: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvc {
    /// One weight vector per class; the last entry is the bias.
    pub weights: Vec<Vec<f64>>,
}

fn dot_aug(w: &[f64], row: &[f64]) -> f64 {
    let d = row.len();
    w[..d].iter().zip(row).map(|(a, b)| a * b).sum::<f64>() + w[d]
}

fn pegasos(x: &[Vec<f64>], target: &[f64], params: &SvcParams, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = x[0].len();
    let mut w = vec![0.0; d + 1];
    // w is kept as scale * v so the shrink step is O(1)
    let mut scale = 1.0;
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut t = 0u64;
    for _ in 0..params.epochs {
        order.shuffle(rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (params.lambda * t as f64);
            let margin = target[i] * scale * dot_aug(&w, &x[i]);
            let shrink = 1.0 - eta * params.lambda;
            if shrink <= 0.0 {
                // first step: the regularizer zeroes w exactly
                w.iter_mut().for_each(|v| *v = 0.0);
                scale = 1.0;
            } else {
                scale *= shrink;
            }
            if margin < 1.0 {
                let step = eta * target[i] / scale;
                for (wj, xj) in w.iter_mut().zip(&x[i]) {
                    *wj += step * xj;
                }
                w[d] += step;
            }
            if scale < 1e-9 {
                w.iter_mut().for_each(|v| *v *= scale);
                scale = 1.0;
            }
        }
    }
    w.iter_mut().for_each(|v| *v *= scale);
    w
}

pub fn fit_svc(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: &SvcParams, seed: u64) -> LinearSvc {
    let weights = (0..n_classes)
        .into_par_iter()
        .map(|c| {
            let target: Vec<f64> = y.iter().map(|&yi| if yi == c { 1.0 } else { -1.0 }).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64 + 1);
            pegasos(x, &target, params, &mut rng)
        })
        .collect();
    LinearSvc { weights }
}

impl LinearSvc {
    pub fn decision(&self, row: &[f64]) -> Vec<f64> {
        self.weights.iter().map(|w| dot_aug(w, row)).collect()
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        argmax_first(&self.decision(row))
    }
}
