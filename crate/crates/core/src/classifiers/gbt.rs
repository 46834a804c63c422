//! Multiclass gradient-boosted regression trees on the softmax log-loss.
//!
//! Each round fits one depth-limited regression tree per class to the
//! negative gradient `1[y = k] - p_k`, sets each leaf to the one-step Newton
//! value `(K-1)/K * sum r / sum |r|(1-|r|)`, and adds it with the learning
//! rate. If a round would raise the training loss, its step is halved (up
//! to a fixed number of times) or dropped, so the training loss never rises.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{grow, Criterion, Node, SortedColumns, Tree, TreeParams};

const MAX_HALVINGS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self {
            rounds: 100,
            max_depth: 3,
            learning_rate: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gbt {
    pub init: Vec<f64>,
    /// `rounds[r][k]`: the class-`k` tree of round `r`, leaf values already scaled.
    pub rounds: Vec<Vec<Tree>>,
    /// Mean training log-loss before the first round and after each round.
    pub train_loss: Vec<f64>,
}

pub(crate) fn softmax_in_place(v: &mut [f64]) {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for x in v.iter_mut() {
        *x = (*x - m).exp();
        s += *x;
    }
    v.iter_mut().for_each(|x| *x /= s);
}

fn log_loss(scores: &[Vec<f64>], y: &[usize]) -> f64 {
    let n = scores.len() as f64;
    scores
        .iter()
        .zip(y)
        .map(|(f, &yi)| {
            let m = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + f.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            lse - f[yi]
        })
        .sum::<f64>()
        / n
}

pub fn fit_gbt(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: &GbtParams, seed: u64) -> Gbt {
    let n = x.len();
    let k = n_classes;
    let sorted = SortedColumns::new(x);
    let weights = vec![1u32; n];
    let tree_params = TreeParams {
        max_depth: Some(params.max_depth),
        min_samples_split: 2,
        max_features: None,
    };
    // trees use every feature, so the generator is never consulted; kept for the interface
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut counts = vec![0.0; k];
    for &yi in y {
        counts[yi] += 1.0;
    }
    let init: Vec<f64> = counts
        .iter()
        .map(|c| if *c > 0.0 { (c / n as f64).ln() } else { -30.0 })
        .collect();
    let mut scores: Vec<Vec<f64>> = vec![init.clone(); n];
    let mut loss = log_loss(&scores, y);
    let mut train_loss = vec![loss];
    let mut rounds = Vec::with_capacity(params.rounds);
    let newton_scale = (k as f64 - 1.0) / k as f64;

    for _ in 0..params.rounds {
        let probs: Vec<Vec<f64>> = scores
            .iter()
            .map(|f| {
                let mut p = f.clone();
                softmax_in_place(&mut p);
                p
            })
            .collect();
        let mut round_trees = Vec::with_capacity(k);
        let mut steps = vec![vec![0.0; k]; n];
        for class in 0..k {
            let resid: Vec<f64> = (0..n)
                .map(|i| f64::from(u8::from(y[i] == class)) - probs[i][class])
                .collect();
            let mut tree = grow(x, &sorted, &weights, Criterion::Mse { y: &resid }, &tree_params, &mut rng).tree;
            let mut num = vec![0.0; tree.nodes.len()];
            let mut den = vec![0.0; tree.nodes.len()];
            let leaf_of: Vec<usize> = x.iter().map(|row| tree.leaf_index(row)).collect();
            for i in 0..n {
                let r = resid[i];
                num[leaf_of[i]] += r;
                den[leaf_of[i]] += r.abs() * (1.0 - r.abs());
            }
            for (idx, node) in tree.nodes.iter_mut().enumerate() {
                if let Node::Leaf { value } = node {
                    let g = if den[idx] > 1e-12 { newton_scale * num[idx] / den[idx] } else { 0.0 };
                    *value = vec![g];
                }
            }
            for i in 0..n {
                steps[i][class] = tree.predict_value(&x[i])[0];
            }
            round_trees.push(tree);
        }

        let mut shrink = params.learning_rate;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let candidate: Vec<Vec<f64>> = scores
                .iter()
                .zip(&steps)
                .map(|(f, s)| f.iter().zip(s).map(|(a, b)| a + shrink * b).collect())
                .collect();
            let cand_loss = log_loss(&candidate, y);
            if cand_loss <= loss {
                accepted = Some((candidate, cand_loss));
                break;
            }
            shrink *= 0.5;
        }
        if let Some((candidate, cand_loss)) = accepted {
            scores = candidate;
            loss = cand_loss;
            for t in &mut round_trees {
                for node in &mut t.nodes {
                    if let Node::Leaf { value } = node {
                        value[0] *= shrink;
                    }
                }
            }
            rounds.push(round_trees);
        }
        train_loss.push(loss);
    }

    Gbt {
        init,
        rounds,
        train_loss,
    }
}

impl Gbt {
    pub fn raw_scores(&self, row: &[f64]) -> Vec<f64> {
        let mut f = self.init.clone();
        for round in &self.rounds {
            for (class, t) in round.iter().enumerate() {
                f[class] += t.predict_value(row)[0];
            }
        }
        f
    }

    pub fn proba(&self, row: &[f64]) -> Vec<f64> {
        let mut f = self.raw_scores(row);
        softmax_in_place(&mut f);
        f
    }
}
