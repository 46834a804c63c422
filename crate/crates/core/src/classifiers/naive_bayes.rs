use serde::{Deserialize, Serialize};

use super::argmax_first;
use super::gbt::softmax_in_place;

/// Gaussian naive Bayes with per-class means and variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub log_prior: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub vars: Vec<Vec<f64>>,
}

pub fn fit_nb(x: &[Vec<f64>], y: &[usize], n_classes: usize, var_smoothing: f64) -> GaussianNb {
    let n = x.len();
    let d = x[0].len();
    // smoothing is relative to the largest feature variance of the whole set
    let mut max_var: f64 = 0.0;
    for f in 0..d {
        let m = x.iter().map(|r| r[f]).sum::<f64>() / n as f64;
        let v = x.iter().map(|r| (r[f] - m).powi(2)).sum::<f64>() / n as f64;
        max_var = max_var.max(v);
    }
    let eps = var_smoothing * max_var;

    let mut counts = vec![0.0; n_classes];
    let mut means = vec![vec![0.0; d]; n_classes];
    for (row, &c) in x.iter().zip(y) {
        counts[c] += 1.0;
        for (m, v) in means[c].iter_mut().zip(row) {
            *m += v;
        }
    }
    for (m, &cnt) in means.iter_mut().zip(&counts) {
        if cnt > 0.0 {
            m.iter_mut().for_each(|v| *v /= cnt);
        }
    }
    let mut vars = vec![vec![0.0; d]; n_classes];
    for (row, &c) in x.iter().zip(y) {
        for f in 0..d {
            vars[c][f] += (row[f] - means[c][f]).powi(2);
        }
    }
    for (v, &cnt) in vars.iter_mut().zip(&counts) {
        for e in v.iter_mut() {
            *e = if cnt > 0.0 { *e / cnt } else { 0.0 } + eps;
            if *e <= 0.0 {
                *e = f64::MIN_POSITIVE;
            }
        }
    }
    let log_prior = counts
        .iter()
        .map(|c| if *c > 0.0 { (c / n as f64).ln() } else { f64::NEG_INFINITY })
        .collect();
    GaussianNb { log_prior, means, vars }
}

impl GaussianNb {
    pub fn joint_log_likelihood(&self, row: &[f64]) -> Vec<f64> {
        self.log_prior
            .iter()
            .zip(self.means.iter().zip(&self.vars))
            .map(|(lp, (m, v))| {
                let ll: f64 = row
                    .iter()
                    .zip(m.iter().zip(v))
                    .map(|(x, (mu, var))| {
                        -0.5 * (2.0 * std::f64::consts::PI * var).ln() - (x - mu).powi(2) / (2.0 * var)
                    })
                    .sum();
                lp + ll
            })
            .collect()
    }

    pub fn proba(&self, row: &[f64]) -> Vec<f64> {
        let mut j = self.joint_log_likelihood(row);
        softmax_in_place(&mut j);
        j
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        argmax_first(&self.joint_log_likelihood(row))
    }
}
