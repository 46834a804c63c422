//! CART trees grown level by level over presorted feature columns.
//!
//! Every level sweeps each feature's sorted sample order once, so the cost
//! per level is O(features * samples) regardless of how many nodes are open.
//! Candidate thresholds are midpoints between consecutive distinct values of
//! a node; ties in gain keep the lowest feature index, then the lowest
//! threshold. Samples with `x <= threshold` go left.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Feature columns sorted once per training set.
#[derive(Debug, Clone)]
pub struct SortedColumns {
    order: Vec<Vec<u32>>,
}

impl SortedColumns {
    pub fn new(x: &[Vec<f64>]) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let order = (0..d)
            .map(|f| {
                let mut idx: Vec<u32> = (0..x.len() as u32).collect();
                idx.sort_by(|&a, &b| x[a as usize][f].total_cmp(&x[b as usize][f]));
                idx
            })
            .collect();
        Self { order }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Criterion<'a> {
    Gini { y: &'a [usize], n_classes: usize },
    Mse { y: &'a [f64] },
}

impl Criterion<'_> {
    fn stride(&self) -> usize {
        match self {
            Criterion::Gini { n_classes, .. } => *n_classes,
            Criterion::Mse { .. } => 3,
        }
    }

    fn add(&self, stats: &mut [f64], sample: usize, w: f64) {
        match self {
            Criterion::Gini { y, .. } => stats[y[sample]] += w,
            Criterion::Mse { y } => {
                let v = y[sample];
                stats[0] += w;
                stats[1] += w * v;
                stats[2] += w * v * v;
            }
        }
    }

    fn weight(&self, stats: &[f64]) -> f64 {
        match self {
            Criterion::Gini { .. } => stats.iter().sum(),
            Criterion::Mse { .. } => stats[0],
        }
    }

    /// Node impurity times node weight (Gini: n - sum c^2 / n; MSE: SSE).
    fn weighted_impurity(&self, stats: &[f64]) -> f64 {
        let w = self.weight(stats);
        if w <= 0.0 {
            return 0.0;
        }
        match self {
            Criterion::Gini { .. } => w - stats.iter().map(|c| c * c).sum::<f64>() / w,
            Criterion::Mse { .. } => (stats[2] - stats[1] * stats[1] / w).max(0.0),
        }
    }

    fn is_pure(&self, stats: &[f64]) -> bool {
        match self {
            Criterion::Gini { .. } => stats.iter().filter(|&&c| c > 0.0).count() <= 1,
            Criterion::Mse { .. } => {
                let scale = 1.0 + stats[2].abs();
                self.weighted_impurity(stats) <= 1e-12 * scale
            }
        }
    }

    fn leaf_value(&self, stats: &[f64]) -> Vec<f64> {
        let w = self.weight(stats);
        match self {
            Criterion::Gini { .. } => stats.iter().map(|c| c / w).collect(),
            Criterion::Mse { .. } => vec![stats[1] / w],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features examined per node; `None` means all.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_split: 2,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Class distribution (classification) or `[value]` (regression).
    Leaf { value: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

/// A grown tree plus the total impurity decrease credited to each feature,
/// divided by the total training weight.
#[derive(Debug, Clone)]
pub struct GrownTree {
    pub tree: Tree,
    pub importances: Vec<f64>,
}

impl Tree {
    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[*feature] <= *threshold { *left } else { *right },
                Node::Leaf { .. } => return i,
            }
        }
    }

    pub fn predict_value(&self, row: &[f64]) -> &[f64] {
        match &self.nodes[self.leaf_index(row)] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!("leaf_index always ends at a leaf"),
        }
    }

    pub fn set_leaf_value(&mut self, index: usize, v: Vec<f64>) {
        if let Node::Leaf { value } = &mut self.nodes[index] {
            *value = v;
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

const NONE: u32 = u32::MAX;

struct Open {
    node: usize,
    depth: usize,
    stats: Vec<f64>,
    /// Candidate features, `None` while the node is not split this level.
    features: Option<Vec<bool>>,
    best: Option<(f64, usize, f64)>,
}

/// Grow one tree. `weights[i]` is the multiplicity of sample `i` (0 = unused).
pub fn grow<R: Rng>(
    x: &[Vec<f64>],
    sorted: &SortedColumns,
    weights: &[u32],
    crit: Criterion<'_>,
    params: &TreeParams,
    rng: &mut R,
) -> GrownTree {
    let n = x.len();
    let d = sorted.order.len();
    let stride = crit.stride();
    let mtry = params.max_features.unwrap_or(d).clamp(1, d.max(1));

    let mut root_stats = vec![0.0; stride];
    let mut node_of = vec![NONE; n];
    let mut total_weight = 0.0;
    for i in 0..n {
        if weights[i] > 0 {
            crit.add(&mut root_stats, i, f64::from(weights[i]));
            node_of[i] = 0;
            total_weight += f64::from(weights[i]);
        }
    }

    let mut nodes = vec![Node::Leaf {
        value: crit.leaf_value(&root_stats),
    }];
    let mut importances = vec![0.0; d];
    let mut open = vec![Open {
        node: 0,
        depth: 0,
        stats: root_stats,
        features: None,
        best: None,
    }];

    let mut left = Vec::new();
    let mut last = Vec::new();
    while !open.is_empty() {
        // choose which open nodes try to split, and on which features
        for o in open.iter_mut() {
            let w = crit.weight(&o.stats);
            let depth_ok = params.max_depth.is_none_or(|m| o.depth < m);
            if depth_ok && w >= params.min_samples_split as f64 && !crit.is_pure(&o.stats) {
                let mut mask = vec![false; d];
                if mtry >= d {
                    mask.iter_mut().for_each(|m| *m = true);
                } else {
                    for f in sample_indices(rng, d, mtry) {
                        mask[f] = true;
                    }
                }
                o.features = Some(mask);
            }
        }
        let k = open.len();
        left.clear();
        left.resize(k * stride, 0.0);
        last.clear();
        last.resize(k, f64::NAN);
        let parent_imp: Vec<f64> = open.iter().map(|o| crit.weighted_impurity(&o.stats)).collect();
        let mut right = vec![0.0; stride];

        for f in 0..d {
            if !open.iter().any(|o| o.features.as_ref().is_some_and(|m| m[f])) {
                continue;
            }
            left.iter_mut().for_each(|v| *v = 0.0);
            last.iter_mut().for_each(|v| *v = f64::NAN);
            for &s in &sorted.order[f] {
                let s = s as usize;
                let j = node_of[s];
                if j == NONE {
                    continue;
                }
                let j = j as usize;
                let o = &mut open[j];
                match &o.features {
                    Some(m) if m[f] => {}
                    _ => continue,
                }
                let v = x[s][f];
                let prev = last[j];
                let lstats = &mut left[j * stride..(j + 1) * stride];
                if !prev.is_nan() && v > prev {
                    for (r, (t, l)) in right.iter_mut().zip(o.stats.iter().zip(lstats.iter())) {
                        *r = t - l;
                    }
                    let gain = parent_imp[j] - crit.weighted_impurity(lstats) - crit.weighted_impurity(&right);
                    if o.best.is_none_or(|(g, _, _)| gain > g) {
                        let mut thr = prev + (v - prev) / 2.0;
                        if thr >= v {
                            thr = prev;
                        }
                        o.best = Some((gain, f, thr));
                    }
                }
                crit.add(lstats, s, f64::from(weights[s]));
                last[j] = v;
            }
        }

        // materialize splits
        let mut next: Vec<Open> = Vec::new();
        let mut child_of: Vec<Option<(usize, usize, usize, f64)>> = vec![None; k];
        for (j, o) in open.iter().enumerate() {
            if let Some((gain, f, thr)) = o.best {
                let l_id = nodes.len();
                let r_id = l_id + 1;
                nodes.push(Node::Leaf { value: Vec::new() });
                nodes.push(Node::Leaf { value: Vec::new() });
                nodes[o.node] = Node::Split {
                    feature: f,
                    threshold: thr,
                    left: l_id,
                    right: r_id,
                };
                importances[f] += gain.max(0.0);
                let l_open = next.len();
                for id in [l_id, r_id] {
                    next.push(Open {
                        node: id,
                        depth: o.depth + 1,
                        stats: vec![0.0; stride],
                        features: None,
                        best: None,
                    });
                }
                child_of[j] = Some((l_open, l_open + 1, f, thr));
            }
        }
        for s in 0..n {
            let j = node_of[s];
            if j == NONE {
                continue;
            }
            match child_of[j as usize] {
                Some((l, r, f, thr)) => {
                    let c = if x[s][f] <= thr { l } else { r };
                    crit.add(&mut next[c].stats, s, f64::from(weights[s]));
                    node_of[s] = c as u32;
                }
                None => node_of[s] = NONE,
            }
        }
        for o in &next {
            nodes[o.node] = Node::Leaf {
                value: crit.leaf_value(&o.stats),
            };
        }
        open = next;
    }

    if total_weight > 0.0 {
        importances.iter_mut().for_each(|v| *v /= total_weight);
    }
    GrownTree {
        tree: Tree { nodes },
        importances,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fit(x: &[Vec<f64>], y: &[usize], k: usize) -> GrownTree {
        let sorted = SortedColumns::new(x);
        let w = vec![1; x.len()];
        grow(
            x,
            &sorted,
            &w,
            Criterion::Gini { y, n_classes: k },
            &TreeParams::default(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
    }

    #[test]
    fn solves_xor_with_zero_gain_first_split() {
        let x = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let y = [0, 1, 1, 0];
        let g = fit(&x, &y, 2);
        for (row, &label) in x.iter().zip(&y) {
            let p = g.tree.predict_value(row);
            assert_eq!(p[label], 1.0);
        }
        // first split has zero gain: lowest feature, lowest threshold
        assert_eq!(
            g.tree.nodes[0],
            Node::Split { feature: 0, threshold: 0.5, left: 1, right: 2 }
        );
    }

    #[test]
    fn perfect_split_importance() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![(i % 3) as f64, i as f64]).collect();
        let y: Vec<usize> = (0..10).map(|i| usize::from(i >= 5)).collect();
        let g = fit(&x, &y, 2);
        assert_eq!(g.tree.depth(), 1);
        assert_eq!(g.importances[0], 0.0);
        // gini 0.5 removed completely
        assert!((g.importances[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn regression_depth_limit() {
        let x: Vec<Vec<f64>> = (0..32).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..32).map(|i| (i * i) as f64).collect();
        let sorted = SortedColumns::new(&x);
        let g = grow(
            &x,
            &sorted,
            &vec![1; 32],
            Criterion::Mse { y: &y },
            &TreeParams { max_depth: Some(3), ..TreeParams::default() },
            &mut ChaCha8Rng::seed_from_u64(0),
        );
        assert_eq!(g.tree.depth(), 3);
        assert_eq!(g.tree.n_leaves(), 8);
        let mean_all: f64 = y.iter().sum::<f64>() / 32.0;
        let leaf_mean: f64 = x.iter().map(|r| g.tree.predict_value(r)[0]).sum::<f64>() / 32.0;
        assert!((mean_all - leaf_mean).abs() < 1e-9);
    }

    #[test]
    fn weights_act_as_multiplicity() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0]];
        let y = [0, 1, 1];
        let sorted = SortedColumns::new(&x);
        let g = grow(
            &x,
            &sorted,
            &[3, 0, 1],
            Criterion::Gini { y: &y, n_classes: 2 },
            &TreeParams::default(),
            &mut ChaCha8Rng::seed_from_u64(0),
        );
        // the unused sample at 1.0 does not influence the threshold
        assert_eq!(
            g.tree.nodes[0],
            Node::Split { feature: 0, threshold: 1.0, left: 1, right: 2 }
        );
    }
}
