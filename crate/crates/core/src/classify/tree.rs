//! Binary decision trees grown by exhaustive threshold search.
//!
//! Splits are scored through [`SplitStats`]: Gini for classification trees,
//! second-order (gradient/hessian) gain for boosting trees.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) enum TreeNode<T> {
    Split { feature: u32, threshold: f64, left: u32, right: u32 },
    Leaf(T),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct Tree<T> {
    nodes: Vec<TreeNode<T>>,
}

impl<T> Tree<T> {
    pub(crate) fn predict(&self, x: &[f64]) -> &T {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf(v) => return v,
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if x[*feature as usize] <= *threshold { *left } else { *right } as usize;
                }
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn depth(&self) -> usize {
        fn walk<T>(t: &Tree<T>, at: usize) -> usize {
            match &t.nodes[at] {
                TreeNode::Leaf(_) => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(t, *left as usize).max(walk(t, *right as usize))
                }
            }
        }
        walk(self, 0)
    }
}

/// Additive sufficient statistics of a set of training rows.
pub(crate) trait SplitStats: Clone {
    fn cleared(&self) -> Self;
    fn push(&mut self, row: usize);
    fn pop(&mut self, row: usize);
    /// Larger is better; split gain is `left + right - parent`.
    fn score(&self) -> f64;
    /// Whether this side may become a child (minimum weight constraints).
    fn admissible(&self) -> bool;
    fn is_pure(&self) -> bool {
        false
    }
}

/// Gini statistics. `score` is `Σ_c n_c² / n`, so the gain equals the
/// weighted decrease in Gini impurity.
#[derive(Clone)]
pub(crate) struct GiniStats<'a> {
    labels: &'a [usize],
    counts: Vec<f64>,
    total: f64,
}

impl<'a> GiniStats<'a> {
    pub(crate) fn new(labels: &'a [usize], n_classes: usize) -> Self {
        GiniStats { labels, counts: vec![0.0; n_classes], total: 0.0 }
    }

    pub(crate) fn counts(&self) -> &[f64] {
        &self.counts
    }
}

impl SplitStats for GiniStats<'_> {
    fn cleared(&self) -> Self {
        GiniStats { labels: self.labels, counts: vec![0.0; self.counts.len()], total: 0.0 }
    }
    fn push(&mut self, row: usize) {
        self.counts[self.labels[row]] += 1.0;
        self.total += 1.0;
    }
    fn pop(&mut self, row: usize) {
        self.counts[self.labels[row]] -= 1.0;
        self.total -= 1.0;
    }
    fn score(&self) -> f64 {
        if self.total == 0.0 {
            return 0.0;
        }
        self.counts.iter().map(|c| c * c).sum::<f64>() / self.total
    }
    fn admissible(&self) -> bool {
        self.total >= 1.0
    }
    fn is_pure(&self) -> bool {
        self.counts.iter().filter(|&&c| c > 0.0).count() <= 1
    }
}

/// Gradient/hessian sums with L2 leaf penalty `lambda`.
#[derive(Clone)]
pub(crate) struct NewtonStats<'a> {
    grad: &'a [f64],
    hess: &'a [f64],
    g: f64,
    h: f64,
    lambda: f64,
    min_child_weight: f64,
}

impl<'a> NewtonStats<'a> {
    pub(crate) fn new(grad: &'a [f64], hess: &'a [f64], lambda: f64, min_child_weight: f64) -> Self {
        NewtonStats { grad, hess, g: 0.0, h: 0.0, lambda, min_child_weight }
    }

    pub(crate) fn leaf_value(&self) -> f64 {
        -self.g / (self.h + self.lambda)
    }
}

impl SplitStats for NewtonStats<'_> {
    fn cleared(&self) -> Self {
        NewtonStats { g: 0.0, h: 0.0, ..self.clone() }
    }
    fn push(&mut self, row: usize) {
        self.g += self.grad[row];
        self.h += self.hess[row];
    }
    fn pop(&mut self, row: usize) {
        self.g -= self.grad[row];
        self.h -= self.hess[row];
    }
    fn score(&self) -> f64 {
        self.g * self.g / (self.h + self.lambda)
    }
    fn admissible(&self) -> bool {
        self.h >= self.min_child_weight
    }
}

pub(crate) struct GrowParams {
    pub max_depth: usize,
    /// Features examined before accepting the best split found so far.
    pub min_features: usize,
    pub min_gain: f64,
}

struct Best {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Grows a tree on `samples` (row indices into `x`, repeats allowed).
///
/// `feature_order` is called once per node and returns the features to try
/// in order; the search stops after `min_features` of them once a split
/// with positive gain has been found.
pub(crate) fn grow<S, T>(
    x: &[Vec<f64>],
    samples: Vec<usize>,
    proto: &S,
    params: &GrowParams,
    feature_order: &mut dyn FnMut() -> Vec<usize>,
    leaf: &dyn Fn(&S) -> T,
) -> Tree<T>
where
    S: SplitStats,
{
    let mut nodes: Vec<TreeNode<T>> = Vec::new();
    let mut scratch: Vec<(f64, usize)> = Vec::with_capacity(samples.len());
    // (samples, depth, slot to patch in the parent)
    let mut stack: Vec<(Vec<usize>, usize, Option<(usize, bool)>)> = vec![(samples, 0, None)];

    while let Some((rows, depth, parent)) = stack.pop() {
        let mut stats = proto.cleared();
        for &r in &rows {
            stats.push(r);
        }
        let index = nodes.len();
        if let Some((p, is_left)) = parent {
            if let TreeNode::Split { left, right, .. } = &mut nodes[p] {
                if is_left {
                    *left = index as u32;
                } else {
                    *right = index as u32;
                }
            }
        }

        let best = if depth >= params.max_depth || rows.len() < 2 || stats.is_pure() {
            None
        } else {
            find_split(x, &rows, &stats, params, feature_order(), &mut scratch)
        };

        match best {
            None => nodes.push(TreeNode::Leaf(leaf(&stats))),
            Some(b) => {
                nodes.push(TreeNode::Split {
                    feature: b.feature as u32,
                    threshold: b.threshold,
                    left: 0,
                    right: 0,
                });
                let (l, r): (Vec<usize>, Vec<usize>) =
                    rows.into_iter().partition(|&i| x[i][b.feature] <= b.threshold);
                // Right first so the left child is numbered next.
                stack.push((r, depth + 1, Some((index, false))));
                stack.push((l, depth + 1, Some((index, true))));
            }
        }
    }
    Tree { nodes }
}

fn find_split<S: SplitStats>(
    x: &[Vec<f64>],
    rows: &[usize],
    parent: &S,
    params: &GrowParams,
    order: Vec<usize>,
    scratch: &mut Vec<(f64, usize)>,
) -> Option<Best> {
    let base = parent.score();
    let mut best: Option<Best> = None;
    for (tried, &f) in order.iter().enumerate() {
        if tried >= params.min_features && best.is_some() {
            break;
        }
        scratch.clear();
        scratch.extend(rows.iter().map(|&r| (x[r][f], r)));
        scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
        if scratch[0].0 == scratch[scratch.len() - 1].0 {
            continue;
        }
        let mut left = parent.cleared();
        let mut right = parent.clone();
        for k in 0..scratch.len() - 1 {
            let (v, r) = scratch[k];
            left.push(r);
            right.pop(r);
            let next = scratch[k + 1].0;
            if v == next || !left.admissible() || !right.admissible() {
                continue;
            }
            let gain = left.score() + right.score() - base;
            if gain > params.min_gain && best.as_ref().is_none_or(|b| gain > b.gain) {
                let mut threshold = v + (next - v) / 2.0;
                if threshold >= next {
                    threshold = v;
                }
                best = Some(Best { gain, feature: f, threshold });
            }
        }
    }
    best
}
