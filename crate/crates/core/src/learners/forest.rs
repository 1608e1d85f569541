//! Batch random forest: CART trees on bootstrap resamples, Gini impurity, majority vote.

use rayon::prelude::*;

use super::stats::argmax;
use super::{check_dim, Prediction};
use crate::error::{Error, Result};
use crate::stream::{Instance, RngHandle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxFeatures {
    /// `floor(sqrt(d))`, at least one.
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    fn resolve(self, d: usize) -> usize {
        match self {
            MaxFeatures::Sqrt => ((d as f64).sqrt().floor() as usize).max(1),
            MaxFeatures::All => d,
            MaxFeatures::Count(k) => k.clamp(1, d),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone)]
enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class: usize,
    },
}

/// A single CART classification tree.
#[derive(Debug, Clone)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    let as_f: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    argmax(&as_f)
}

struct Data<'a> {
    xs: Vec<&'a [f64]>,
    ys: Vec<usize>,
    n_classes: usize,
}

impl DecisionTree {
    /// Grows a tree on the rows listed in `rows` (duplicates allowed).
    fn grow(data: &Data, rows: Vec<usize>, cfg: &ForestConfig, rng: &mut RngHandle) -> Self {
        let d = data.xs[0].len();
        let mtry = cfg.max_features.resolve(d);
        let mut nodes = vec![TreeNode::Leaf { class: 0 }];
        let mut stack = vec![(0usize, rows, 0usize)];
        while let Some((slot, rows, depth)) = stack.pop() {
            let mut counts = vec![0usize; data.n_classes];
            rows.iter().for_each(|&r| counts[data.ys[r]] += 1);
            let class = majority(&counts);
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let capped = cfg.max_depth.is_some_and(|m| depth >= m);
            let too_small = rows.len() < 2 * cfg.min_samples_leaf;
            let split = if pure || capped || too_small {
                None
            } else {
                best_split(data, &rows, &counts, mtry, cfg.min_samples_leaf, rng)
            };
            match split {
                None => nodes[slot] = TreeNode::Leaf { class },
                Some((feature, threshold)) => {
                    let (l, r): (Vec<usize>, Vec<usize>) =
                        rows.iter().partition(|&&i| data.xs[i][feature] <= threshold);
                    let left = nodes.len();
                    nodes.push(TreeNode::Leaf { class });
                    nodes.push(TreeNode::Leaf { class });
                    nodes[slot] = TreeNode::Split {
                        feature,
                        threshold,
                        left,
                        right: left + 1,
                    };
                    stack.push((left + 1, r, depth + 1));
                    stack.push((left, l, depth + 1));
                }
            }
        }
        Self { nodes }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => idx = if x[*feature] <= *threshold { *left } else { *right },
                TreeNode::Leaf { class } => return *class,
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }
}

/// Lowest weighted-Gini threshold over a random feature order. At least `mtry` features
/// with a valid split are examined; the search continues past `mtry` only while none has
/// been found. Zero-gain splits are accepted so patterns like XOR can still be shattered.
fn best_split(
    data: &Data,
    rows: &[usize],
    parent: &[usize],
    mtry: usize,
    min_leaf: usize,
    rng: &mut RngHandle,
) -> Option<(usize, f64)> {
    let d = data.xs[0].len();
    let mut order: Vec<usize> = (0..d).collect();
    rng.shuffle(&mut order);
    let n = rows.len();
    let mut best: Option<(f64, usize, f64)> = None;
    let mut examined = 0;
    let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(n);
    for f in order {
        if examined >= mtry && best.is_some() {
            break;
        }
        sorted.clear();
        sorted.extend(rows.iter().map(|&r| (data.xs[r][f], data.ys[r])));
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if sorted[0].0 == sorted[n - 1].0 {
            continue;
        }
        let mut left = vec![0usize; parent.len()];
        let mut found = false;
        for i in 0..n - 1 {
            left[sorted[i].1] += 1;
            let nl = i + 1;
            if sorted[i].0 == sorted[i + 1].0 || nl < min_leaf || n - nl < min_leaf {
                continue;
            }
            let right: Vec<usize> = parent.iter().zip(&left).map(|(p, l)| p - l).collect();
            let score = (nl as f64 * gini(&left, nl) + (n - nl) as f64 * gini(&right, n - nl))
                / n as f64;
            if best.map_or(true, |b| score < b.0) {
                let threshold = 0.5 * (sorted[i].0 + sorted[i + 1].0);
                best = Some((score, f, threshold));
            }
            found = true;
        }
        if found {
            examined += 1;
        }
    }
    best.map(|(_, f, t)| (f, t))
}

#[derive(Debug, Clone)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    n_features: usize,
    n_classes: usize,
}

impl RandomForest {
    /// Fits on a labeled buffer. Per-tree seeds are drawn from `rng` in order before
    /// fitting, so the result does not depend on how trees are scheduled across threads.
    pub fn fit(
        buffer: &[Instance],
        n_classes: usize,
        cfg: &ForestConfig,
        rng: &mut RngHandle,
    ) -> Result<Self> {
        let Some(first) = buffer.first() else {
            return Err(Error::Training("cannot fit a forest on an empty buffer".into()));
        };
        if cfg.n_trees == 0 || cfg.min_samples_leaf == 0 {
            return Err(Error::Config("forest needs trees and a positive min-leaf".into()));
        }
        let n_features = first.x.len();
        let mut ys = Vec::with_capacity(buffer.len());
        for inst in buffer {
            check_dim(n_features, &inst.x)?;
            let y = inst
                .y
                .ok_or_else(|| Error::Training(format!("unlabeled instance at t={}", inst.t)))?;
            super::check_class(n_classes, y)?;
            ys.push(y);
        }
        let data = Data {
            xs: buffer.iter().map(|i| i.x.as_slice()).collect(),
            ys,
            n_classes,
        };
        let seeds: Vec<u64> = (0..cfg.n_trees).map(|_| rng.next_u64()).collect();
        let n = buffer.len();
        let trees = seeds
            .par_iter()
            .map(|&s| {
                let mut r = RngHandle::new(s);
                let rows = if cfg.bootstrap {
                    (0..n).map(|_| r.below(n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::grow(&data, rows, cfg, &mut r)
            })
            .collect();
        Ok(Self {
            trees,
            n_features,
            n_classes,
        })
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Majority vote; scores are vote fractions and ties go to the smaller class id.
    pub fn predict_one(&self, x: &[f64]) -> Result<Prediction> {
        check_dim(self.n_features, x)?;
        let mut votes = vec![0.0; self.n_classes];
        for t in &self.trees {
            votes[t.predict(x)] += 1.0;
        }
        let n = self.trees.len() as f64;
        votes.iter_mut().for_each(|v| *v /= n);
        Ok(Prediction::from_scores(votes))
    }
}
