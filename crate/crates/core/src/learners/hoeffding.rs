//! Hoeffding tree over numeric features.
//!
//! Each leaf keeps one Gaussian per (feature, class). Split candidates are evenly spaced
//! thresholds between the smallest and largest value seen at the leaf, scored by
//! information gain with the class masses on each side estimated from the Gaussians.

use super::stats::{gaussian_log_pdf, normal_cdf, normalize, RunningStats};
use super::{check_class, check_dim, hoeffding_bound, Classifier, Prediction};
use crate::error::{Error, Result};
use crate::stream::RngHandle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafPrediction {
    /// Normalized class counts at the leaf.
    MajorityClass,
    /// Naive Bayes over the leaf's Gaussian observers.
    NaiveBayes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoeffdingTreeConfig {
    /// Weight a leaf must accumulate between split attempts.
    pub grace_period: f64,
    /// Split confidence.
    pub delta: f64,
    /// Tie-breaking threshold on the Hoeffding bound.
    pub tie_threshold: f64,
    pub max_depth: Option<usize>,
    /// Candidate thresholds tried per feature.
    pub n_split_points: usize,
    /// Each branch of a split must carry at least this fraction of the leaf's weight.
    pub min_branch_fraction: f64,
    pub leaf_prediction: LeafPrediction,
    /// Number of features each new leaf observes, drawn at random; `None` observes all.
    pub subspace_size: Option<usize>,
}

impl Default for HoeffdingTreeConfig {
    fn default() -> Self {
        Self {
            grace_period: 200.0,
            delta: 1e-7,
            tie_threshold: 0.05,
            max_depth: None,
            n_split_points: 10,
            min_branch_fraction: 0.01,
            leaf_prediction: LeafPrediction::MajorityClass,
            subspace_size: None,
        }
    }
}

#[derive(Debug, Clone)]
struct FeatureObserver {
    per_class: Vec<RunningStats>,
    min: Vec<f64>,
    max: Vec<f64>,
}

impl FeatureObserver {
    fn new(n_classes: usize) -> Self {
        Self {
            per_class: vec![RunningStats::new(); n_classes],
            min: vec![f64::INFINITY; n_classes],
            max: vec![f64::NEG_INFINITY; n_classes],
        }
    }

    fn update(&mut self, v: f64, y: usize, w: f64) {
        self.per_class[y].update(v, w);
        self.min[y] = self.min[y].min(v);
        self.max[y] = self.max[y].max(v);
    }

    /// Estimated class weights on each side of `x <= threshold`.
    fn split_masses(&self, threshold: f64) -> (Vec<f64>, Vec<f64>) {
        let k = self.per_class.len();
        let (mut left, mut right) = (vec![0.0; k], vec![0.0; k]);
        for c in 0..k {
            let s = &self.per_class[c];
            let w = s.weight();
            if w <= 0.0 {
                continue;
            }
            if threshold < self.min[c] {
                right[c] += w;
            } else if threshold >= self.max[c] {
                left[c] += w;
            } else {
                let l = normal_cdf(threshold, s.mean(), s.std_dev()) * w;
                left[c] += l;
                right[c] += w - l;
            }
        }
        (left, right)
    }
}

fn entropy(dist: &[f64]) -> f64 {
    let total: f64 = dist.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    dist.iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.log2()
        })
        .sum()
}

fn info_gain(pre: &[f64], branches: &[&[f64]], min_branch_fraction: f64) -> f64 {
    let total: f64 = pre.iter().sum();
    let weights: Vec<f64> = branches.iter().map(|b| b.iter().sum()).collect();
    let heavy = weights
        .iter()
        .filter(|&&w| w / total >= min_branch_fraction)
        .count();
    if heavy < 2 {
        return f64::NEG_INFINITY;
    }
    let post: f64 = branches
        .iter()
        .zip(&weights)
        .map(|(b, &w)| w / total * entropy(b))
        .sum();
    entropy(pre) - post
}

#[derive(Debug, Clone)]
struct Leaf {
    depth: usize,
    class_counts: Vec<f64>,
    features: Vec<usize>,
    observers: Vec<FeatureObserver>,
    weight_at_last_attempt: f64,
}

impl Leaf {
    fn total_weight(&self) -> f64 {
        self.class_counts.iter().sum()
    }
}

#[derive(Debug, Clone)]
enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(Leaf),
}

struct SplitCandidate {
    merit: f64,
    feature: usize,
    threshold: f64,
    left: Vec<f64>,
    right: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct HoeffdingTree {
    cfg: HoeffdingTreeConfig,
    n_features: usize,
    n_classes: usize,
    nodes: Vec<Node>,
    rng: RngHandle,
}

impl HoeffdingTree {
    pub fn new(
        n_features: usize,
        n_classes: usize,
        cfg: HoeffdingTreeConfig,
        rng: RngHandle,
    ) -> Result<Self> {
        if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
            return Err(Error::Config(format!("split confidence {} outside (0, 1)", cfg.delta)));
        }
        if !(cfg.grace_period > 0.0) || cfg.n_split_points == 0 {
            return Err(Error::Config(
                "grace period and split-point count must be positive".into(),
            ));
        }
        if n_features == 0 || n_classes == 0 {
            return Err(Error::Config("tree needs features and classes".into()));
        }
        let mut tree = Self {
            cfg,
            n_features,
            n_classes,
            nodes: Vec::new(),
            rng,
        };
        tree.plant();
        Ok(tree)
    }

    pub fn config(&self) -> &HoeffdingTreeConfig {
        &self.cfg
    }

    fn plant(&mut self) {
        self.nodes.clear();
        let root = self.new_leaf(0, vec![0.0; self.n_classes]);
        self.nodes.push(Node::Leaf(root));
    }

    fn new_leaf(&mut self, depth: usize, class_counts: Vec<f64>) -> Leaf {
        let features = match self.cfg.subspace_size {
            Some(k) if k < self.n_features => {
                let mut f = self.rng.sample_indices(self.n_features, k);
                f.sort_unstable();
                f
            }
            _ => (0..self.n_features).collect(),
        };
        let weight_at_last_attempt = class_counts.iter().sum();
        Leaf {
            depth,
            class_counts,
            observers: vec![FeatureObserver::new(self.n_classes); features.len()],
            features,
            weight_at_last_attempt,
        }
    }

    fn route(&self, x: &[f64]) -> usize {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => idx = if x[*feature] <= *threshold { *left } else { *right },
                Node::Leaf(_) => return idx,
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Depth of the deepest leaf; a lone root has depth 0.
    pub fn depth(&self) -> usize {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Leaf(l) => Some(l.depth),
                Node::Split { .. } => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Class-weight sum per leaf, in arena order.
    pub fn leaf_weights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Leaf(l) => Some(l.total_weight()),
                Node::Split { .. } => None,
            })
            .collect()
    }

    /// Normalized class scores at the leaf reached by `x`.
    pub fn predict_scores(&self, x: &[f64]) -> Vec<f64> {
        let Node::Leaf(leaf) = &self.nodes[self.route(x)] else {
            unreachable!("route ends at a leaf")
        };
        let mut scores = match self.cfg.leaf_prediction {
            LeafPrediction::MajorityClass => leaf.class_counts.clone(),
            LeafPrediction::NaiveBayes => naive_bayes_scores(leaf, x),
        };
        normalize(&mut scores);
        scores
    }

    /// Learns `(x, y)` with weight `w`; zero weight is a no-op.
    pub fn learn_weighted(&mut self, x: &[f64], y: usize, w: f64) -> Result<()> {
        check_dim(self.n_features, x)?;
        check_class(self.n_classes, y)?;
        if w <= 0.0 {
            return Ok(());
        }
        let idx = self.route(x);
        let Node::Leaf(leaf) = &mut self.nodes[idx] else {
            unreachable!("route ends at a leaf")
        };
        leaf.class_counts[y] += w;
        for (obs, &f) in leaf.observers.iter_mut().zip(&leaf.features) {
            obs.update(x[f], y, w);
        }
        if leaf.total_weight() - leaf.weight_at_last_attempt >= self.cfg.grace_period {
            self.attempt_split(idx);
        }
        Ok(())
    }

    fn attempt_split(&mut self, idx: usize) {
        let Node::Leaf(leaf) = &mut self.nodes[idx] else {
            return;
        };
        let total = leaf.total_weight();
        leaf.weight_at_last_attempt = total;
        let observed = leaf.class_counts.iter().filter(|&&w| w > 0.0).count();
        let depth_ok = self.cfg.max_depth.map_or(true, |m| leaf.depth < m);
        if observed < 2 || !depth_ok {
            return;
        }
        let mut candidates: Vec<SplitCandidate> = leaf
            .observers
            .iter()
            .zip(&leaf.features)
            .filter_map(|(obs, &f)| best_threshold(obs, &leaf.class_counts, f, &self.cfg))
            .collect();
        candidates.sort_by(|a, b| b.merit.total_cmp(&a.merit));
        let Some(best) = candidates.first() else {
            return;
        };
        // The runner-up is never worse than not splitting (merit 0).
        let second = candidates.get(1).map_or(0.0, |c| c.merit.max(0.0));
        let range = (self.n_classes.max(2) as f64).log2();
        let eps = hoeffding_bound(range, self.cfg.delta, total).unwrap_or(f64::INFINITY);
        if best.merit > 0.0 && (best.merit - second > eps || eps < self.cfg.tie_threshold) {
            let best = candidates.swap_remove(0);
            let depth = leaf.depth + 1;
            let left_leaf = self.new_leaf(depth, best.left);
            let right_leaf = self.new_leaf(depth, best.right);
            let left = self.nodes.len();
            self.nodes.push(Node::Leaf(left_leaf));
            self.nodes.push(Node::Leaf(right_leaf));
            self.nodes[idx] = Node::Split {
                feature: best.feature,
                threshold: best.threshold,
                left,
                right: left + 1,
            };
        }
    }
}

fn best_threshold(
    obs: &FeatureObserver,
    pre: &[f64],
    feature: usize,
    cfg: &HoeffdingTreeConfig,
) -> Option<SplitCandidate> {
    let seen = |c: &usize| obs.per_class[*c].weight() > 0.0;
    let classes: Vec<usize> = (0..pre.len()).filter(seen).collect();
    let lo = classes.iter().map(|&c| obs.min[c]).fold(f64::INFINITY, f64::min);
    let hi = classes.iter().map(|&c| obs.max[c]).fold(f64::NEG_INFINITY, f64::max);
    if !(lo < hi) {
        return None;
    }
    let step = (hi - lo) / (cfg.n_split_points + 1) as f64;
    let mut best: Option<SplitCandidate> = None;
    for i in 1..=cfg.n_split_points {
        let threshold = lo + step * i as f64;
        let (left, right) = obs.split_masses(threshold);
        let merit = info_gain(pre, &[&left, &right], cfg.min_branch_fraction);
        if merit.is_finite() && best.as_ref().map_or(true, |b| merit > b.merit) {
            best = Some(SplitCandidate {
                merit,
                feature,
                threshold,
                left,
                right,
            });
        }
    }
    best
}

fn naive_bayes_scores(leaf: &Leaf, x: &[f64]) -> Vec<f64> {
    let total = leaf.total_weight();
    if total <= 0.0 {
        return leaf.class_counts.clone();
    }
    let log: Vec<f64> = (0..leaf.class_counts.len())
        .map(|c| {
            let n = leaf.class_counts[c];
            if n <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let mut l = (n / total).ln();
            for (obs, &f) in leaf.observers.iter().zip(&leaf.features) {
                let s = &obs.per_class[c];
                if s.weight() > 0.0 {
                    l += gaussian_log_pdf(x[f], s.mean(), s.variance().max(1e-9));
                }
            }
            l
        })
        .collect();
    let max = log.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    log.iter().map(|&l| (l - max).exp()).collect()
}

impl Classifier for HoeffdingTree {
    fn predict_one(&self, x: &[f64]) -> Result<Prediction> {
        check_dim(self.n_features, x)?;
        Ok(Prediction::from_scores(self.predict_scores(x)))
    }

    fn learn_one(&mut self, x: &[f64], y: usize) -> Result<()> {
        self.learn_weighted(x, y, 1.0)
    }

    fn reset(&mut self) {
        self.rng = self.rng.child();
        self.plant();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::gaussian_classes_stream;

    fn tree(cfg: HoeffdingTreeConfig) -> HoeffdingTree {
        HoeffdingTree::new(2, 2, cfg, RngHandle::new(3)).unwrap()
    }

    #[test]
    fn no_split_before_grace_period() {
        let mut t = tree(HoeffdingTreeConfig::default());
        let mut rng = RngHandle::new(1);
        for inst in gaussian_classes_stream(199, 2, 2, 4.0, &mut rng) {
            t.learn_one(&inst.x, inst.y.unwrap()).unwrap();
        }
        assert_eq!(t.n_leaves(), 1);
    }

    #[test]
    fn splits_on_separable_data() {
        let mut t = tree(HoeffdingTreeConfig::default());
        let mut rng = RngHandle::new(1);
        // Both features are equally informative, so the split waits for the tie rule
        // (epsilon < 0.05 needs about 3,200 instances at delta = 1e-7).
        let stream = gaussian_classes_stream(5000, 2, 2, 4.0, &mut rng);
        for inst in &stream {
            t.learn_one(&inst.x, inst.y.unwrap()).unwrap();
        }
        assert!(t.n_leaves() >= 2);
        let correct = gaussian_classes_stream(1000, 2, 2, 4.0, &mut rng)
            .iter()
            .filter(|i| t.predict_one(&i.x).unwrap().class == i.y.unwrap())
            .count();
        assert!(correct > 950, "{correct}");
    }

    #[test]
    fn leaf_counts_sum_to_routed_weight() {
        let mut t = tree(HoeffdingTreeConfig {
            grace_period: 50.0,
            ..Default::default()
        });
        let mut rng = RngHandle::new(8);
        let stream = gaussian_classes_stream(3000, 2, 2, 2.0, &mut rng);
        for inst in &stream {
            t.learn_one(&inst.x, inst.y.unwrap()).unwrap();
        }
        // Leaves start from estimated class masses, so the total is conserved exactly.
        let total: f64 = t.leaf_weights().iter().sum();
        assert!((total - 3000.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn depth_respects_limit() {
        let mut t = HoeffdingTree::new(
            2,
            3,
            HoeffdingTreeConfig {
                grace_period: 20.0,
                max_depth: Some(2),
                tie_threshold: 0.5,
                ..Default::default()
            },
            RngHandle::new(2),
        )
        .unwrap();
        let mut rng = RngHandle::new(4);
        for inst in gaussian_classes_stream(20_000, 2, 3, 1.0, &mut rng) {
            t.learn_one(&inst.x, inst.y.unwrap()).unwrap();
        }
        assert!(t.depth() <= 2);
        assert!(t.n_leaves() > 1);
    }

    #[test]
    fn prediction_is_pure() {
        let mut t = tree(HoeffdingTreeConfig::default());
        let mut rng = RngHandle::new(5);
        for inst in gaussian_classes_stream(500, 2, 2, 3.0, &mut rng) {
            t.learn_one(&inst.x, inst.y.unwrap()).unwrap();
        }
        let before = (t.n_nodes(), t.leaf_weights());
        for _ in 0..100 {
            t.predict_one(&[rng.normal(0.0, 3.0), rng.normal(0.0, 3.0)]).unwrap();
        }
        assert_eq!(before, (t.n_nodes(), t.leaf_weights()));
    }

    #[test]
    fn subspace_leaves_observe_subset() {
        let t = HoeffdingTree::new(
            10,
            2,
            HoeffdingTreeConfig {
                subspace_size: Some(4),
                ..Default::default()
            },
            RngHandle::new(1),
        )
        .unwrap();
        let Node::Leaf(root) = &t.nodes[0] else { panic!() };
        assert_eq!(root.features.len(), 4);
    }

    #[test]
    fn naive_bayes_leaves_score_within_a_single_leaf() {
        let mut t = tree(HoeffdingTreeConfig {
            leaf_prediction: LeafPrediction::NaiveBayes,
            ..Default::default()
        });
        for i in 0..100 {
            let y = i % 2;
            t.learn_one(&[y as f64 * 5.0 + (i % 7) as f64 * 0.1, 0.0], y).unwrap();
        }
        assert_eq!(t.n_leaves(), 1);
        assert_eq!(t.predict_one(&[5.2, 0.0]).unwrap().class, 1);
        assert_eq!(t.predict_one(&[0.1, 0.0]).unwrap().class, 0);
    }

    #[test]
    fn info_gain_rules() {
        assert!((info_gain(&[5.0, 5.0], &[&[5.0, 0.0], &[0.0, 5.0]], 0.01) - 1.0).abs() < 1e-12);
        assert_eq!(info_gain(&[5.0, 5.0], &[&[5.0, 5.0], &[0.0, 0.0]], 0.01), f64::NEG_INFINITY);
    }
}
