//! Discriminative drift detection: a classifier tries to tell the reference window from
//! the recent one, and a high AUC means the two differ.
//!
//! The AUC is computed over the pooled windows with two-fold stratified cross-fitting:
//! each half is scored by a discriminator trained on the other half. Scoring the training
//! points themselves inflates the AUC with the feature count (with ten recent points, an
//! in-sample linear fit on five identically distributed features crosses 0.7 about a
//! third of the time).

use super::DetectorSignal;
use crate::error::{Error, Result};
use crate::learners::{HoeffdingTree, HoeffdingTreeConfig, LeafPrediction};
use crate::stream::RngHandle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discriminator {
    /// Logistic regression on z-scored features, one SGD epoch.
    Linear,
    HoeffdingTree,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D3Config {
    /// Reference window size.
    pub window: usize,
    /// Recent window size as a fraction of the reference.
    pub rho: f64,
    /// AUC at or above which drift is signalled.
    pub tau: f64,
    pub discriminator: Discriminator,
    pub learning_rate: f64,
}

impl Default for D3Config {
    fn default() -> Self {
        Self {
            window: 100,
            rho: 0.1,
            tau: 0.7,
            discriminator: Discriminator::Linear,
            learning_rate: 0.1,
        }
    }
}

impl D3Config {
    pub fn recent_size(&self) -> usize {
        (self.rho * self.window as f64).ceil() as usize
    }
}

#[derive(Debug, Clone)]
pub struct D3 {
    cfg: D3Config,
    n_features: usize,
    /// Reference items first, then recent ones.
    buffer: Vec<Vec<f64>>,
    rng: RngHandle,
    last_auc: Option<f64>,
    n_fits: u64,
}

impl D3 {
    pub fn new(n_features: usize, cfg: D3Config, rng: RngHandle) -> Result<Self> {
        if cfg.window == 0 || !(cfg.rho > 0.0) || !(0.5..=1.0).contains(&cfg.tau) {
            return Err(Error::Config(
                "D3 needs a positive window and rho, and tau in [0.5, 1]".into(),
            ));
        }
        if n_features == 0 {
            return Err(Error::Config("D3 needs at least one feature".into()));
        }
        Ok(Self {
            cfg,
            n_features,
            buffer: Vec::with_capacity(cfg.window + cfg.recent_size()),
            rng,
            last_auc: None,
            n_fits: 0,
        })
    }

    pub fn last_auc(&self) -> Option<f64> {
        self.last_auc
    }

    /// Number of discriminator fits so far.
    pub fn n_fits(&self) -> u64 {
        self.n_fits
    }

    pub fn buffered(&self) -> usize {
        self.buffer.len()
    }

    pub fn update(&mut self, x: &[f64]) -> Result<DetectorSignal> {
        crate::learners::check_dim(self.n_features, x)?;
        self.buffer.push(x.to_vec());
        let (w, r) = (self.cfg.window, self.cfg.recent_size());
        if self.buffer.len() < w + r {
            return Ok(DetectorSignal::Stable);
        }
        let labels: Vec<usize> = (0..w + r).map(|i| (i >= w) as usize).collect();
        let folds = self.stratified_folds(&labels);
        let mut scores = vec![0.0; labels.len()];
        for held_out in 0..2 {
            let train: Vec<usize> = (0..labels.len()).filter(|&i| folds[i] != held_out).collect();
            let test: Vec<usize> = (0..labels.len()).filter(|&i| folds[i] == held_out).collect();
            let fold_scores = match self.cfg.discriminator {
                Discriminator::Linear => self.linear_scores(&labels, &train, &test),
                Discriminator::HoeffdingTree => self.tree_scores(&labels, &train, &test)?,
            };
            test.iter().zip(fold_scores).for_each(|(&i, s)| scores[i] = s);
        }
        self.n_fits += 1;
        let auc = auc(&scores, &labels);
        self.last_auc = Some(auc);
        if auc >= self.cfg.tau {
            self.buffer.drain(..w);
            Ok(DetectorSignal::Drift)
        } else {
            self.buffer.drain(..r);
            Ok(DetectorSignal::Stable)
        }
    }

    /// Two folds, each holding half of every class, assigned in shuffled order.
    fn stratified_folds(&mut self, labels: &[usize]) -> Vec<usize> {
        let mut folds = vec![0; labels.len()];
        for class in 0..2 {
            let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            self.rng.shuffle(&mut idx);
            idx.iter().enumerate().for_each(|(k, &i)| folds[i] = k % 2);
        }
        folds
    }

    fn linear_scores(&mut self, labels: &[usize], train: &[usize], test: &[usize]) -> Vec<f64> {
        let d = self.n_features;
        let n = train.len() as f64;
        let mut mean = vec![0.0; d];
        let mut sd = vec![0.0; d];
        for &i in train {
            self.buffer[i].iter().zip(&mut mean).for_each(|(v, m)| *m += v / n);
        }
        for &i in train {
            for f in 0..d {
                sd[f] += (self.buffer[i][f] - mean[f]).powi(2) / n;
            }
        }
        sd.iter_mut().for_each(|s| *s = if *s > 0.0 { s.sqrt() } else { 1.0 });
        let z = |row: &[f64]| -> Vec<f64> { (0..d).map(|f| (row[f] - mean[f]) / sd[f]).collect() };
        let mut order = train.to_vec();
        self.rng.shuffle(&mut order);
        let (mut weights, mut bias) = (vec![0.0; d], 0.0);
        let lr = self.cfg.learning_rate;
        for i in order {
            let zi = z(&self.buffer[i]);
            let p = sigmoid(dot(&weights, &zi) + bias);
            let g = p - labels[i] as f64;
            weights.iter_mut().zip(&zi).for_each(|(w, v)| *w -= lr * g * v);
            bias -= lr * g;
        }
        test.iter().map(|&i| dot(&weights, &z(&self.buffer[i])) + bias).collect()
    }

    fn tree_scores(
        &mut self,
        labels: &[usize],
        train: &[usize],
        test: &[usize],
    ) -> Result<Vec<f64>> {
        let cfg = HoeffdingTreeConfig {
            leaf_prediction: LeafPrediction::NaiveBayes,
            ..Default::default()
        };
        let mut order = train.to_vec();
        self.rng.shuffle(&mut order);
        let mut tree = HoeffdingTree::new(self.n_features, 2, cfg, self.rng.child())?;
        for i in order {
            tree.learn_weighted(&self.buffer[i], labels[i], 1.0)?;
        }
        Ok(test.iter().map(|&i| tree.predict_scores(&self.buffer[i])[1]).collect())
    }

    pub fn reset(&mut self) {
        self.buffer.clear();
        self.last_auc = None;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Mann-Whitney AUC of `scores` for positives (`label == 1`); tied scores share their
/// average rank. Returns 0.5 when either class is absent.
pub fn auc(scores: &[f64], labels: &[usize]) -> f64 {
    let n = scores.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        idx[i..=j].iter().for_each(|&k| ranks[k] = r);
        i = j + 1;
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count() as f64;
    let n_neg = n as f64 - n_pos;
    if n_pos == 0.0 || n_neg == 0.0 {
        return 0.5;
    }
    let pos_ranks: f64 = (0..n).filter(|&k| labels[k] == 1).map(|k| ranks[k]).sum();
    (pos_ranks - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auc_values() {
        assert_eq!(auc(&[0.1, 0.2, 0.8, 0.9], &[0, 0, 1, 1]), 1.0);
        assert_eq!(auc(&[0.9, 0.8, 0.2, 0.1], &[0, 0, 1, 1]), 0.0);
        assert_eq!(auc(&[0.5; 4], &[0, 1, 0, 1]), 0.5);
        // One discordant pair of four.
        assert_eq!(auc(&[0.1, 0.6, 0.5, 0.9], &[0, 0, 1, 1]), 0.75);
    }

    #[test]
    fn no_fit_until_both_windows_full() {
        let mut d = D3::new(2, D3Config::default(), RngHandle::new(1)).unwrap();
        for i in 0..109 {
            assert_eq!(d.update(&[i as f64, 0.0]).unwrap(), DetectorSignal::Stable);
        }
        assert_eq!(d.n_fits(), 0);
        d.update(&[0.0, 0.0]).unwrap();
        assert_eq!(d.n_fits(), 1);
    }

    fn separable(disc: Discriminator) {
        let cfg = D3Config {
            discriminator: disc,
            ..Default::default()
        };
        let mut d = D3::new(3, cfg, RngHandle::new(2)).unwrap();
        let mut rng = RngHandle::new(3);
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.normal(0.0, 1.0)).collect();
            d.update(&x).unwrap();
        }
        let mut sig = DetectorSignal::Stable;
        for _ in 0..10 {
            let x: Vec<f64> = (0..3).map(|_| rng.normal(5.0, 1.0)).collect();
            sig = d.update(&x).unwrap();
        }
        assert_eq!(sig, DetectorSignal::Drift);
        assert!(d.last_auc().unwrap() > 0.95);
        // The recent window becomes the reference.
        assert_eq!(d.buffered(), 10);
    }

    #[test]
    fn separable_windows_linear() {
        separable(Discriminator::Linear);
    }

    #[test]
    fn separable_windows_tree() {
        separable(Discriminator::HoeffdingTree);
    }

    #[test]
    fn stable_slide_drops_recent_size() {
        let mut d = D3::new(1, D3Config::default(), RngHandle::new(2)).unwrap();
        for _ in 0..110 {
            d.update(&[1.0]).unwrap();
        }
        assert_eq!(d.last_auc(), Some(0.5));
        assert_eq!(d.buffered(), 100);
    }
}
