//! Adaptive random forest.
//!
//! Each member is a Hoeffding tree whose leaves observe a random feature subset. Members
//! learn each instance with a Poisson(λ) weight. Two ADWIN detectors per member watch
//! its 0/1 error: a warning starts a background tree, a drift replaces the member by its
//! background tree (or a fresh one). Votes are weighted by each member's accuracy
//! since it was installed.

use super::hoeffding::{HoeffdingTree, HoeffdingTreeConfig};
use super::stats::argmax;
use super::{check_class, check_dim, Classifier, LeafPrediction, Prediction};
use crate::detectors::{Adwin, AdwinConfig, DetectorSignal};
use crate::error::{Error, Result};
use crate::stream::RngHandle;

#[derive(Debug, Clone, PartialEq)]
pub struct ArfConfig {
    pub n_trees: usize,
    pub lambda: f64,
    pub warning_delta: f64,
    pub drift_delta: f64,
    /// Member tree settings; `subspace_size` of `None` means `ceil(sqrt(d)) + 1`.
    pub tree: HoeffdingTreeConfig,
}

impl Default for ArfConfig {
    fn default() -> Self {
        Self {
            n_trees: 10,
            lambda: 6.0,
            warning_delta: 0.01,
            drift_delta: 0.001,
            tree: HoeffdingTreeConfig {
                grace_period: 50.0,
                delta: 0.01,
                tie_threshold: 0.05,
                leaf_prediction: LeafPrediction::MajorityClass,
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone)]
struct Member {
    tree: HoeffdingTree,
    background: Option<HoeffdingTree>,
    warning: Adwin,
    drift: Adwin,
    correct: f64,
    seen: f64,
    rng: RngHandle,
}

#[derive(Debug, Clone)]
pub struct AdaptiveRandomForest {
    cfg: ArfConfig,
    tree_cfg: HoeffdingTreeConfig,
    n_features: usize,
    n_classes: usize,
    members: Vec<Member>,
    rng: RngHandle,
    n_drifts: u64,
    n_warnings: u64,
}

fn detector(delta: f64) -> Result<Adwin> {
    Adwin::new(AdwinConfig {
        delta,
        ..Default::default()
    })
}

impl AdaptiveRandomForest {
    pub fn new(
        n_features: usize,
        n_classes: usize,
        cfg: ArfConfig,
        rng: RngHandle,
    ) -> Result<Self> {
        if cfg.n_trees == 0 || !(cfg.lambda > 0.0) {
            return Err(Error::Config("ARF needs trees and a positive lambda".into()));
        }
        let mut tree_cfg = cfg.tree.clone();
        let k = tree_cfg
            .subspace_size
            .unwrap_or(((n_features as f64).sqrt().ceil() as usize) + 1);
        tree_cfg.subspace_size = Some(k.min(n_features));
        // Validate everything once up front so later rebuilds cannot fail.
        HoeffdingTree::new(n_features, n_classes, tree_cfg.clone(), RngHandle::new(0))?;
        detector(cfg.warning_delta)?;
        detector(cfg.drift_delta)?;
        let mut arf = Self {
            cfg,
            tree_cfg,
            n_features,
            n_classes,
            members: Vec::new(),
            rng,
            n_drifts: 0,
            n_warnings: 0,
        };
        arf.populate();
        Ok(arf)
    }

    fn new_tree(&self, rng: &mut RngHandle) -> HoeffdingTree {
        HoeffdingTree::new(
            self.n_features,
            self.n_classes,
            self.tree_cfg.clone(),
            rng.child(),
        )
        .expect("tree config was validated")
    }

    fn populate(&mut self) {
        let mut seeds = self.rng.child();
        self.members = (0..self.cfg.n_trees)
            .map(|_| {
                let mut rng = seeds.child();
                Member {
                    tree: self.new_tree(&mut rng),
                    background: None,
                    warning: detector(self.cfg.warning_delta).expect("validated"),
                    drift: detector(self.cfg.drift_delta).expect("validated"),
                    correct: 0.0,
                    seen: 0.0,
                    rng,
                }
            })
            .collect();
        self.n_drifts = 0;
        self.n_warnings = 0;
    }

    pub fn n_trees(&self) -> usize {
        self.members.len()
    }

    pub fn n_background(&self) -> usize {
        self.members.iter().filter(|m| m.background.is_some()).count()
    }

    pub fn n_drifts(&self) -> u64 {
        self.n_drifts
    }

    pub fn n_warnings(&self) -> u64 {
        self.n_warnings
    }

    /// Total nodes over all foreground trees.
    pub fn n_nodes(&self) -> usize {
        self.members.iter().map(|m| m.tree.n_nodes()).sum()
    }

    /// Window widths of every member's drift detector.
    pub fn detector_widths(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.drift.width()).collect()
    }
}

impl Classifier for AdaptiveRandomForest {
    fn predict_one(&self, x: &[f64]) -> Result<Prediction> {
        check_dim(self.n_features, x)?;
        let mut votes = vec![0.0; self.n_classes];
        for m in &self.members {
            let w = if m.seen > 0.0 { m.correct / m.seen } else { 1.0 };
            for (v, s) in votes.iter_mut().zip(m.tree.predict_scores(x)) {
                *v += w * s;
            }
        }
        super::stats::normalize(&mut votes);
        Ok(Prediction::from_scores(votes))
    }

    fn learn_one(&mut self, x: &[f64], y: usize) -> Result<()> {
        check_dim(self.n_features, x)?;
        check_class(self.n_classes, y)?;
        for i in 0..self.members.len() {
            let correct = argmax(&self.members[i].tree.predict_scores(x)) == y;
            let k = self.members[i].rng.poisson(self.cfg.lambda) as f64;
            let m = &mut self.members[i];
            m.seen += 1.0;
            m.correct += correct as u8 as f64;
            if k > 0.0 {
                m.tree.learn_weighted(x, y, k)?;
                if let Some(bg) = &mut m.background {
                    bg.learn_weighted(x, y, k)?;
                }
            }
            let err = if correct { 0.0 } else { 1.0 };
            if m.warning.update(err)?.0 == DetectorSignal::Drift {
                let mut rng = m.rng.clone();
                let bg = self.new_tree(&mut rng);
                let m = &mut self.members[i];
                m.rng = rng;
                m.background = Some(bg);
                m.warning.reset();
                self.n_warnings += 1;
            }
            let m = &mut self.members[i];
            if m.drift.update(err)?.0 == DetectorSignal::Drift {
                let replacement = match m.background.take() {
                    Some(bg) => bg,
                    None => {
                        let mut rng = m.rng.clone();
                        let t = self.new_tree(&mut rng);
                        self.members[i].rng = rng;
                        t
                    }
                };
                let m = &mut self.members[i];
                m.tree = replacement;
                m.warning.reset();
                m.drift.reset();
                m.correct = 0.0;
                m.seen = 0.0;
                self.n_drifts += 1;
            }
        }
        Ok(())
    }

    fn reset(&mut self) {
        self.populate();
    }
}
