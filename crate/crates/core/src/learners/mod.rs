//! Incremental classifiers behind one predict-then-learn contract, plus the batch forest.
//!
//! Every learner predicts class id 0 before it has seen any label.

mod arf;
mod baselines;
mod forest;
mod hoeffding;
mod naive_bayes;
pub mod stats;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use arf::{AdaptiveRandomForest, ArfConfig};
pub use baselines::{LastClass, MajorityClass};
pub use forest::{DecisionTree, ForestConfig, MaxFeatures, RandomForest};
pub use hoeffding::{HoeffdingTree, HoeffdingTreeConfig, LeafPrediction};
pub use naive_bayes::{GaussianNaiveBayes, VARIANCE_FLOOR};

use crate::error::{Error, Result};
use crate::stream::{RngHandle, StreamSchema};

/// Predicted class and the per-class scores it was taken from.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: usize,
    pub scores: Vec<f64>,
}

impl Prediction {
    /// Takes the argmax of `scores`, ties to the smaller class id.
    pub fn from_scores(scores: Vec<f64>) -> Self {
        Self {
            class: stats::argmax(&scores),
            scores,
        }
    }
}

/// Predict-then-learn over single instances.
pub trait Classifier {
    /// Never mutates learning statistics.
    fn predict_one(&self, x: &[f64]) -> Result<Prediction>;

    fn learn_one(&mut self, x: &[f64], y: usize) -> Result<()>;

    /// Returns to a state behaviourally identical to a freshly built learner.
    fn reset(&mut self);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LearnerKind {
    LastClass,
    MajorityClass,
    NaiveBayes,
    HoeffdingTree,
    AdaptiveRandomForest,
    /// Batch random forest; only usable through the batch regimes.
    RandomForest,
}

impl LearnerKind {
    pub fn code(self) -> &'static str {
        match self {
            LearnerKind::LastClass => "LC",
            LearnerKind::MajorityClass => "MC",
            LearnerKind::NaiveBayes => "NB",
            LearnerKind::HoeffdingTree => "HT",
            LearnerKind::AdaptiveRandomForest => "ARF",
            LearnerKind::RandomForest => "RF",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "LC" => LearnerKind::LastClass,
            "MC" => LearnerKind::MajorityClass,
            "NB" => LearnerKind::NaiveBayes,
            "HT" => LearnerKind::HoeffdingTree,
            "ARF" => LearnerKind::AdaptiveRandomForest,
            "RF" => LearnerKind::RandomForest,
            other => return Err(Error::Config(format!("unknown learner `{other}`"))),
        })
    }
}

/// Any incremental learner.
#[derive(Debug, Clone)]
pub enum Learner {
    LastClass(LastClass),
    MajorityClass(MajorityClass),
    NaiveBayes(GaussianNaiveBayes),
    HoeffdingTree(HoeffdingTree),
    Arf(AdaptiveRandomForest),
}

impl Learner {
    /// Builds a learner with default settings. `rng` seeds the stochastic kinds.
    pub fn new(kind: LearnerKind, schema: &StreamSchema, rng: RngHandle) -> Result<Self> {
        let (d, c) = (schema.n_features(), schema.n_classes());
        if c == 0 {
            return Err(Error::Config("schema has no classes".into()));
        }
        Ok(match kind {
            LearnerKind::LastClass => Learner::LastClass(LastClass::new(d, c)),
            LearnerKind::MajorityClass => Learner::MajorityClass(MajorityClass::new(d, c)),
            LearnerKind::NaiveBayes => Learner::NaiveBayes(GaussianNaiveBayes::new(d, c)),
            LearnerKind::HoeffdingTree => Learner::HoeffdingTree(HoeffdingTree::new(
                d,
                c,
                HoeffdingTreeConfig::default(),
                rng,
            )?),
            LearnerKind::AdaptiveRandomForest => Learner::Arf(AdaptiveRandomForest::new(
                d,
                c,
                ArfConfig::default(),
                rng,
            )?),
            LearnerKind::RandomForest => {
                return Err(Error::Config(
                    "the batch random forest is not an incremental learner".into(),
                ))
            }
        })
    }

    pub fn kind(&self) -> LearnerKind {
        match self {
            Learner::LastClass(_) => LearnerKind::LastClass,
            Learner::MajorityClass(_) => LearnerKind::MajorityClass,
            Learner::NaiveBayes(_) => LearnerKind::NaiveBayes,
            Learner::HoeffdingTree(_) => LearnerKind::HoeffdingTree,
            Learner::Arf(_) => LearnerKind::AdaptiveRandomForest,
        }
    }

    fn inner(&self) -> &dyn Classifier {
        match self {
            Learner::LastClass(m) => m,
            Learner::MajorityClass(m) => m,
            Learner::NaiveBayes(m) => m,
            Learner::HoeffdingTree(m) => m,
            Learner::Arf(m) => m,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn Classifier {
        match self {
            Learner::LastClass(m) => m,
            Learner::MajorityClass(m) => m,
            Learner::NaiveBayes(m) => m,
            Learner::HoeffdingTree(m) => m,
            Learner::Arf(m) => m,
        }
    }
}

impl Classifier for Learner {
    fn predict_one(&self, x: &[f64]) -> Result<Prediction> {
        self.inner().predict_one(x)
    }

    fn learn_one(&mut self, x: &[f64], y: usize) -> Result<()> {
        self.inner_mut().learn_one(x, y)
    }

    fn reset(&mut self) {
        self.inner_mut().reset()
    }
}

/// Hoeffding bound `sqrt(R^2 ln(1/delta) / (2n))`.
pub fn hoeffding_bound(range: f64, delta: f64, n: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("delta {delta} outside (0, 1)")));
    }
    if !(n >= 1.0) {
        return Err(Error::Input(format!("hoeffding bound needs n >= 1, got {n}")));
    }
    Ok((range * range * (1.0 / delta).ln() / (2.0 * n)).sqrt())
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(Error::Input(format!(
            "expected {expected} features, got {}",
            x.len()
        )));
    }
    Ok(())
}

pub(crate) fn check_class(n_classes: usize, y: usize) -> Result<()> {
    if y >= n_classes {
        return Err(Error::Input(format!(
            "class id {y} outside 0..{n_classes}"
        )));
    }
    Ok(())
}
