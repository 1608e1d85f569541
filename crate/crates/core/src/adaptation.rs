//! Adaptation strategies wrapped around a learner: plain, detect-and-reset, periodic
//! reset, and the three batch random-forest regimes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::detectors::{Detector, DetectorEvent, DetectorKind, DetectorSignal};
use crate::error::{Error, Result};
use crate::learners::{
    Classifier, ForestConfig, Learner, LearnerKind, MajorityClass, Prediction, RandomForest,
};
use crate::stream::{Instance, RngHandle, StreamSchema};

/// Instances the static regime trains on.
pub const STATIC_WINDOW: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BatchRegime {
    /// Fit once on the first instances, never again.
    Static,
    /// Every `retrain_n` instances, fit on exactly the last `retrain_n`.
    Reset,
    /// Every `retrain_n` instances, fit on everything seen so far.
    Incremental,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartMode {
    /// Instances before the first fit only train; scoring starts after them.
    Warm,
    /// A running majority-class model predicts, and is scored, until the first fit.
    #[default]
    Cold,
}

impl fmt::Display for StartMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StartMode::Warm => "warm",
            StartMode::Cold => "cold",
        })
    }
}

impl FromStr for StartMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "warm" => Ok(StartMode::Warm),
            "cold" => Ok(StartMode::Cold),
            other => Err(Error::Config(format!("unknown start mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    None,
    DetectReset(DetectorKind),
    PeriodicReset(usize),
    Batch {
        regime: BatchRegime,
        retrain_n: usize,
        start: StartMode,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveConfig {
    pub learner: LearnerKind,
    pub strategy: Strategy,
    pub forest: ForestConfig,
}

impl AdaptiveConfig {
    pub fn plain(learner: LearnerKind) -> Self {
        Self {
            learner,
            strategy: Strategy::None,
            forest: ForestConfig::default(),
        }
    }

    pub fn with_strategy(learner: LearnerKind, strategy: Strategy) -> Self {
        Self {
            strategy,
            ..Self::plain(learner)
        }
    }

    /// Resolves a technique id such as `DDM-NB`, `R-HT` or `S-RF` using the dataset's
    /// reset and retrain schedules.
    pub fn from_technique(
        id: &str,
        reset_n: usize,
        retrain_n: usize,
        start: StartMode,
    ) -> Result<Self> {
        let batch = |regime| {
            Ok(Self::with_strategy(
                LearnerKind::RandomForest,
                Strategy::Batch {
                    regime,
                    retrain_n,
                    start,
                },
            ))
        };
        match id {
            "S-RF" => return batch(BatchRegime::Static),
            "R-RF" => return batch(BatchRegime::Reset),
            "I-RF" => return batch(BatchRegime::Incremental),
            "RF" => return Err(Error::Config("use S-RF, R-RF or I-RF for the batch forest".into())),
            _ => {}
        }
        let (prefix, base) = match id.rsplit_once('-') {
            Some((p, b)) => (Some(p), b),
            None => (None, id),
        };
        let learner: LearnerKind = base
            .parse()
            .map_err(|_| Error::Config(format!("unknown technique `{id}`")))?;
        let strategy = match prefix {
            None => Strategy::None,
            Some("R") => Strategy::PeriodicReset(reset_n),
            Some(p) => Strategy::DetectReset(
                p.parse()
                    .map_err(|_| Error::Config(format!("unknown technique `{id}`")))?,
            ),
        };
        if strategy != Strategy::None
            && !matches!(learner, LearnerKind::NaiveBayes | LearnerKind::HoeffdingTree)
        {
            return Err(Error::Config(format!(
                "technique `{id}`: only NB and HT are wrapped"
            )));
        }
        Ok(Self::with_strategy(learner, strategy))
    }

    pub fn validate(&self) -> Result<()> {
        match &self.strategy {
            Strategy::PeriodicReset(0) => Err(Error::Config("periodic reset needs N >= 1".into())),
            Strategy::Batch { retrain_n: 0, .. } => {
                Err(Error::Config("batch retraining needs N >= 1".into()))
            }
            Strategy::Batch { .. } if self.learner != LearnerKind::RandomForest => Err(
                Error::Config("batch regimes are defined for the random forest".into()),
            ),
            Strategy::Batch { .. } => Ok(()),
            _ if self.learner == LearnerKind::RandomForest => Err(Error::Config(
                "the random forest runs only under a batch regime".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// What happened on one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// `None` when the instance was consumed for training only (warm start).
    pub prediction: Option<Prediction>,
    pub signal: Option<DetectorSignal>,
    pub reset: bool,
}

#[derive(Debug, Clone)]
enum Engine {
    Incremental {
        learner: Learner,
        detector: Option<Detector>,
    },
    Batch {
        forest: Option<RandomForest>,
        buffer: Vec<Instance>,
        placeholder: MajorityClass,
        last_fit_size: usize,
        n_fits: u64,
    },
}

#[derive(Debug, Clone)]
pub struct AdaptiveModel {
    cfg: AdaptiveConfig,
    n_classes: usize,
    engine: Engine,
    rng: RngHandle,
    consumed: u64,
    learn_calls: u64,
    n_resets: u64,
    events: Vec<DetectorEvent>,
}

impl AdaptiveModel {
    pub fn new(cfg: AdaptiveConfig, schema: &StreamSchema, mut rng: RngHandle) -> Result<Self> {
        cfg.validate()?;
        let engine = match &cfg.strategy {
            Strategy::Batch { .. } => Engine::Batch {
                forest: None,
                buffer: Vec::new(),
                placeholder: MajorityClass::new(schema.n_features(), schema.n_classes()),
                last_fit_size: 0,
                n_fits: 0,
            },
            strategy => {
                let learner = Learner::new(cfg.learner, schema, rng.child())?;
                let detector = match strategy {
                    Strategy::DetectReset(kind) => {
                        Some(Detector::new(*kind, schema.n_features(), rng.child())?)
                    }
                    _ => None,
                };
                Engine::Incremental { learner, detector }
            }
        };
        Ok(Self {
            n_classes: schema.n_classes(),
            cfg,
            engine,
            rng,
            consumed: 0,
            learn_calls: 0,
            n_resets: 0,
            events: Vec::new(),
        })
    }

    pub fn config(&self) -> &AdaptiveConfig {
        &self.cfg
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Instances consumed so far, scored or not.
    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    /// `learn_one` calls made on the wrapped learner.
    pub fn learn_calls(&self) -> u64 {
        self.learn_calls
    }

    pub fn n_resets(&self) -> u64 {
        self.n_resets
    }

    /// Number of forest fits, for batch regimes.
    pub fn n_fits(&self) -> u64 {
        match &self.engine {
            Engine::Batch { n_fits, .. } => *n_fits,
            Engine::Incremental { .. } => 0,
        }
    }

    /// Size of the buffer behind the most recent forest fit.
    pub fn last_fit_size(&self) -> usize {
        match &self.engine {
            Engine::Batch { last_fit_size, .. } => *last_fit_size,
            Engine::Incremental { .. } => 0,
        }
    }

    pub fn events(&self) -> &[DetectorEvent] {
        &self.events
    }

    pub fn take_events(&mut self) -> Vec<DetectorEvent> {
        std::mem::take(&mut self.events)
    }

    /// Predicts with the current model without consuming the instance.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        match &self.engine {
            Engine::Incremental { learner, .. } => learner.predict_one(x),
            Engine::Batch {
                forest,
                placeholder,
                ..
            } => match forest {
                Some(f) => f.predict_one(x),
                None => placeholder.predict_one(x),
            },
        }
    }

    /// Test-then-train on one labeled instance.
    pub fn step(&mut self, inst: &Instance) -> Result<StepOutcome> {
        let y = inst.y.ok_or_else(|| {
            Error::Protocol(format!("instance at t={} has no label", inst.t))
        })?;
        if y >= self.n_classes {
            return Err(Error::Input(format!("class id {y} outside 0..{}", self.n_classes)));
        }
        self.consumed += 1;
        let label = self.cfg_label();
        match &self.cfg.strategy {
            Strategy::Batch {
                regime,
                retrain_n,
                start,
            } => {
                let (regime, retrain_n, start) = (*regime, *retrain_n, *start);
                self.batch_step(inst, y, regime, retrain_n, start)
            }
            strategy => {
                let periodic = match strategy {
                    Strategy::PeriodicReset(n) => Some(*n as u64),
                    _ => None,
                };
                let Engine::Incremental { learner, detector } = &mut self.engine else {
                    unreachable!("incremental strategies own an incremental engine")
                };
                let prediction = learner.predict_one(&inst.x)?;
                learner.learn_one(&inst.x, y)?;
                self.learn_calls += 1;
                let mut signal = None;
                let mut reset = false;
                if let Some(det) = detector {
                    let s = det.observe(&inst.x, prediction.class == y)?;
                    if s != DetectorSignal::Stable {
                        self.events.push(DetectorEvent {
                            t: inst.t,
                            source: label.clone(),
                            level: s.to_string(),
                        });
                    }
                    reset = s == DetectorSignal::Drift;
                    signal = Some(s);
                }
                if periodic.is_some_and(|n| self.consumed % n == 0) {
                    reset = true;
                }
                if reset {
                    learner.reset();
                    self.n_resets += 1;
                    self.events.push(DetectorEvent {
                        t: inst.t,
                        source: label,
                        level: "reset".into(),
                    });
                }
                Ok(StepOutcome {
                    prediction: Some(prediction),
                    signal,
                    reset,
                })
            }
        }
    }

    fn cfg_label(&self) -> String {
        match &self.cfg.strategy {
            Strategy::DetectReset(k) => k.code().to_string(),
            Strategy::PeriodicReset(_) => "periodic".into(),
            Strategy::Batch { .. } => "batch".into(),
            Strategy::None => "none".into(),
        }
    }

    fn batch_step(
        &mut self,
        inst: &Instance,
        y: usize,
        regime: BatchRegime,
        retrain_n: usize,
        start: StartMode,
    ) -> Result<StepOutcome> {
        let Engine::Batch {
            forest,
            buffer,
            placeholder,
            last_fit_size,
            n_fits,
        } = &mut self.engine
        else {
            unreachable!("batch strategies own a batch engine")
        };
        let prediction = match (forest.as_ref(), start) {
            (Some(f), _) => Some(f.predict_one(&inst.x)?),
            (None, StartMode::Cold) => Some(placeholder.predict_one(&inst.x)?),
            (None, StartMode::Warm) => None,
        };
        if forest.is_none() {
            placeholder.learn_one(&inst.x, y)?;
        }
        let n = self.consumed as usize;
        let fit_due = match regime {
            BatchRegime::Static => {
                if n <= STATIC_WINDOW {
                    buffer.push(inst.clone());
                }
                n == STATIC_WINDOW
            }
            BatchRegime::Reset => {
                buffer.push(inst.clone());
                if buffer.len() > retrain_n {
                    buffer.remove(0);
                }
                n % retrain_n == 0
            }
            BatchRegime::Incremental => {
                buffer.push(inst.clone());
                n % retrain_n == 0
            }
        };
        if fit_due {
            *forest = Some(RandomForest::fit(
                buffer,
                self.n_classes,
                &self.cfg.forest,
                &mut self.rng,
            )?);
            *last_fit_size = buffer.len();
            *n_fits += 1;
            self.events.push(DetectorEvent {
                t: inst.t,
                source: "batch".into(),
                level: "retrain".into(),
            });
            if regime == BatchRegime::Static {
                buffer.clear();
                buffer.shrink_to_fit();
            }
        }
        Ok(StepOutcome {
            prediction,
            signal: None,
            reset: false,
        })
    }
}
