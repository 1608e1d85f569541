//! Image-based drift detection.
//!
//! The last `window` feature vectors form a `window x d` grayscale matrix, each feature
//! scaled to `[0, 1]` by its running minimum and maximum. Every step after the reference
//! matrix is captured, the mean squared deviation (MSD) between the current and reference
//! matrices is recorded. Control limits are `mean ± k·std` of the most recent `history`
//! MSDs, first set once `history` values exist and refreshed every `update_every` steps.
//! `consecutive` MSDs in a row strictly beyond either limit signal drift; the current
//! matrix then becomes the reference and the MSD history starts over.

use std::collections::VecDeque;

use super::DetectorSignal;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbddConfig {
    pub window: usize,
    pub consecutive: usize,
    pub history: usize,
    pub update_every: usize,
    pub k_sigma: f64,
}

impl Default for IbddConfig {
    fn default() -> Self {
        Self {
            window: 200,
            consecutive: 10,
            history: 50,
            update_every: 60,
            k_sigma: 2.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Ibdd {
    cfg: IbddConfig,
    n_features: usize,
    current: VecDeque<Vec<f64>>,
    reference: Option<Vec<Vec<f64>>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    msds: VecDeque<f64>,
    limits: Option<(f64, f64)>,
    since_limits: usize,
    above: usize,
    below: usize,
}

impl Ibdd {
    pub fn new(n_features: usize, cfg: IbddConfig) -> Result<Self> {
        if cfg.window == 0 || cfg.consecutive == 0 || cfg.history < 2 || cfg.update_every == 0 {
            return Err(Error::Config("IBDD parameters must be positive".into()));
        }
        if n_features == 0 {
            return Err(Error::Config("IBDD needs at least one feature".into()));
        }
        Ok(Self {
            cfg,
            n_features,
            current: VecDeque::with_capacity(cfg.window + 1),
            reference: None,
            lo: vec![f64::INFINITY; n_features],
            hi: vec![f64::NEG_INFINITY; n_features],
            msds: VecDeque::new(),
            limits: None,
            since_limits: 0,
            above: 0,
            below: 0,
        })
    }

    /// `(lower, upper)` control limits, once calibrated.
    pub fn limits(&self) -> Option<(f64, f64)> {
        self.limits
    }

    pub fn last_msd(&self) -> Option<f64> {
        self.msds.back().copied()
    }

    pub fn update(&mut self, x: &[f64]) -> Result<DetectorSignal> {
        crate::learners::check_dim(self.n_features, x)?;
        for (f, &v) in x.iter().enumerate() {
            self.lo[f] = self.lo[f].min(v);
            self.hi[f] = self.hi[f].max(v);
        }
        self.current.push_back(x.to_vec());
        if self.current.len() > self.cfg.window {
            self.current.pop_front();
        }
        if self.current.len() < self.cfg.window {
            return Ok(DetectorSignal::Stable);
        }
        let Some(reference) = &self.reference else {
            self.reference = Some(self.current.iter().cloned().collect());
            return Ok(DetectorSignal::Stable);
        };
        let msd = self.msd(reference);
        self.msds.push_back(msd);
        if self.msds.len() > self.cfg.history {
            self.msds.pop_front();
        }
        self.since_limits += 1;
        let due = match self.limits {
            None => self.msds.len() >= self.cfg.history,
            Some(_) => self.since_limits >= self.cfg.update_every,
        };
        if due {
            self.calibrate();
        }
        let Some((lower, upper)) = self.limits else {
            return Ok(DetectorSignal::Stable);
        };
        self.above = if msd > upper { self.above + 1 } else { 0 };
        self.below = if msd < lower { self.below + 1 } else { 0 };
        if self.above >= self.cfg.consecutive || self.below >= self.cfg.consecutive {
            self.reference = Some(self.current.iter().cloned().collect());
            self.msds.clear();
            self.limits = None;
            self.since_limits = 0;
            self.above = 0;
            self.below = 0;
            return Ok(DetectorSignal::Drift);
        }
        Ok(DetectorSignal::Stable)
    }

    fn msd(&self, reference: &[Vec<f64>]) -> f64 {
        let scale: Vec<f64> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| if h > l { 1.0 / (h - l) } else { 0.0 })
            .collect();
        let mut sum = 0.0;
        for (cur, refr) in self.current.iter().zip(reference) {
            for f in 0..self.n_features {
                let d = (cur[f] - refr[f]) * scale[f];
                sum += d * d;
            }
        }
        sum / (self.cfg.window * self.n_features) as f64
    }

    fn calibrate(&mut self) {
        let n = self.msds.len() as f64;
        let mean = self.msds.iter().sum::<f64>() / n;
        let sd = (self.msds.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let k = self.cfg.k_sigma;
        self.limits = Some((mean - k * sd, mean + k * sd));
        self.since_limits = 0;
    }

    pub fn reset(&mut self) {
        *self = Self::new(self.n_features, self.cfg).expect("config was validated");
    }
}
