//! Drift detectors as per-instance state machines.
//!
//! DDM and ADWIN are supervised: they consume the wrapped model's 0/1 correctness.
//! D3 and IBDD are unsupervised and consume the feature vector.

mod adwin;
mod d3;
mod ddm;
mod ibdd;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use adwin::{Adwin, AdwinConfig};
pub use d3::{auc, D3Config, Discriminator, D3};
pub use ddm::{Ddm, DdmConfig};
pub use ibdd::{Ibdd, IbddConfig};

use crate::error::{Error, Result};
use crate::stream::RngHandle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DetectorSignal {
    Stable,
    Warning,
    Drift,
}

impl fmt::Display for DetectorSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorSignal::Stable => "stable",
            DetectorSignal::Warning => "warning",
            DetectorSignal::Drift => "drift",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetectorKind {
    Ddm,
    Adwin,
    D3Linear,
    D3Tree,
    Ibdd,
}

impl DetectorKind {
    pub fn code(self) -> &'static str {
        match self {
            DetectorKind::Ddm => "DDM",
            DetectorKind::Adwin => "ADWIN",
            DetectorKind::D3Linear => "D3-LR",
            DetectorKind::D3Tree => "D3-HT",
            DetectorKind::Ibdd => "IBDD",
        }
    }

    pub fn is_supervised(self) -> bool {
        matches!(self, DetectorKind::Ddm | DetectorKind::Adwin)
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "DDM" => DetectorKind::Ddm,
            "ADWIN" => DetectorKind::Adwin,
            "D3-LR" => DetectorKind::D3Linear,
            "D3-HT" => DetectorKind::D3Tree,
            "IBDD" => DetectorKind::Ibdd,
            other => return Err(Error::Config(format!("unknown detector `{other}`"))),
        })
    }
}

/// Any detector behind one update call.
#[derive(Debug, Clone)]
pub enum Detector {
    Ddm(Ddm),
    Adwin(Adwin),
    D3(D3),
    Ibdd(Ibdd),
}

impl Detector {
    /// Builds a detector with default settings.
    pub fn new(kind: DetectorKind, n_features: usize, rng: RngHandle) -> Result<Self> {
        Ok(match kind {
            DetectorKind::Ddm => Detector::Ddm(Ddm::new(DdmConfig::default())),
            DetectorKind::Adwin => Detector::Adwin(Adwin::new(AdwinConfig::default())?),
            DetectorKind::D3Linear => Detector::D3(D3::new(n_features, D3Config::default(), rng)?),
            DetectorKind::D3Tree => Detector::D3(D3::new(
                n_features,
                D3Config {
                    discriminator: Discriminator::HoeffdingTree,
                    ..Default::default()
                },
                rng,
            )?),
            DetectorKind::Ibdd => Detector::Ibdd(Ibdd::new(n_features, IbddConfig::default())?),
        })
    }

    /// Feeds one observation; supervised detectors read `correct`, the others `x`.
    pub fn observe(&mut self, x: &[f64], correct: bool) -> Result<DetectorSignal> {
        match self {
            Detector::Ddm(d) => Ok(d.update(correct)),
            Detector::Adwin(d) => Ok(d.update(if correct { 0.0 } else { 1.0 })?.0),
            Detector::D3(d) => d.update(x),
            Detector::Ibdd(d) => d.update(x),
        }
    }
}

/// One emitted non-stable signal, or an adaptation action, for the event log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorEvent {
    pub t: u64,
    pub source: String,
    pub level: String,
}
