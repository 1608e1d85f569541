use std::time::Instant;

use crate::adaptation::{AdaptiveConfig, AdaptiveModel, StartMode};
use crate::detectors::DetectorEvent;
use crate::error::Result;
use crate::learners::ForestConfig;
use crate::stream::{derive_seed, Instance, RngHandle, StreamSchema};

use super::metrics::MetricTrace;
use super::ranks::CellResult;

/// Test-then-train over `stream`. Instances the model consumes without predicting (warm
/// start) are not scored.
pub fn prequential_run(model: &mut AdaptiveModel, stream: &[Instance]) -> Result<MetricTrace> {
    let mut trace = MetricTrace::new(model.n_classes());
    for inst in stream {
        let outcome = model.step(inst)?;
        if let (Some(p), Some(y)) = (outcome.prediction, inst.y) {
            trace.record(y, p.class);
        }
    }
    Ok(trace)
}

/// One (technique, dataset) cell of a benchmark.
#[derive(Debug, Clone)]
pub struct CellSpec {
    pub technique: String,
    pub dataset: String,
    pub reset_n: usize,
    pub retrain_n: usize,
    pub start: StartMode,
    pub master_seed: u64,
    pub kappa_window: Option<usize>,
    pub forest: ForestConfig,
}

#[derive(Debug, Clone)]
pub struct CellRun {
    pub result: CellResult,
    pub trace: MetricTrace,
    pub events: Vec<DetectorEvent>,
}

/// Builds the technique for the dataset, seeds it from `derive_seed`, and runs it.
pub fn run_cell(spec: &CellSpec, schema: &StreamSchema, stream: &[Instance]) -> Result<CellRun> {
    let started = Instant::now();
    let mut cfg =
        AdaptiveConfig::from_technique(&spec.technique, spec.reset_n, spec.retrain_n, spec.start)?;
    cfg.forest = spec.forest.clone();
    let seed = derive_seed(spec.master_seed, &spec.technique, &spec.dataset);
    let mut model = AdaptiveModel::new(cfg, schema, RngHandle::new(seed))?;
    let trace = prequential_run(&mut model, stream)?;
    let windowed_kappa = match spec.kappa_window {
        Some(w) => Some(trace.windowed_kappa(w)?),
        None => None,
    };
    let events = model.take_events();
    let result = CellResult {
        n_scored: trace.len() as u64,
        n_correct: trace.n_correct(),
        mean_accuracy: trace.mean_accuracy()?,
        curve_accuracy: trace.curve_accuracy()?,
        kappa: trace.kappa()?,
        windowed_kappa,
        n_resets: model.n_resets(),
        n_fits: model.n_fits(),
        n_events: events.len() as u64,
        runtime_secs: started.elapsed().as_secs_f64(),
    };
    Ok(CellRun {
        result,
        trace,
        events,
    })
}
