use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square count matrix, rows = actual class, columns = predicted class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    n: usize,
    cells: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        Self {
            n: n_classes,
            cells: vec![0; n_classes * n_classes],
        }
    }

    /// Builds from row-major counts; `counts.len()` must be a perfect square.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let n = (counts.len() as f64).sqrt().round() as usize;
        if n * n != counts.len() {
            return Err(Error::Input(format!(
                "{} counts do not form a square matrix",
                counts.len()
            )));
        }
        Ok(Self {
            n,
            cells: counts.to_vec(),
        })
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input("confusion matrix rows must be square".into()));
        }
        Ok(Self {
            n,
            cells: rows.concat(),
        })
    }

    pub fn n_classes(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, actual: usize, predicted: usize) {
        self.cells[actual * self.n + predicted] += 1;
    }

    pub fn get(&self, actual: usize, predicted: usize) -> u64 {
        self.cells[actual * self.n + predicted]
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n).map(|c| self.get(c, c)).sum()
    }

    pub fn row_sum(&self, c: usize) -> u64 {
        self.cells[c * self.n..(c + 1) * self.n].iter().sum()
    }

    pub fn col_sum(&self, c: usize) -> u64 {
        (0..self.n).map(|r| self.get(r, c)).sum()
    }
}

/// Cohen's kappa `(p_o - p_e) / (1 - p_e)`; 0 when `p_e = 1`.
pub fn cohen_kappa(m: &ConfusionMatrix) -> Result<f64> {
    let total = m.total();
    if total == 0 {
        return Err(Error::UndefinedMetric("kappa of an empty confusion matrix".into()));
    }
    let t = total as f64;
    let p_o = m.trace() as f64 / t;
    let p_e = (0..m.n_classes())
        .map(|c| m.row_sum(c) as f64 * m.col_sum(c) as f64)
        .sum::<f64>()
        / (t * t);
    if p_e >= 1.0 {
        return Ok(0.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Scored predictions of one run, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricTrace {
    actual: Vec<usize>,
    predicted: Vec<usize>,
    confusion: ConfusionMatrix,
}

impl MetricTrace {
    pub fn new(n_classes: usize) -> Self {
        Self {
            actual: Vec::new(),
            predicted: Vec::new(),
            confusion: ConfusionMatrix::new(n_classes),
        }
    }

    pub fn record(&mut self, actual: usize, predicted: usize) {
        self.actual.push(actual);
        self.predicted.push(predicted);
        self.confusion.add(actual, predicted);
    }

    pub fn len(&self) -> usize {
        self.actual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actual.is_empty()
    }

    pub fn correct(&self) -> impl Iterator<Item = bool> + '_ {
        self.actual.iter().zip(&self.predicted).map(|(a, p)| a == p)
    }

    pub fn n_correct(&self) -> u64 {
        self.correct().filter(|&c| c).count() as u64
    }

    pub fn actual(&self) -> &[usize] {
        &self.actual
    }

    pub fn predicted(&self) -> &[usize] {
        &self.predicted
    }

    pub fn confusion(&self) -> &ConfusionMatrix {
        &self.confusion
    }

    /// Total correct over total scored.
    pub fn mean_accuracy(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::UndefinedMetric("accuracy of an empty trace".into()));
        }
        Ok(self.n_correct() as f64 / self.len() as f64)
    }

    /// Time-average of the running (cumulative) accuracy curve.
    pub fn curve_accuracy(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::UndefinedMetric("accuracy of an empty trace".into()));
        }
        let mut hits = 0u64;
        let mut acc = 0.0;
        for (t, c) in self.correct().enumerate() {
            hits += c as u64;
            acc += hits as f64 / (t + 1) as f64;
        }
        Ok(acc / self.len() as f64)
    }

    /// Kappa over the whole run.
    pub fn kappa(&self) -> Result<f64> {
        cohen_kappa(&self.confusion)
    }

    /// Mean kappa over consecutive windows of `window` predictions; a trailing partial
    /// window counts as one more window.
    pub fn windowed_kappa(&self, window: usize) -> Result<f64> {
        if window == 0 {
            return Err(Error::Config("kappa window must be positive".into()));
        }
        if self.is_empty() {
            return Err(Error::UndefinedMetric("kappa of an empty trace".into()));
        }
        let n = self.confusion.n_classes();
        let kappas: Vec<f64> = self
            .actual
            .chunks(window)
            .zip(self.predicted.chunks(window))
            .map(|(a, p)| {
                let mut m = ConfusionMatrix::new(n);
                a.iter().zip(p).for_each(|(&a, &p)| m.add(a, p));
                cohen_kappa(&m)
            })
            .collect::<Result<_>>()?;
        Ok(kappas.iter().sum::<f64>() / kappas.len() as f64)
    }
}
