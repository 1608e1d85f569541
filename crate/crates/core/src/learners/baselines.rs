use super::{check_class, check_dim, Classifier, Prediction};
use crate::error::Result;

/// Predicts the most recent label.
#[derive(Debug, Clone)]
pub struct LastClass {
    n_features: usize,
    n_classes: usize,
    last: Option<usize>,
}

impl LastClass {
    pub fn new(n_features: usize, n_classes: usize) -> Self {
        Self {
            n_features,
            n_classes,
            last: None,
        }
    }
}

impl Classifier for LastClass {
    fn predict_one(&self, x: &[f64]) -> Result<Prediction> {
        check_dim(self.n_features, x)?;
        let mut scores = vec![0.0; self.n_classes];
        scores[self.last.unwrap_or(0)] = 1.0;
        Ok(Prediction::from_scores(scores))
    }

    fn learn_one(&mut self, x: &[f64], y: usize) -> Result<()> {
        check_dim(self.n_features, x)?;
        check_class(self.n_classes, y)?;
        self.last = Some(y);
        Ok(())
    }

    fn reset(&mut self) {
        self.last = None;
    }
}

/// Predicts the most frequent label so far; ties go to the smaller class id.
#[derive(Debug, Clone)]
pub struct MajorityClass {
    n_features: usize,
    counts: Vec<u64>,
}

impl MajorityClass {
    pub fn new(n_features: usize, n_classes: usize) -> Self {
        Self {
            n_features,
            counts: vec![0; n_classes],
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

impl Classifier for MajorityClass {
    fn predict_one(&self, x: &[f64]) -> Result<Prediction> {
        check_dim(self.n_features, x)?;
        Ok(Prediction::from_scores(
            self.counts.iter().map(|&c| c as f64).collect(),
        ))
    }

    fn learn_one(&mut self, x: &[f64], y: usize) -> Result<()> {
        check_dim(self.n_features, x)?;
        check_class(self.counts.len(), y)?;
        self.counts[y] += 1;
        Ok(())
    }

    fn reset(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0);
    }
}
