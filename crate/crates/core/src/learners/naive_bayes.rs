use super::stats::{gaussian_log_pdf, RunningStats};
use super::{check_class, check_dim, Classifier, Prediction};
use crate::error::Result;

/// Lower bound applied to every per-class feature variance.
pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Gaussian naive Bayes with per-class, per-feature running moments.
#[derive(Debug, Clone)]
pub struct GaussianNaiveBayes {
    n_features: usize,
    class_counts: Vec<f64>,
    /// Class-major: `stats[c * n_features + f]`.
    stats: Vec<RunningStats>,
}

impl GaussianNaiveBayes {
    pub fn new(n_features: usize, n_classes: usize) -> Self {
        Self {
            n_features,
            class_counts: vec![0.0; n_classes],
            stats: vec![RunningStats::new(); n_features * n_classes],
        }
    }

    pub fn n_classes(&self) -> usize {
        self.class_counts.len()
    }

    pub fn class_count(&self, c: usize) -> f64 {
        self.class_counts[c]
    }

    pub fn feature_stats(&self, c: usize, f: usize) -> &RunningStats {
        &self.stats[c * self.n_features + f]
    }

    /// Per-class joint log likelihood; `-inf` for classes never seen.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> Vec<f64> {
        let total: f64 = self.class_counts.iter().sum();
        self.class_counts
            .iter()
            .enumerate()
            .map(|(c, &n)| {
                if n <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let row = &self.stats[c * self.n_features..(c + 1) * self.n_features];
                let lik: f64 = row
                    .iter()
                    .zip(x)
                    .map(|(s, &v)| gaussian_log_pdf(v, s.mean(), s.variance().max(VARIANCE_FLOOR)))
                    .sum();
                (n / total).ln() + lik
            })
            .collect()
    }
}

impl Classifier for GaussianNaiveBayes {
    fn predict_one(&self, x: &[f64]) -> Result<Prediction> {
        check_dim(self.n_features, x)?;
        let k = self.n_classes();
        if self.class_counts.iter().all(|&n| n <= 0.0) {
            return Ok(Prediction::from_scores(vec![1.0 / k as f64; k]));
        }
        let jll = self.joint_log_likelihood(x);
        let max = jll.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut scores: Vec<f64> = jll.iter().map(|&l| (l - max).exp()).collect();
        let sum: f64 = scores.iter().sum();
        scores.iter_mut().for_each(|s| *s /= sum);
        // Argmax over log scores so underflowed posteriors still rank correctly.
        let mut pred = Prediction::from_scores(jll);
        pred.scores = scores;
        Ok(pred)
    }

    fn learn_one(&mut self, x: &[f64], y: usize) -> Result<()> {
        check_dim(self.n_features, x)?;
        check_class(self.n_classes(), y)?;
        self.class_counts[y] += 1.0;
        let row = &mut self.stats[y * self.n_features..(y + 1) * self.n_features];
        for (s, &v) in row.iter_mut().zip(x) {
            s.update(v, 1.0);
        }
        Ok(())
    }

    fn reset(&mut self) {
        self.class_counts.iter_mut().for_each(|n| *n = 0.0);
        self.stats.iter_mut().for_each(|s| *s = RunningStats::new());
    }
}
