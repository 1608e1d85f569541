use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How tied values share rank positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieRule {
    /// Mean of the tied positions.
    #[default]
    Average,
    /// Lowest (best) tied position.
    Min,
    /// Highest (worst) tied position.
    Max,
    /// Distinct positions in input order.
    Ordinal,
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "average" => TieRule::Average,
            "min" => TieRule::Min,
            "max" => TieRule::Max,
            "ordinal" => TieRule::Ordinal,
            other => return Err(Error::Config(format!("unknown tie rule `{other}`"))),
        })
    }
}

impl fmt::Display for TieRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieRule::Average => "average",
            TieRule::Min => "min",
            TieRule::Max => "max",
            TieRule::Ordinal => "ordinal",
        })
    }
}

/// 1-based ranks of `values` in descending order (largest value gets rank 1).
pub fn rank_descending(values: &[f64], rule: TieRule) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    // Stable sort keeps input order among ties, which the ordinal rule relies on.
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        for (pos, &k) in idx[i..=j].iter().enumerate() {
            ranks[k] = match rule {
                TieRule::Average => (i + j) as f64 / 2.0 + 1.0,
                TieRule::Min => i as f64 + 1.0,
                TieRule::Max => j as f64 + 1.0,
                TieRule::Ordinal => (i + pos) as f64 + 1.0,
            };
        }
        i = j + 1;
    }
    ranks
}

/// Median of a non-empty slice; the mean of the middle pair for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Summary of one (technique, dataset) cell.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CellResult {
    pub n_scored: u64,
    pub n_correct: u64,
    pub mean_accuracy: f64,
    pub curve_accuracy: f64,
    pub kappa: f64,
    pub windowed_kappa: Option<f64>,
    pub n_resets: u64,
    pub n_fits: u64,
    pub n_events: u64,
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Accuracy,
    Kappa,
}

impl Metric {
    pub fn of(self, cell: &CellResult) -> f64 {
        match self {
            Metric::Accuracy => cell.mean_accuracy,
            Metric::Kappa => cell.kappa,
        }
    }
}

/// Results keyed by (technique, dataset), iterated in key order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsMatrix {
    cells: BTreeMap<(String, String), CellResult>,
}

impl ResultsMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, technique: &str, dataset: &str, cell: CellResult) {
        self.cells
            .insert((technique.to_string(), dataset.to_string()), cell);
    }

    pub fn get(&self, technique: &str, dataset: &str) -> Option<&CellResult> {
        self.cells.get(&(technique.to_string(), dataset.to_string()))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &CellResult)> {
        self.cells
            .iter()
            .map(|((t, d), c)| (t.as_str(), d.as_str(), c))
    }

    /// Builds an accuracy-only matrix from rows of `(technique, [value per dataset])`.
    pub fn from_accuracy_rows(datasets: &[&str], rows: &[(&str, Vec<f64>)]) -> Result<Self> {
        let mut m = Self::new();
        for (technique, values) in rows {
            if values.len() != datasets.len() {
                return Err(Error::Input(format!(
                    "row `{technique}` has {} values for {} datasets",
                    values.len(),
                    datasets.len()
                )));
            }
            for (d, &v) in datasets.iter().zip(values) {
                m.insert(
                    technique,
                    d,
                    CellResult {
                        mean_accuracy: v,
                        ..Default::default()
                    },
                );
            }
        }
        Ok(m)
    }

    fn require(&self, technique: &str, dataset: &str) -> Result<&CellResult> {
        self.get(technique, dataset).ok_or_else(|| Error::Integrity {
            dataset: dataset.to_string(),
            field: "cell",
            expected: format!("a result for technique {technique}"),
            actual: "missing".into(),
        })
    }
}

/// Per-technique median over datasets of its descending rank on each dataset.
pub fn median_rank(
    results: &ResultsMatrix,
    techniques: &[&str],
    datasets: &[&str],
    metric: Metric,
    rule: TieRule,
) -> Result<Vec<f64>> {
    if techniques.is_empty() || datasets.is_empty() {
        return Err(Error::Input("median rank needs techniques and datasets".into()));
    }
    let mut per_technique = vec![Vec::with_capacity(datasets.len()); techniques.len()];
    for d in datasets {
        let values: Vec<f64> = techniques
            .iter()
            .map(|t| results.require(t, d).map(|c| metric.of(c)))
            .collect::<Result<_>>()?;
        for (slot, r) in per_technique.iter_mut().zip(rank_descending(&values, rule)) {
            slot.push(r);
        }
    }
    Ok(per_technique.iter().map(|r| median(r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_rules() {
        let v = [0.9, 0.5, 0.9, 0.1];
        assert_eq!(rank_descending(&v, TieRule::Average), vec![1.5, 3.0, 1.5, 4.0]);
        assert_eq!(rank_descending(&v, TieRule::Min), vec![1.0, 3.0, 1.0, 4.0]);
        assert_eq!(rank_descending(&v, TieRule::Max), vec![2.0, 3.0, 2.0, 4.0]);
        assert_eq!(rank_descending(&v, TieRule::Ordinal), vec![1.0, 3.0, 2.0, 4.0]);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn dominant_technique_ranks_first() {
        let m = ResultsMatrix::from_accuracy_rows(
            &["a", "b", "c"],
            &[("A", vec![0.9, 0.8, 0.7]), ("B", vec![0.5, 0.4, 0.3])],
        )
        .unwrap();
        let r = median_rank(&m, &["A", "B"], &["a", "b", "c"], Metric::Accuracy, TieRule::Average)
            .unwrap();
        assert_eq!(r, vec![1.0, 2.0]);
    }

    #[test]
    fn missing_cell_names_it() {
        let m = ResultsMatrix::from_accuracy_rows(&["a"], &[("A", vec![0.9])]).unwrap();
        let err = median_rank(&m, &["A", "B"], &["a"], Metric::Accuracy, TieRule::Average)
            .unwrap_err();
        assert!(err.to_string().contains('B'), "{err}");
    }
}
