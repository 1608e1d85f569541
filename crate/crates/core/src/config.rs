//! Run configuration: a sectioned TOML file whose keys can each be overridden by a
//! same-named command-line flag. The resolved configuration is echoed next to every
//! run's output and can be fed back in to repeat the run.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adaptation::StartMode;
use crate::datasets::{MuSchedule, Manifest};
use crate::error::{Error, Result};
use crate::evaluation::TieRule;

/// Technique ids in table order.
pub const TECHNIQUES: [&str; 20] = [
    "LC", "MC", "NB", "DDM-NB", "ADWIN-NB", "R-NB", "D3-LR-NB", "D3-HT-NB", "IBDD-NB", "HT",
    "DDM-HT", "ADWIN-HT", "R-HT", "D3-LR-HT", "D3-HT-HT", "IBDD-HT", "ARF", "S-RF", "R-RF",
    "I-RF",
];

/// Excluded from default runs because of its size.
pub const LARGE_DATASET: &str = "FC";

/// Environment variable naming the dataset root directory.
pub const DATA_ENV: &str = "DRIFTBENCH_DATA";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub seed: u64,
    pub techniques: Vec<String>,
    /// Empty means every manifest dataset, minus FC unless `full`.
    pub datasets: Vec<String>,
    pub start_mode: StartMode,
    pub workers: usize,
    pub out: PathBuf,
    pub full: bool,
    pub kappa_window: Option<usize>,
    pub decimal_comma: bool,
    pub tie_rule: TieRule,
    pub manifest: Option<PathBuf>,
    pub data_root: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            techniques: TECHNIQUES.iter().map(|t| t.to_string()).collect(),
            datasets: Vec::new(),
            start_mode: StartMode::Cold,
            workers: 1,
            out: PathBuf::from("results"),
            full: false,
            kappa_window: None,
            decimal_comma: false,
            tie_rule: TieRule::Average,
            manifest: None,
            data_root: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.techniques.is_empty() {
            return Err(Error::Config("no techniques selected".into()));
        }
        if let Some(t) = self.techniques.iter().find(|t| !TECHNIQUES.contains(&t.as_str())) {
            return Err(Error::Config(format!(
                "unknown technique `{t}` (known: {})",
                TECHNIQUES.join(", ")
            )));
        }
        if let Some(t) = first_duplicate(&self.techniques) {
            return Err(Error::Config(format!("technique `{t}` listed twice")));
        }
        if let Some(d) = first_duplicate(&self.datasets) {
            return Err(Error::Config(format!("dataset `{d}` listed twice")));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.kappa_window == Some(0) {
            return Err(Error::Config("kappa window must be at least 1".into()));
        }
        Ok(())
    }

    pub fn load_manifest(&self) -> Result<Manifest> {
        match &self.manifest {
            Some(p) => Manifest::from_file(p),
            None => Ok(Manifest::default_manifest()),
        }
    }

    /// Flag, then environment, then `./data`.
    pub fn resolve_data_root(&self) -> PathBuf {
        resolve_data_root(self.data_root.as_deref())
    }

    /// Dataset ids to run, checked against the manifest.
    pub fn resolve_datasets(&self, manifest: &Manifest) -> Result<Vec<String>> {
        if self.datasets.is_empty() {
            let ids: Vec<String> = manifest
                .entries
                .iter()
                .map(|e| e.id().to_string())
                .filter(|id| self.full || id != LARGE_DATASET)
                .collect();
            if ids.is_empty() {
                return Err(Error::Config("manifest lists no datasets".into()));
            }
            return Ok(ids);
        }
        for d in &self.datasets {
            if manifest.get(d).is_none() {
                return Err(Error::Config(format!("dataset `{d}` is not in the manifest")));
            }
        }
        Ok(self.datasets.clone())
    }
}

pub fn resolve_data_root(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(DATA_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data"))
}

fn first_duplicate(items: &[String]) -> Option<&String> {
    items
        .iter()
        .enumerate()
        .find(|(i, x)| items[..*i].contains(x))
        .map(|(_, x)| x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DilemmaRunConfig {
    pub seed: u64,
    pub samples_per_step: usize,
    /// Partition points; empty means every `k` in `1..=99`.
    pub k: Vec<u64>,
    pub mu_schedule: MuSchedule,
    pub emit_histograms: bool,
    pub out: PathBuf,
}

impl Default for DilemmaRunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples_per_step: 30,
            k: Vec::new(),
            mu_schedule: MuSchedule::Step,
            emit_histograms: false,
            out: PathBuf::from("results"),
        }
    }
}

/// The whole configuration file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub bench: BenchConfig,
    pub dilemma: DilemmaRunConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

/// Parses a partition grid such as `50`, `1,50,99` or `1-99`.
pub fn parse_k_grid(s: &str) -> Result<Vec<u64>> {
    let mut ks = Vec::new();
    for part in s.split(',').map(str::trim) {
        let bad = || Error::Config(format!("invalid k grid entry `{part}`"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (
                    a.trim().parse().map_err(|_| bad())?,
                    b.trim().parse().map_err(|_| bad())?,
                );
                if a > b {
                    return Err(bad());
                }
                ks.extend(a..=b);
            }
            None => ks.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(ks)
}
