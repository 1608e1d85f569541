//! Drivers behind the command-line subcommands. Each writes its outputs into
//! `<out>/<run-id>/`, where the run id is derived from the resolved configuration, so
//! identical configurations land in, and reproduce, the same directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{BenchConfig, DilemmaRunConfig, RunConfig};
use crate::datasets::{sha256_file, DatasetDescriptor, LoadedStream, Manifest, ManifestEntry};
use crate::detectors::DetectorEvent;
use crate::dilemma::{dilemma_csv, dilemma_sweep, histogram_panels, DilemmaConfig};
use crate::error::{Error, Result};
use crate::evaluation::{emit_report, run_cell, CellSpec, ReportOptions, ResultsMatrix};
use crate::learners::ForestConfig;

pub const CONFIG_ECHO: &str = "config-echo.toml";

fn run_id(kind: &str, seed: u64, echo: &str) -> String {
    let digest = hex::encode(Sha256::digest(echo.as_bytes()));
    format!("{kind}-s{seed}-{}", &digest[..8])
}

fn write(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub technique: String,
    pub dataset: String,
    pub error: String,
}

#[derive(Debug)]
pub struct BenchReport {
    pub dir: PathBuf,
    pub results: ResultsMatrix,
    pub failures: Vec<CellFailure>,
}

/// Runs every (technique, dataset) cell. Cell and dataset failures are collected, not
/// raised; configuration problems are returned as errors before anything runs.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let manifest = cfg.load_manifest()?;
    let datasets = cfg.resolve_datasets(&manifest)?;
    let root = cfg.resolve_data_root();
    let resolved = RunConfig {
        bench: BenchConfig {
            datasets: datasets.clone(),
            data_root: Some(root.clone()),
            ..cfg.clone()
        },
        ..Default::default()
    };
    let echo = resolved.to_toml();
    let dir = cfg.out.join(run_id("bench", cfg.seed, &echo));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write(&dir.join(CONFIG_ECHO), &echo)?;

    let workers = pool(cfg.workers)?;
    let mut results = ResultsMatrix::new();
    let mut failures = Vec::new();
    let mut events: Vec<(String, String, Vec<DetectorEvent>)> = Vec::new();
    for id in &datasets {
        let entry = manifest.get(id).expect("resolved against the manifest");
        let loaded = match entry.load(&root) {
            Ok(l) => l,
            Err(e) => {
                log::error!("{id}: {e}");
                failures.extend(cfg.techniques.iter().map(|t| CellFailure {
                    technique: t.clone(),
                    dataset: id.clone(),
                    error: e.to_string(),
                }));
                continue;
            }
        };
        log::info!("{id}: {} instances loaded", loaded.instances.len());
        let d = &entry.descriptor;
        let runs: Vec<_> = workers.install(|| {
            cfg.techniques
                .par_iter()
                .map(|t| {
                    let spec = CellSpec {
                        technique: t.clone(),
                        dataset: id.clone(),
                        reset_n: d.reset_n,
                        retrain_n: d.retrain_n,
                        start: cfg.start_mode,
                        master_seed: cfg.seed,
                        kappa_window: cfg.kappa_window,
                        forest: ForestConfig::default(),
                    };
                    run_cell(&spec, &loaded.schema, &loaded.instances)
                })
                .collect()
        });
        for (t, run) in cfg.techniques.iter().zip(runs) {
            match run {
                Ok(run) => {
                    log::info!("{t} on {id}: accuracy {:.4}", run.result.mean_accuracy);
                    results.insert(t, id, run.result);
                    events.push((t.clone(), id.clone(), run.events));
                }
                Err(e) => failures.push(CellFailure {
                    technique: t.clone(),
                    dataset: id.clone(),
                    error: e.to_string(),
                }),
            }
        }
    }

    let techniques: Vec<&str> = cfg.techniques.iter().map(String::as_str).collect();
    let ids: Vec<&str> = datasets.iter().map(String::as_str).collect();
    let opts = ReportOptions {
        decimal_comma: cfg.decimal_comma,
        tie_rule: cfg.tie_rule,
        notes: vec![
            format!("seed {}", cfg.seed),
            format!("start mode {}", cfg.start_mode),
            format!("{} cells, {} failed", results.len(), failures.len()),
        ],
    };
    emit_report(&results, &techniques, &ids, &dir, &opts)?;
    events.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    let mut csv = String::from("technique,dataset,t,source,level\n");
    for (t, d, evs) in &events {
        for e in evs {
            writeln!(csv, "{t},{d},{},{},{}", e.t, e.source, e.level).expect("writing to a String");
        }
    }
    write(&dir.join("events.csv"), &csv)?;
    if !failures.is_empty() {
        let mut body = String::from("technique,dataset,error\n");
        for f in &failures {
            writeln!(body, "{},{},\"{}\"", f.technique, f.dataset, f.error.replace('"', "'"))
                .expect("writing to a String");
        }
        write(&dir.join("failures.csv"), &body)?;
    }
    Ok(BenchReport {
        dir,
        results,
        failures,
    })
}

#[derive(Debug)]
pub struct DilemmaReport {
    pub dir: PathBuf,
    pub n_records: usize,
}

pub fn run_dilemma(cfg: &DilemmaRunConfig) -> Result<DilemmaReport> {
    let sweep = DilemmaConfig {
        k_values: (!cfg.k.is_empty()).then(|| cfg.k.clone()),
        samples_per_step: cfg.samples_per_step,
        schedule: cfg.mu_schedule,
        seed: cfg.seed,
        ..Default::default()
    };
    sweep.k_grid()?;
    let echo = RunConfig {
        dilemma: cfg.clone(),
        ..Default::default()
    }
    .to_toml();
    let out = dilemma_sweep(&sweep)?;
    let dir = cfg.out.join(run_id("dilemma", cfg.seed, &echo));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write(&dir.join(CONFIG_ECHO), &echo)?;
    write(&dir.join("dilemma.csv"), &dilemma_csv(&out.records))?;
    if cfg.emit_histograms {
        write(&dir.join("histograms.csv"), &histogram_panels(&sweep, &out)?)?;
    }
    Ok(DilemmaReport {
        dir,
        n_records: out.records.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetCheck {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

fn check_entry(entry: &ManifestEntry, root: &Path) -> Result<LoadedStream> {
    if let Some(expected) = &entry.sha256 {
        let path = entry.path_under(root);
        if path.exists() {
            let actual = sha256_file(&path)?;
            if &actual != expected {
                return Err(Error::Integrity {
                    dataset: entry.id().to_string(),
                    field: "sha256",
                    expected: expected.clone(),
                    actual,
                });
            }
        }
    }
    entry.load(root)
}

/// Checks every manifest entry's file: digest when pinned, then instance, feature and
/// class counts.
pub fn validate_datasets(manifest: &Manifest, root: &Path) -> Result<Vec<DatasetCheck>> {
    if manifest.is_empty() {
        return Err(Error::Config("manifest lists no datasets".into()));
    }
    Ok(manifest
        .entries
        .iter()
        .map(|entry| {
            let d: &DatasetDescriptor = &entry.descriptor;
            match check_entry(entry, root) {
                Ok(_) => DatasetCheck {
                    id: d.id.clone(),
                    passed: true,
                    detail: format!(
                        "{} instances, {} features, {} classes",
                        d.n_samples, d.n_features, d.n_classes
                    ),
                },
                Err(e) => DatasetCheck {
                    id: d.id.clone(),
                    passed: false,
                    detail: e.to_string(),
                },
            }
        })
        .collect())
}

pub fn render_checks(checks: &[DatasetCheck]) -> String {
    let mut out = String::new();
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{status} {:<4} {}", c.id, c.detail).expect("writing to a String");
    }
    out
}
