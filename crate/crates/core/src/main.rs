use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use driftbench::adaptation::StartMode;
use driftbench::config::{parse_k_grid, resolve_data_root, RunConfig};
use driftbench::datasets::{Manifest, MuSchedule};
use driftbench::evaluation::TieRule;
use driftbench::runner::{render_checks, run_bench, run_dilemma, validate_datasets};
use driftbench::Error;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Stream-learning benchmark runner and window-partitioning simulator.
#[derive(Parser)]
#[command(name = "driftbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parsed<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Run the technique x dataset matrix prequentially.
    Bench {
        /// Configuration file; flags override its `[bench]` keys.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        techniques: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        datasets: Option<Vec<String>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_parser = parsed::<StartMode>)]
        start_mode: Option<StartMode>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include the large FC stream in the default dataset set.
        #[arg(long)]
        full: bool,
        /// Also report kappa over trailing windows of this many instances.
        #[arg(long)]
        kappa_window: Option<usize>,
        #[arg(long)]
        decimal_comma: bool,
        #[arg(long, value_parser = parsed::<TieRule>)]
        tie_rule: Option<TieRule>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Dataset directory; defaults to $DRIFTBENCH_DATA, then ./data.
        #[arg(long)]
        data_root: Option<PathBuf>,
    },
    /// Sweep the partition point of a window over a drifting Gaussian stream.
    Dilemma {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        samples_per_step: Option<usize>,
        /// Partition points, e.g. `50`, `1,50,99` or `1-99`.
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parsed::<MuSchedule>)]
        mu_schedule: Option<MuSchedule>,
        /// Also write the four histogram panels.
        #[arg(long)]
        emit_histograms: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check dataset files against the manifest: digest and counts.
    ValidateDatasets {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        data_root: Option<PathBuf>,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig, Error> {
    match path {
        Some(p) => RunConfig::from_file(p),
        None => Ok(RunConfig::default()),
    }
}

fn usage(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_USAGE)
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Bench {
            config,
            techniques,
            datasets,
            seed,
            workers,
            start_mode,
            out,
            full,
            kappa_window,
            decimal_comma,
            tie_rule,
            manifest,
            data_root,
        } => {
            let mut cfg = match load_config(config.as_ref()) {
                Ok(c) => c.bench,
                Err(e) => return usage(e),
            };
            if let Some(v) = techniques {
                cfg.techniques = v;
            }
            if let Some(v) = datasets {
                cfg.datasets = v;
            }
            if let Some(v) = seed {
                cfg.seed = v;
            }
            if let Some(v) = workers {
                cfg.workers = v;
            }
            if let Some(v) = start_mode {
                cfg.start_mode = v;
            }
            if let Some(v) = out {
                cfg.out = v;
            }
            cfg.full |= full;
            if kappa_window.is_some() {
                cfg.kappa_window = kappa_window;
            }
            cfg.decimal_comma |= decimal_comma;
            if let Some(v) = tie_rule {
                cfg.tie_rule = v;
            }
            if manifest.is_some() {
                cfg.manifest = manifest;
            }
            if data_root.is_some() {
                cfg.data_root = data_root;
            }
            let report = match run_bench(&cfg) {
                Ok(r) => r,
                Err(e @ Error::Config(_)) => return usage(e),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_FAILED);
                }
            };
            println!("{}", report.dir.display());
            if report.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("{} cell(s) failed:", report.failures.len());
                for f in &report.failures {
                    eprintln!("  {} / {}: {}", f.technique, f.dataset, f.error);
                }
                ExitCode::from(EXIT_FAILED)
            }
        }
        Command::Dilemma {
            config,
            samples_per_step,
            k,
            seed,
            mu_schedule,
            emit_histograms,
            out,
        } => {
            let mut cfg = match load_config(config.as_ref()) {
                Ok(c) => c.dilemma,
                Err(e) => return usage(e),
            };
            if let Some(v) = samples_per_step {
                cfg.samples_per_step = v;
            }
            if let Some(v) = k {
                match parse_k_grid(&v) {
                    Ok(ks) => cfg.k = ks,
                    Err(e) => return usage(e),
                }
            }
            if let Some(v) = seed {
                cfg.seed = v;
            }
            if let Some(v) = mu_schedule {
                cfg.mu_schedule = v;
            }
            cfg.emit_histograms |= emit_histograms;
            if let Some(v) = out {
                cfg.out = v;
            }
            match run_dilemma(&cfg) {
                Ok(r) => {
                    println!("{} ({} records)", r.dir.display(), r.n_records);
                    ExitCode::SUCCESS
                }
                Err(e @ Error::Config(_)) => usage(e),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_FAILED)
                }
            }
        }
        Command::ValidateDatasets {
            manifest,
            data_root,
        } => {
            let m = match manifest {
                Some(p) => Manifest::from_file(&p),
                None => Ok(Manifest::default_manifest()),
            };
            let m = match m {
                Ok(m) => m,
                Err(e) => return usage(e),
            };
            let root = resolve_data_root(data_root.as_deref());
            match validate_datasets(&m, &root) {
                Ok(checks) => {
                    print!("{}", render_checks(&checks));
                    if checks.iter().all(|c| c.passed) {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_FAILED)
                    }
                }
                Err(e) => usage(e),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    run(Cli::parse())
}
