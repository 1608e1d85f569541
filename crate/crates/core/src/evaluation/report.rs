//! Machine-readable cell output and rendered result tables.
//!
//! `cells.csv` carries raw, unscaled values with point decimals and no timings, so two
//! runs with the same seed produce identical bytes. Rendered tables scale accuracy and
//! kappa by 100 with one decimal, using a comma or point separator.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::ranks::{median_rank, Metric, ResultsMatrix, TieRule};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub decimal_comma: bool,
    pub tie_rule: TieRule,
    /// Free-form lines echoed at the top of `tables.txt`.
    pub notes: Vec<String>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            decimal_comma: false,
            tie_rule: TieRule::Average,
            notes: Vec::new(),
        }
    }
}

fn decimal(s: String, comma: bool) -> String {
    if comma {
        s.replace('.', ",")
    } else {
        s
    }
}

/// `0.543` renders as `54.3`, or `54,3` with `comma`.
pub fn format_scaled(value: f64, comma: bool) -> String {
    let mut s = format!("{:.1}", value * 100.0);
    if s == "-0.0" {
        s = "0.0".into();
    }
    decimal(s, comma)
}

/// Whole ranks without decimals, half ranks with one.
pub fn format_rank(rank: f64, comma: bool) -> String {
    if rank.fract() == 0.0 {
        format!("{rank:.0}")
    } else {
        decimal(format!("{rank:.1}"), comma)
    }
}

/// Renders one metric as a technique x dataset table with a MedRank column.
pub fn render_table(
    results: &ResultsMatrix,
    techniques: &[&str],
    datasets: &[&str],
    metric: Metric,
    opts: &ReportOptions,
) -> Result<String> {
    let ranks = median_rank(results, techniques, datasets, metric, opts.tie_rule)?;
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(techniques.len() + 1);
    let mut header = vec![String::new()];
    header.extend(datasets.iter().map(|d| d.to_string()));
    header.push("MedRank".into());
    rows.push(header);
    for (t, rank) in techniques.iter().zip(&ranks) {
        let mut row = vec![t.to_string()];
        for d in datasets {
            let cell = results.get(t, d).expect("median_rank checked completeness");
            row.push(format_scaled(metric.of(cell), opts.decimal_comma));
        }
        row.push(format_rank(*rank, opts.decimal_comma));
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:>w$}"))
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end()).expect("writing to a String");
    }
    Ok(out)
}

/// Reads the MedRank column back out of a table rendered by [`render_table`].
pub fn parse_medrank_column(table: &str) -> Vec<(String, String)> {
    table
        .lines()
        .skip(1)
        .filter_map(|l| {
            let fields: Vec<&str> = l.split_whitespace().collect();
            Some((fields.first()?.to_string(), fields.last()?.to_string()))
        })
        .collect()
}

const CELLS_HEADER: &str = "technique,dataset,n_scored,n_correct,mean_accuracy,curve_accuracy,kappa,windowed_kappa,n_resets,n_fits,n_events";

/// One row per cell in (technique, dataset) order; no runtimes.
pub fn cells_csv(results: &ResultsMatrix) -> String {
    let mut out = String::from(CELLS_HEADER);
    out.push('\n');
    for (t, d, c) in results.iter() {
        let wk = c.windowed_kappa.map(|k| k.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{t},{d},{},{},{},{},{},{wk},{},{},{}",
            c.n_scored,
            c.n_correct,
            c.mean_accuracy,
            c.curve_accuracy,
            c.kappa,
            c.n_resets,
            c.n_fits,
            c.n_events
        )
        .expect("writing to a String");
    }
    out
}

pub fn timings_csv(results: &ResultsMatrix) -> String {
    let mut out = String::from("technique,dataset,runtime_secs\n");
    for (t, d, c) in results.iter() {
        writeln!(out, "{t},{d},{}", c.runtime_secs).expect("writing to a String");
    }
    out
}

fn write(path: PathBuf, body: &str) -> Result<PathBuf> {
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `cells.csv`, `timings.csv` and `tables.txt` into `dir`, returning their paths.
/// Tables are rendered only when every (technique, dataset) cell is present.
pub fn emit_report(
    results: &ResultsMatrix,
    techniques: &[&str],
    datasets: &[&str],
    dir: &Path,
    opts: &ReportOptions,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = vec![
        write(dir.join("cells.csv"), &cells_csv(results))?,
        write(dir.join("timings.csv"), &timings_csv(results))?,
    ];
    let mut tables = String::new();
    for note in &opts.notes {
        writeln!(tables, "# {note}").expect("writing to a String");
    }
    writeln!(tables, "# rank ties: {}", opts.tie_rule).expect("writing to a String");
    let complete = techniques
        .iter()
        .all(|t| datasets.iter().all(|d| results.get(t, d).is_some()));
    if complete && !techniques.is_empty() && !datasets.is_empty() {
        for (title, metric) in [("Mean accuracy", Metric::Accuracy), ("Cohen's kappa", Metric::Kappa)] {
            writeln!(tables, "\n{title} (x100)").expect("writing to a String");
            tables.push_str(&render_table(results, techniques, datasets, metric, opts)?);
        }
    } else {
        tables.push_str("\n(incomplete matrix: tables omitted; see cells.csv)\n");
    }
    written.push(write(dir.join("tables.txt"), &tables)?);
    Ok(written)
}
