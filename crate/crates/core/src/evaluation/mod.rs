//! Prequential evaluation, metrics, cross-dataset ranks and report output.
//!
//! The headline accuracy is cumulative: total correct over total scored. The
//! time-average of the running-accuracy curve is reported alongside it.

mod metrics;
mod prequential;
mod ranks;
mod report;

pub use metrics::{cohen_kappa, ConfusionMatrix, MetricTrace};
pub use prequential::{prequential_run, run_cell, CellRun, CellSpec};
pub use ranks::{median, median_rank, rank_descending, CellResult, Metric, ResultsMatrix, TieRule};
pub use report::{
    cells_csv, emit_report, format_rank, format_scaled, parse_medrank_column, render_table,
    timings_csv, ReportOptions,
};
