//! Window-partition simulator.
//!
//! A window `W(i, j)` over a drifting Gaussian stream is cut at `k` into `[i, k]` and
//! `(k, j]`. Each side's histogram stands in for the generating distribution at its
//! end, and the total-variation distance between the two sides is compared with the
//! distance between the true distributions at `i` and `j`.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::datasets::{gaussian_drift_stream, DriftKind, MuSchedule, SyntheticDriftConfig};
use crate::error::{Error, Result};
use crate::stream::{Instance, RngHandle, SampleWindow, WindowSpec};

/// Uniform bins of width `width` starting at `lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning {
    pub lo: f64,
    pub width: f64,
    pub n_bins: usize,
}

impl Binning {
    /// Bins covering `[lo, hi]`; the last bin is widened to reach `hi` if needed.
    pub fn covering(lo: f64, hi: f64, width: f64) -> Result<Self> {
        if !(hi > lo) || !(width > 0.0) {
            return Err(Error::Config(format!(
                "invalid binning [{lo}, {hi}] with width {width}"
            )));
        }
        let n_bins = ((hi - lo) / width - 1e-9).ceil().max(1.0) as usize;
        Ok(Self { lo, width, n_bins })
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.n_bins)
            .map(|b| self.lo + b as f64 * self.width)
            .collect()
    }

    /// Bin index; values outside the range fall into the edge bins.
    pub fn index(&self, x: f64) -> usize {
        let b = ((x - self.lo) / self.width).floor();
        if b < 0.0 {
            0
        } else {
            (b as usize).min(self.n_bins - 1)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    binning: Binning,
    masses: Vec<f64>,
}

impl Histogram {
    pub fn from_samples(samples: &[f64], binning: Binning) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Input("histogram of no samples".into()));
        }
        let mut masses = vec![0.0; binning.n_bins];
        for &x in samples {
            masses[binning.index(x)] += 1.0;
        }
        let n = samples.len() as f64;
        masses.iter_mut().for_each(|m| *m /= n);
        Ok(Self { binning, masses })
    }

    /// Builds from raw masses, which are normalized to sum to one.
    pub fn from_masses(binning: Binning, mut masses: Vec<f64>) -> Result<Self> {
        let total: f64 = masses.iter().sum();
        if masses.len() != binning.n_bins || !(total > 0.0) || masses.iter().any(|&m| m < 0.0) {
            return Err(Error::Input(
                "masses must be non-negative, positive in total, one per bin".into(),
            ));
        }
        masses.iter_mut().for_each(|m| *m /= total);
        Ok(Self { binning, masses })
    }

    pub fn binning(&self) -> Binning {
        self.binning
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
}

/// Total-variation distance `0.5 * sum |a_m - b_m|` over shared bins.
pub fn dissimilarity(a: &Histogram, b: &Histogram) -> Result<f64> {
    if a.binning != b.binning {
        return Err(Error::Input("histograms have different bin edges".into()));
    }
    let tv = 0.5
        * a.masses
            .iter()
            .zip(&b.masses)
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>();
    Ok(tv.min(1.0))
}

/// Splits `window` into `[i, k]` and `(k, j]`.
pub fn partition(window: &SampleWindow, k: u64) -> Result<(SampleWindow, SampleWindow)> {
    let (i, j) = (window.spec.i(), window.spec.j());
    if !(i < k && k < j) {
        return Err(Error::Input(format!(
            "partition point {k} outside ({i}, {j})"
        )));
    }
    let cut = window.items.partition_point(|it| it.t <= k);
    let left = SampleWindow::new(WindowSpec::new(i, k)?, window.items[..cut].to_vec())?;
    // `(k, j]` would be the single step `[j, j]` when k = j - 1, which a WindowSpec
    // cannot hold; the spec is stored as `[k, j]` and only items after k are kept.
    let right = SampleWindow::new(WindowSpec::new(k, j)?, window.items[cut..].to_vec())?;
    Ok((left, right))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            n,
            mean,
            std: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilemmaRecord {
    pub k: u64,
    pub left: MeanStd,
    pub right: MeanStd,
    pub s_empirical: f64,
    pub s_true: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilemmaConfig {
    pub i: u64,
    pub j: u64,
    /// Partition points; `None` sweeps every `k` in `(i, j)`.
    pub k_values: Option<Vec<u64>>,
    pub samples_per_step: usize,
    pub sigma: f64,
    pub step_period: usize,
    pub schedule: MuSchedule,
    pub seed: u64,
    /// Draws per true distribution when estimating `S(D_i, D_j)`.
    pub true_samples: usize,
    pub bin_width: f64,
}

impl Default for DilemmaConfig {
    fn default() -> Self {
        Self {
            i: 0,
            j: 100,
            k_values: None,
            samples_per_step: 30,
            sigma: 1.0,
            step_period: 10,
            schedule: MuSchedule::Step,
            seed: 0,
            true_samples: 10_000,
            bin_width: 0.25,
        }
    }
}

impl DilemmaConfig {
    fn drift(&self, seed: u64) -> SyntheticDriftConfig {
        SyntheticDriftConfig {
            n_steps: self.j as usize + 1,
            sigma: self.sigma,
            step_period: self.step_period,
            drift_kind: DriftKind::IncrementalGaussian,
            schedule: self.schedule,
            rng: RngHandle::new(seed),
        }
    }

    pub fn k_grid(&self) -> Result<Vec<u64>> {
        match &self.k_values {
            None => Ok((self.i + 1..self.j).collect()),
            Some(ks) => {
                if ks.is_empty() {
                    return Err(Error::Config("empty k grid".into()));
                }
                if let Some(bad) = ks.iter().find(|&&k| !(self.i < k && k < self.j)) {
                    return Err(Error::Config(format!(
                        "k = {bad} outside ({}, {})",
                        self.i, self.j
                    )));
                }
                Ok(ks.clone())
            }
        }
    }

    pub fn binning(&self) -> Result<Binning> {
        let d = self.drift(0);
        let mus: Vec<f64> = (self.i..=self.j).map(|t| d.mu(t)).collect();
        let lo = mus.iter().cloned().fold(f64::INFINITY, f64::min) - 5.0 * self.sigma;
        let hi = mus.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 5.0 * self.sigma;
        Binning::covering(lo, hi, self.bin_width)
    }
}

/// Everything a sweep produces.
#[derive(Debug, Clone)]
pub struct DilemmaOutput {
    pub records: Vec<DilemmaRecord>,
    pub window: SampleWindow,
    pub truth_i: Histogram,
    pub truth_j: Histogram,
    pub s_true: f64,
}

/// Pools `samples_per_step` independent replicates of the drifting stream over `[i, j]`.
pub fn pooled_window(cfg: &DilemmaConfig) -> Result<SampleWindow> {
    if cfg.samples_per_step == 0 {
        return Err(Error::Config("samples per step must be at least 1".into()));
    }
    let spec = WindowSpec::new(cfg.i, cfg.j)?;
    let mut seeds = RngHandle::new(cfg.seed);
    let mut items: Vec<Instance> = Vec::with_capacity((cfg.j - cfg.i + 1) as usize * cfg.samples_per_step);
    for _ in 0..cfg.samples_per_step {
        let stream = gaussian_drift_stream(&cfg.drift(seeds.next_u64()))?;
        items.extend(stream.into_iter().filter(|it| spec.contains(it.t)));
    }
    SampleWindow::new(spec, items)
}

pub fn dilemma_sweep(cfg: &DilemmaConfig) -> Result<DilemmaOutput> {
    let ks = cfg.k_grid()?;
    let binning = cfg.binning()?;
    let window = pooled_window(cfg)?;
    let drift = cfg.drift(0);
    let mut truth_rng = RngHandle::new(cfg.seed).child();
    let draw = |mu: f64, rng: &mut RngHandle| -> Vec<f64> {
        (0..cfg.true_samples).map(|_| rng.normal(mu, cfg.sigma)).collect()
    };
    let truth_i = Histogram::from_samples(&draw(drift.mu(cfg.i), &mut truth_rng), binning)?;
    let truth_j = Histogram::from_samples(&draw(drift.mu(cfg.j), &mut truth_rng), binning)?;
    let s_true = dissimilarity(&truth_i, &truth_j)?;
    let records: Vec<Option<DilemmaRecord>> = ks
        .par_iter()
        .map(|&k| -> Result<Option<DilemmaRecord>> {
            let (l, r) = partition(&window, k)?;
            let (lx, rx) = (l.first_feature(), r.first_feature());
            if lx.len() < 2 || rx.len() < 2 {
                log::warn!("k = {k}: sub-window sizes {} / {} below 2, skipped", lx.len(), rx.len());
                return Ok(None);
            }
            let s_empirical = dissimilarity(
                &Histogram::from_samples(&lx, binning)?,
                &Histogram::from_samples(&rx, binning)?,
            )?;
            Ok(Some(DilemmaRecord {
                k,
                left: MeanStd::of(&lx),
                right: MeanStd::of(&rx),
                s_empirical,
                s_true,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(DilemmaOutput {
        records: records.into_iter().flatten().collect(),
        window,
        truth_i,
        truth_j,
        s_true,
    })
}

pub fn dilemma_csv(records: &[DilemmaRecord]) -> String {
    let mut out = String::from(
        "k,left_n,left_mean,left_std,right_n,right_mean,right_std,s_empirical,s_true\n",
    );
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.k,
            r.left.n,
            r.left.mean,
            r.left.std,
            r.right.n,
            r.right.mean,
            r.right.std,
            r.s_empirical,
            r.s_true
        )
        .expect("writing to a String");
    }
    out
}

/// Histogram masses for four panels: the true distributions at `i` and `j`, and the two
/// sub-windows at `k = i + 1`, the midpoint, and `k = j - 1`.
pub fn histogram_panels(cfg: &DilemmaConfig, out: &DilemmaOutput) -> Result<String> {
    let binning = out.truth_i.binning();
    let edges = binning.edges();
    let mid = cfg.i + (cfg.j - cfg.i) / 2;
    let mut panels: Vec<(String, Histogram, Histogram)> =
        vec![("truth".into(), out.truth_i.clone(), out.truth_j.clone())];
    for (name, k) in [("k_near_i", cfg.i + 1), ("k_mid", mid), ("k_near_j", cfg.j - 1)] {
        let (l, r) = partition(&out.window, k)?;
        panels.push((
            format!("{name}={k}"),
            Histogram::from_samples(&l.first_feature(), binning)?,
            Histogram::from_samples(&r.first_feature(), binning)?,
        ));
    }
    let mut s = String::from("panel,bin_lo,bin_hi,left_mass,right_mass\n");
    for (name, l, r) in &panels {
        for b in 0..binning.n_bins {
            writeln!(
                s,
                "{name},{},{},{},{}",
                edges[b],
                edges[b + 1],
                l.masses()[b],
                r.masses()[b]
            )
            .expect("writing to a String");
        }
    }
    Ok(s)
}

/// One concept's extent: active on `[start, end)` with `samples` observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConceptSpan {
    pub concept: usize,
    pub start: u64,
    pub end: u64,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthDriftStats {
    pub concept: usize,
    pub persistence: u64,
    pub sample_size: u64,
    pub sample_rate: f64,
    /// Fewer samples than the configured floor.
    pub blip: bool,
}

pub fn ground_truth_stats(
    schedule: &[ConceptSpan],
    blip_floor: u64,
) -> Result<Vec<GroundTruthDriftStats>> {
    let mut sorted = schedule.to_vec();
    sorted.sort_by_key(|c| c.start);
    for c in &sorted {
        if c.end <= c.start {
            return Err(Error::Schedule(format!(
                "concept {} has empty interval [{}, {})",
                c.concept, c.start, c.end
            )));
        }
    }
    for w in sorted.windows(2) {
        if w[1].start < w[0].end {
            return Err(Error::Schedule(format!(
                "concepts {} and {} overlap",
                w[0].concept, w[1].concept
            )));
        }
    }
    Ok(schedule
        .iter()
        .map(|c| {
            let persistence = c.end - c.start;
            GroundTruthDriftStats {
                concept: c.concept,
                persistence,
                sample_size: c.samples,
                sample_rate: c.samples as f64 / persistence as f64,
                blip: c.samples < blip_floor,
            }
        })
        .collect())
}

/// Concept schedule of a synthetic drift stream: one concept per distinct mean.
pub fn concept_schedule(cfg: &SyntheticDriftConfig, samples_per_step: u64) -> Vec<ConceptSpan> {
    let mut spans: Vec<ConceptSpan> = Vec::new();
    for t in 0..cfg.n_steps as u64 {
        let mu = cfg.mu(t);
        match spans.last_mut() {
            Some(last) if cfg.mu(last.start) == mu => {
                last.end = t + 1;
                last.samples += samples_per_step;
            }
            _ => spans.push(ConceptSpan {
                concept: spans.len(),
                start: t,
                end: t + 1,
                samples: samples_per_step,
            }),
        }
    }
    spans
}
