//! ADWIN over an exponential histogram.
//!
//! Row `l` holds buckets summarising `2^l` values each, newest at the front. When a row
//! exceeds `max_buckets`, its two oldest buckets merge into the newest slot of the row
//! above. Every `clock` insertions the window is scanned from oldest to newest at bucket
//! boundaries; a split whose sub-window means differ by at least the cut threshold drops
//! the oldest bucket, and the scan repeats until no split is significant.

use std::collections::VecDeque;

use super::DetectorSignal;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdwinConfig {
    pub delta: f64,
    /// Buckets kept per row before the two oldest merge.
    pub max_buckets: usize,
    /// Smallest sub-window length on either side of a tested split.
    pub min_sub_window: u64,
    /// The window is tested for a cut once per `clock` insertions.
    pub clock: u64,
}

impl Default for AdwinConfig {
    fn default() -> Self {
        Self {
            delta: 0.002,
            max_buckets: 5,
            min_sub_window: 5,
            clock: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Bucket {
    total: f64,
    /// Sum of squared deviations from the bucket mean.
    variance: f64,
}

#[derive(Debug, Clone)]
pub struct Adwin {
    cfg: AdwinConfig,
    rows: Vec<VecDeque<Bucket>>,
    width: u64,
    total: f64,
    variance: f64,
    ticks: u64,
    n_detections: u64,
}

impl Adwin {
    pub fn new(cfg: AdwinConfig) -> Result<Self> {
        if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
            return Err(Error::Config(format!("ADWIN delta {} outside (0, 1)", cfg.delta)));
        }
        if cfg.max_buckets < 2 || cfg.clock == 0 {
            return Err(Error::Config(
                "ADWIN needs at least two buckets per row and a positive clock".into(),
            ));
        }
        Ok(Self {
            cfg,
            rows: Vec::new(),
            width: 0,
            total: 0.0,
            variance: 0.0,
            ticks: 0,
            n_detections: 0,
        })
    }

    pub fn with_delta(delta: f64) -> Result<Self> {
        Self::new(AdwinConfig {
            delta,
            ..Default::default()
        })
    }

    pub fn config(&self) -> &AdwinConfig {
        &self.cfg
    }

    pub fn width(&self) -> u64 {
        self.width
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn mean(&self) -> f64 {
        if self.width == 0 {
            0.0
        } else {
            self.total / self.width as f64
        }
    }

    /// Population variance of the window.
    pub fn variance(&self) -> f64 {
        if self.width == 0 {
            0.0
        } else {
            self.variance / self.width as f64
        }
    }

    pub fn n_detections(&self) -> u64 {
        self.n_detections
    }

    pub fn n_buckets(&self) -> usize {
        self.rows.iter().map(VecDeque::len).sum()
    }

    /// Count and sum rebuilt from the buckets alone.
    pub fn bucket_aggregates(&self) -> (u64, f64) {
        let mut n = 0;
        let mut s = 0.0;
        for (level, row) in self.rows.iter().enumerate() {
            for b in row {
                n += 1u64 << level;
                s += b.total;
            }
        }
        (n, s)
    }

    /// Inserts `value`, which must lie in `[0, 1]`, and returns the signal with the
    /// window mean after any cuts.
    pub fn update(&mut self, value: f64) -> Result<(DetectorSignal, f64)> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Input(format!("ADWIN input {value} outside [0, 1]")));
        }
        self.insert(value);
        self.ticks += 1;
        let mut signal = DetectorSignal::Stable;
        if self.ticks % self.cfg.clock == 0 && self.detect_change() {
            self.n_detections += 1;
            signal = DetectorSignal::Drift;
        }
        Ok((signal, self.mean()))
    }

    fn insert(&mut self, value: f64) {
        self.width += 1;
        if self.width > 1 {
            let prev_mean = self.total / (self.width - 1) as f64;
            let w = self.width as f64;
            self.variance += (w - 1.0) * (value - prev_mean) * (value - prev_mean) / w;
        }
        self.total += value;
        if self.rows.is_empty() {
            self.rows.push(VecDeque::new());
        }
        self.rows[0].push_front(Bucket {
            total: value,
            variance: 0.0,
        });
        self.compress();
    }

    fn compress(&mut self) {
        let mut level = 0;
        while level < self.rows.len() && self.rows[level].len() > self.cfg.max_buckets {
            let older = self.rows[level].pop_back().expect("row over capacity");
            let newer = self.rows[level].pop_back().expect("row over capacity");
            let n = (1u64 << level) as f64;
            let diff = older.total / n - newer.total / n;
            let merged = Bucket {
                total: older.total + newer.total,
                variance: older.variance + newer.variance + n * n * diff * diff / (2.0 * n),
            };
            if level + 1 == self.rows.len() {
                self.rows.push(VecDeque::new());
            }
            self.rows[level + 1].push_front(merged);
            level += 1;
        }
    }

    fn drop_oldest(&mut self) {
        let level = self.rows.len() - 1;
        let b = self.rows[level].pop_back().expect("top row is never empty");
        if self.rows[level].is_empty() {
            self.rows.pop();
        }
        let n1 = (1u64 << level) as f64;
        self.width -= 1u64 << level;
        self.total -= b.total;
        if self.width == 0 {
            self.total = 0.0;
            self.variance = 0.0;
            return;
        }
        let w = self.width as f64;
        let u1 = b.total / n1;
        let rest = self.total / w;
        self.variance -= b.variance + n1 * w * (u1 - rest) * (u1 - rest) / (n1 + w);
        self.variance = self.variance.max(0.0);
    }

    fn detect_change(&mut self) -> bool {
        let mut changed = false;
        let min = self.cfg.min_sub_window;
        loop {
            if self.width <= 2 * (min + 1) {
                break;
            }
            let mut cut = false;
            let (mut n0, mut u0) = (0u64, 0.0);
            'scan: for level in (0..self.rows.len()).rev() {
                let size = 1u64 << level;
                for b in self.rows[level].iter().rev() {
                    n0 += size;
                    u0 += b.total;
                    let n1 = self.width - n0;
                    if n1 <= min + 1 {
                        break 'scan;
                    }
                    if n0 > min + 1 && self.cut_expression(n0, n1, u0, self.total - u0) {
                        cut = true;
                        break 'scan;
                    }
                }
            }
            if !cut {
                break;
            }
            changed = true;
            self.drop_oldest();
        }
        changed
    }

    fn cut_expression(&self, n0: u64, n1: u64, u0: f64, u1: f64) -> bool {
        let (n0, n1) = (n0 as f64, n1 as f64);
        let n = self.width as f64;
        let diff = (u0 / n0 - u1 / n1).abs();
        let v = self.variance();
        let dd = (2.0 * n.ln() / self.cfg.delta).ln();
        if !(dd > 0.0) {
            return false;
        }
        let mwl = self.cfg.min_sub_window as f64;
        let m = 1.0 / (n0 - mwl + 1.0) + 1.0 / (n1 - mwl + 1.0);
        let eps = (2.0 * m * v * dd).sqrt() + 2.0 / 3.0 * dd * m;
        diff >= eps
    }

    pub fn reset(&mut self) {
        *self = Self::new(self.cfg).expect("config was validated");
    }
}
