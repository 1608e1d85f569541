//! Instances, schemas, windows and the seeded generator shared by every module.
//!
//! Timesteps are ordinal indices into the stream, not wall-clock times.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feature and label spaces of a stream. Class ids are indices into `class_labels`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSchema {
    feature_names: Vec<String>,
    class_labels: Vec<String>,
}

impl StreamSchema {
    pub fn new(feature_names: Vec<String>, class_labels: Vec<String>) -> Result<Self> {
        if feature_names.is_empty() {
            return Err(Error::Config("schema needs at least one feature".into()));
        }
        Ok(Self {
            feature_names,
            class_labels,
        })
    }

    /// Schema with generated names `f0..f{n-1}` and classes `"0".."{c-1}"`.
    pub fn anonymous(n_features: usize, n_classes: usize) -> Result<Self> {
        Self::new(
            (0..n_features).map(|i| format!("f{i}")).collect(),
            (0..n_classes).map(|c| c.to_string()).collect(),
        )
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    pub fn check_features(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(Error::Input(format!(
                "expected {} features, got {}",
                self.n_features(),
                x.len()
            )));
        }
        Ok(())
    }

    pub fn check_class(&self, y: usize) -> Result<()> {
        if y >= self.n_classes() {
            return Err(Error::Input(format!(
                "class id {y} outside 0..{}",
                self.n_classes()
            )));
        }
        Ok(())
    }

    pub fn validate(&self, inst: &Instance) -> Result<()> {
        self.check_features(&inst.x)?;
        if let Some(y) = inst.y {
            self.check_class(y)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub t: u64,
    pub x: Vec<f64>,
    pub y: Option<usize>,
}

impl Instance {
    pub fn labeled(t: u64, x: Vec<f64>, y: usize) -> Self {
        Self { t, x, y: Some(y) }
    }

    pub fn unlabeled(t: u64, x: Vec<f64>) -> Self {
        Self { t, x, y: None }
    }
}

/// Checks that timesteps strictly increase along `stream`.
pub fn check_monotone(stream: &[Instance]) -> Result<()> {
    for pair in stream.windows(2) {
        if pair[1].t <= pair[0].t {
            return Err(Error::Input(format!(
                "timestep {} follows {}; stream timesteps must strictly increase",
                pair[1].t, pair[0].t
            )));
        }
    }
    Ok(())
}

/// Bounds of a window `W(i, j)` with an optional partition point `k`; all inclusive timesteps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    i: u64,
    j: u64,
    k: Option<u64>,
}

impl WindowSpec {
    pub fn new(i: u64, j: u64) -> Result<Self> {
        if i >= j {
            return Err(Error::Input(format!("window start {i} must precede end {j}")));
        }
        Ok(Self { i, j, k: None })
    }

    pub fn with_partition(i: u64, j: u64, k: u64) -> Result<Self> {
        let mut spec = Self::new(i, j)?;
        if !(i < k && k < j) {
            return Err(Error::Input(format!(
                "partition {k} must lie strictly inside ({i}, {j})"
            )));
        }
        spec.k = Some(k);
        Ok(spec)
    }

    pub fn i(&self) -> u64 {
        self.i
    }

    pub fn j(&self) -> u64 {
        self.j
    }

    pub fn k(&self) -> Option<u64> {
        self.k
    }

    pub fn contains(&self, t: u64) -> bool {
        self.i <= t && t <= self.j
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleWindow {
    pub spec: WindowSpec,
    pub items: Vec<Instance>,
}

impl SampleWindow {
    /// Builds a window, sorting items by timestep (stable) and rejecting any outside the bounds.
    pub fn new(spec: WindowSpec, mut items: Vec<Instance>) -> Result<Self> {
        if let Some(bad) = items.iter().find(|it| !spec.contains(it.t)) {
            return Err(Error::Input(format!(
                "timestep {} outside window [{}, {}]",
                bad.t, spec.i, spec.j
            )));
        }
        items.sort_by_key(|it| it.t);
        Ok(Self { spec, items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// First feature of every item; the univariate view used by the partition simulator.
    pub fn first_feature(&self) -> Vec<f64> {
        self.items.iter().map(|it| it.x[0]).collect()
    }
}

/// Returns the instances with `i <= t <= j`, in stream order.
pub fn slice_window(stream: &[Instance], spec: WindowSpec) -> SampleWindow {
    let start = stream.partition_point(|it| it.t < spec.i);
    let end = stream.partition_point(|it| it.t <= spec.j);
    let items = if start < end {
        stream[start..end].to_vec()
    } else {
        Vec::new()
    };
    SampleWindow { spec, items }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-cell seed: `splitmix64(master ^ splitmix64(fnv1a(model_id ++ 0xFF ++ dataset_id)))`.
///
/// The 0xFF separator cannot occur in UTF-8, so ("AB","C") and ("A","BC") hash apart.
pub fn derive_seed(master_seed: u64, model_id: &str, dataset_id: &str) -> u64 {
    debug_assert!(!model_id.is_empty() && !dataset_id.is_empty());
    let mut h = fnv1a(FNV_OFFSET, model_id.as_bytes());
    h = fnv1a(h, &[0xFF]);
    h = fnv1a(h, dataset_id.as_bytes());
    splitmix64(master_seed ^ splitmix64(h))
}

/// Seeded generator: ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed by a 64-bit seed.
///
/// Every stochastic component owns one of these; nothing draws from global randomness.
#[derive(Debug, Clone)]
pub struct RngHandle {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngHandle {
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// A new handle seeded from the next draw of this one.
    pub fn child(&mut self) -> RngHandle {
        RngHandle::new(self.next_u64())
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform index in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        Normal::new(mean, sd)
            .expect("standard deviation must be finite and non-negative")
            .sample(&mut self.rng)
    }

    pub fn poisson(&mut self, lambda: f64) -> u32 {
        Poisson::new(lambda)
            .expect("poisson rate must be positive")
            .sample(&mut self.rng) as u32
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// `k` distinct indices from `0..n`, in draw order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        let k = k.min(n);
        for i in 0..k {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
