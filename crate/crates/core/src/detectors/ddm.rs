use super::DetectorSignal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdmConfig {
    pub min_instances: u64,
    pub warning_level: f64,
    pub drift_level: f64,
}

impl Default for DdmConfig {
    fn default() -> Self {
        Self {
            min_instances: 30,
            warning_level: 2.0,
            drift_level: 3.0,
        }
    }
}

/// Drift detection method on a binary error stream.
///
/// Levels compare strictly (`p + s > p_min + k * s_min`): with non-strict comparison an
/// error-free stream, where every term is zero, would signal drift on its first check.
#[derive(Debug, Clone)]
pub struct Ddm {
    cfg: DdmConfig,
    n: u64,
    p: f64,
    s: f64,
    p_min: f64,
    s_min: f64,
}

impl Ddm {
    pub fn new(cfg: DdmConfig) -> Self {
        Self {
            cfg,
            n: 0,
            p: 0.0,
            s: 0.0,
            p_min: f64::INFINITY,
            s_min: f64::INFINITY,
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn error_rate(&self) -> f64 {
        self.p
    }

    pub fn std_dev(&self) -> f64 {
        self.s
    }

    /// `(p_min, s_min)`; infinite until the warm-up has passed.
    pub fn minimum(&self) -> (f64, f64) {
        (self.p_min, self.s_min)
    }

    pub fn update(&mut self, correct: bool) -> DetectorSignal {
        let err = if correct { 0.0 } else { 1.0 };
        self.n += 1;
        let n = self.n as f64;
        self.p += (err - self.p) / n;
        self.s = (self.p * (1.0 - self.p) / n).sqrt();
        if self.n < self.cfg.min_instances {
            return DetectorSignal::Stable;
        }
        let level = self.p + self.s;
        if level <= self.p_min + self.s_min {
            self.p_min = self.p;
            self.s_min = self.s;
        }
        if level > self.p_min + self.cfg.drift_level * self.s_min {
            self.reset();
            DetectorSignal::Drift
        } else if level > self.p_min + self.cfg.warning_level * self.s_min {
            DetectorSignal::Warning
        } else {
            DetectorSignal::Stable
        }
    }

    pub fn reset(&mut self) {
        *self = Self::new(self.cfg);
    }
}
