//! Benchmark stream descriptors, file loading, the fetch manifest, and seeded synthetic streams.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::stream::{Instance, RngHandle, StreamSchema};

/// Shape and schedule of one benchmark stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub id: String,
    pub name: String,
    pub n_classes: usize,
    pub n_features: usize,
    pub n_samples: usize,
    /// Period of the periodic-reset models.
    pub reset_n: usize,
    /// Retraining period of the batch forests.
    pub retrain_n: usize,
    /// File name relative to the dataset root.
    pub file: String,
}

/// (id, name, classes, features, samples, reset N, retrain N)
const TABLE: [(&str, &str, usize, usize, usize, usize, usize); 11] = [
    ("EL", "Electricity", 2, 8, 45_312, 60, 50),
    ("FC", "Forest Covertype", 8, 54, 581_012, 60, 5000),
    ("IA", "INSECTS-Abrupt (balanced)", 6, 33, 52_848, 60, 500),
    ("II", "INSECTS-Incremental (balanced)", 6, 33, 57_018, 60, 500),
    ("KS", "Keystroke", 4, 10, 1_600, 60, 50),
    ("LX", "Luxembourg", 2, 30, 1_901, 32, 50),
    ("MR", "MIRS", 2, 3_600, 4_260, 60, 50),
    ("NW", "NOAA Weather", 2, 8, 18_159, 120, 50),
    ("OZ", "Ozone", 2, 72, 2_534, 84, 50),
    ("RT", "Rialto", 10, 27, 82_250, 60, 50),
    ("YG", "Yoga", 2, 426, 3_300, 60, 50),
];

pub const KNOWN_IDS: [&str; 11] = [
    "EL", "FC", "IA", "II", "KS", "LX", "MR", "NW", "OZ", "RT", "YG",
];

impl DatasetDescriptor {
    /// Descriptor of one of the eleven benchmark streams.
    pub fn known(id: &str) -> Option<Self> {
        TABLE
            .iter()
            .find(|row| row.0 == id)
            .map(|&(id, name, c, f, n, reset, retrain)| DatasetDescriptor {
                id: id.to_string(),
                name: name.to_string(),
                n_classes: c,
                n_features: f,
                n_samples: n,
                reset_n: reset,
                retrain_n: retrain,
                file: format!("{id}.arff"),
            })
    }

    pub fn all_known() -> Vec<Self> {
        KNOWN_IDS.iter().filter_map(|id| Self::known(id)).collect()
    }
}

/// Which column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelColumn {
    Last,
    Index(usize),
    Name(String),
}

impl Default for LabelColumn {
    fn default() -> Self {
        LabelColumn::Last
    }
}

impl std::str::FromStr for LabelColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("last") {
            Ok(LabelColumn::Last)
        } else if let Ok(i) = s.parse::<usize>() {
            Ok(LabelColumn::Index(i))
        } else if s.is_empty() {
            Err(Error::Config("empty label column".into()))
        } else {
            Ok(LabelColumn::Name(s.to_string()))
        }
    }
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Last => f.write_str("last"),
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Auto,
    Char(char),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadOptions {
    pub label: LabelColumn,
    pub delimiter: Delimiter,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            label: LabelColumn::Last,
            delimiter: Delimiter::Auto,
        }
    }
}

/// A loaded stream: labeled instances with ordinal timesteps `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedStream {
    pub schema: StreamSchema,
    pub instances: Vec<Instance>,
}

/// Loads a delimited-text or ARFF file and checks it against `descriptor`.
pub fn load_stream(
    path: &Path,
    descriptor: &DatasetDescriptor,
    opts: &LoadOptions,
) -> Result<LoadedStream> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let loaded = parse_stream(&text, opts)?;
    check_descriptor(&loaded, descriptor)?;
    Ok(loaded)
}

/// Compares instance, feature and class counts with the descriptor.
pub fn check_descriptor(loaded: &LoadedStream, d: &DatasetDescriptor) -> Result<()> {
    let checks: [(&'static str, usize, usize); 3] = [
        ("n_samples", d.n_samples, loaded.instances.len()),
        ("n_features", d.n_features, loaded.schema.n_features()),
        ("n_classes", d.n_classes, loaded.schema.n_classes()),
    ];
    for (field, expected, actual) in checks {
        if expected != actual {
            return Err(Error::Integrity {
                dataset: d.id.clone(),
                field,
                expected: expected.to_string(),
                actual: actual.to_string(),
            });
        }
    }
    Ok(())
}

/// Parses file contents without any descriptor check.
pub fn parse_stream(text: &str, opts: &LoadOptions) -> Result<LoadedStream> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('%'));
    match first {
        Some(l) if l.starts_with('@') => parse_arff(text, opts),
        _ => parse_delimited(text, opts),
    }
}

fn is_missing(field: &str) -> bool {
    field.is_empty() || field == "?" || field.eq_ignore_ascii_case("nan")
}

fn parse_number(field: &str, row: usize, col: usize) -> Result<f64> {
    if is_missing(field) {
        return Err(Error::Parse {
            row,
            msg: format!("missing value in column {col}"),
        });
    }
    field.parse::<f64>().map_err(|_| Error::Parse {
        row,
        msg: format!("column {col}: `{field}` is not a number"),
    })
}

fn resolve_label_index(label: &LabelColumn, names: Option<&[String]>, width: usize) -> Result<usize> {
    let idx = match label {
        LabelColumn::Last => width.checked_sub(1),
        LabelColumn::Index(i) => Some(*i),
        LabelColumn::Name(n) => names.and_then(|ns| ns.iter().position(|c| c == n)),
    };
    match idx {
        Some(i) if i < width => Ok(i),
        _ => Err(Error::Config(format!(
            "label column `{label}` not found among {width} columns"
        ))),
    }
}

/// Interns labels to ids in first-appearance order, unless `declared` fixes the order.
struct Interner {
    ids: HashMap<String, usize>,
    labels: Vec<String>,
    fixed: bool,
}

impl Interner {
    fn new(declared: Option<Vec<String>>) -> Self {
        match declared {
            Some(labels) => Self {
                ids: labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect(),
                labels,
                fixed: true,
            },
            None => Self {
                ids: HashMap::new(),
                labels: Vec::new(),
                fixed: false,
            },
        }
    }

    fn intern(&mut self, label: &str, row: usize) -> Result<usize> {
        if is_missing(label) {
            return Err(Error::Parse {
                row,
                msg: "missing class label".into(),
            });
        }
        if let Some(&id) = self.ids.get(label) {
            return Ok(id);
        }
        if self.fixed {
            return Err(Error::Parse {
                row,
                msg: format!("label `{label}` not declared in header"),
            });
        }
        let id = self.labels.len();
        self.ids.insert(label.to_string(), id);
        self.labels.push(label.to_string());
        Ok(id)
    }
}

fn detect_delimiter(line: &str) -> char {
    let commas = line.matches(',').count();
    let semis = line.matches(';').count();
    if semis > commas {
        ';'
    } else {
        ','
    }
}

fn split_fields(line: &str, delim: char) -> Vec<&str> {
    line.split(delim)
        .map(|f| f.trim().trim_matches('"').trim_matches('\''))
        .collect()
}

fn parse_delimited(text: &str, opts: &LoadOptions) -> Result<LoadedStream> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let Some((first_row, first_line)) = rows.next() else {
        return Err(Error::Parse {
            row: 0,
            msg: "empty file".into(),
        });
    };
    let delim = match opts.delimiter {
        Delimiter::Auto => detect_delimiter(first_line),
        Delimiter::Char(c) => c,
    };
    let first_fields = split_fields(first_line, delim);
    let width = first_fields.len();
    if width < 2 {
        return Err(Error::Parse {
            row: first_row,
            msg: "need at least one feature column and a label column".into(),
        });
    }

    // A header row has a feature field that is neither numeric nor a missing marker.
    let header: Option<Vec<String>> = {
        let label_guess = resolve_label_index(&opts.label, None, width).ok();
        let numeric = first_fields
            .iter()
            .enumerate()
            .filter(|(c, _)| Some(*c) != label_guess)
            .all(|(_, f)| is_missing(f) || f.parse::<f64>().is_ok());
        if numeric && !matches!(opts.label, LabelColumn::Name(_)) {
            None
        } else {
            Some(first_fields.iter().map(|s| s.to_string()).collect())
        }
    };
    let label_idx = resolve_label_index(&opts.label, header.as_deref(), width)?;

    let feature_names: Vec<String> = match &header {
        Some(names) => names
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != label_idx)
            .map(|(_, n)| n.clone())
            .collect(),
        None => (0..width - 1).map(|i| format!("f{i}")).collect(),
    };

    let mut interner = Interner::new(None);
    let mut instances = Vec::new();
    let data_rows: Box<dyn Iterator<Item = (usize, &str)>> = if header.is_some() {
        Box::new(rows)
    } else {
        Box::new(std::iter::once((first_row, first_line)).chain(rows))
    };
    for (row, line) in data_rows {
        let fields = split_fields(line, delim);
        if fields.len() != width {
            return Err(Error::Parse {
                row,
                msg: format!("expected {width} fields, found {}", fields.len()),
            });
        }
        let mut x = Vec::with_capacity(width - 1);
        for (c, f) in fields.iter().enumerate() {
            if c != label_idx {
                x.push(parse_number(f, row, c)?);
            }
        }
        let y = interner.intern(fields[label_idx], row)?;
        let t = instances.len() as u64;
        instances.push(Instance::labeled(t, x, y));
    }
    let schema = StreamSchema::new(feature_names, interner.labels)?;
    Ok(LoadedStream { schema, instances })
}

#[derive(Debug, Clone)]
enum ArffType {
    Numeric,
    Nominal(Vec<String>),
}

fn parse_nominal_values(spec: &str) -> Vec<String> {
    spec.trim_start_matches('{')
        .trim_end_matches('}')
        .split(',')
        .map(|v| v.trim().trim_matches('\'').trim_matches('"').to_string())
        .filter(|v| !v.is_empty())
        .collect()
}

fn parse_arff(text: &str, opts: &LoadOptions) -> Result<LoadedStream> {
    let mut attrs: Vec<(String, ArffType)> = Vec::new();
    let mut in_data = false;
    let mut data: Vec<(usize, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let row = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if in_data {
            data.push((row, line));
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            continue;
        } else if lower.starts_with("@attribute") {
            let rest = line["@attribute".len()..].trim();
            let (name, ty) = if let Some(stripped) = rest.strip_prefix('\'') {
                let end = stripped.find('\'').ok_or_else(|| Error::Parse {
                    row,
                    msg: "unterminated attribute name".into(),
                })?;
                (stripped[..end].to_string(), stripped[end + 1..].trim())
            } else {
                let mut parts = rest.splitn(2, char::is_whitespace);
                let name = parts.next().unwrap_or_default().to_string();
                (name, parts.next().unwrap_or_default().trim())
            };
            let ty_lower = ty.to_ascii_lowercase();
            let ty = if ty.starts_with('{') {
                ArffType::Nominal(parse_nominal_values(ty))
            } else if ["numeric", "real", "integer"].contains(&ty_lower.as_str()) {
                ArffType::Numeric
            } else {
                return Err(Error::Parse {
                    row,
                    msg: format!("unsupported attribute type `{ty}`"),
                });
            };
            attrs.push((name, ty));
        } else if lower.starts_with("@data") {
            in_data = true;
        } else {
            return Err(Error::Parse {
                row,
                msg: format!("unexpected header line `{line}`"),
            });
        }
    }
    let width = attrs.len();
    let names: Vec<String> = attrs.iter().map(|a| a.0.clone()).collect();
    let label_idx = resolve_label_index(&opts.label, Some(&names), width)?;
    let declared = match &attrs[label_idx].1 {
        ArffType::Nominal(values) => Some(values.clone()),
        ArffType::Numeric => None,
    };
    let mut interner = Interner::new(declared);
    let feature_names: Vec<String> = names
        .iter()
        .enumerate()
        .filter(|(c, _)| *c != label_idx)
        .map(|(_, n)| n.clone())
        .collect();

    let mut instances = Vec::with_capacity(data.len());
    for (row, line) in data {
        if line.starts_with('{') {
            return Err(Error::Parse {
                row,
                msg: "sparse ARFF rows are not supported".into(),
            });
        }
        let fields = split_fields(line, ',');
        if fields.len() != width {
            return Err(Error::Parse {
                row,
                msg: format!("expected {width} fields, found {}", fields.len()),
            });
        }
        let mut x = Vec::with_capacity(width - 1);
        for (c, f) in fields.iter().enumerate() {
            if c == label_idx {
                continue;
            }
            // Nominal features become the index of their declared value.
            let v = match &attrs[c].1 {
                ArffType::Numeric => parse_number(f, row, c)?,
                ArffType::Nominal(values) => {
                    if is_missing(f) {
                        return Err(Error::Parse {
                            row,
                            msg: format!("missing value in column {c}"),
                        });
                    }
                    values.iter().position(|v| v == f).ok_or_else(|| Error::Parse {
                        row,
                        msg: format!("column {c}: `{f}` not among declared values"),
                    })? as f64
                }
            };
            x.push(v);
        }
        let y = interner.intern(fields[label_idx], row)?;
        let t = instances.len() as u64;
        instances.push(Instance::labeled(t, x, y));
    }
    let schema = StreamSchema::new(feature_names, interner.labels)?;
    Ok(LoadedStream { schema, instances })
}

/// One manifest line: where a dataset lives and how to check it.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub url: String,
    /// Lower-case hex SHA-256 of the file, when known.
    pub sha256: Option<String>,
    pub label: LabelColumn,
    pub descriptor: DatasetDescriptor,
}

impl ManifestEntry {
    pub fn id(&self) -> &str {
        &self.descriptor.id
    }

    pub fn path_under(&self, root: &Path) -> PathBuf {
        root.join(&self.descriptor.file)
    }

    pub fn load(&self, root: &Path) -> Result<LoadedStream> {
        let path = self.path_under(root);
        if !path.exists() {
            return Err(Error::MissingDataset {
                id: self.id().to_string(),
                path,
                entry: self.to_line(),
            });
        }
        let opts = LoadOptions {
            label: self.label.clone(),
            delimiter: Delimiter::Auto,
        };
        load_stream(&path, &self.descriptor, &opts)
    }

    pub fn to_line(&self) -> String {
        let d = &self.descriptor;
        let base = format!(
            "{} {} {} {} {}",
            d.id,
            self.url,
            self.sha256.as_deref().unwrap_or("-"),
            self.label,
            d.file
        );
        if DatasetDescriptor::known(&d.id).is_some() {
            base
        } else {
            format!(
                "{base} {} {} {} {} {}",
                d.n_classes, d.n_features, d.n_samples, d.reset_n, d.retrain_n
            )
        }
    }
}

/// Plain-text fetch manifest.
///
/// One dataset per line, whitespace separated, `#` starts a comment:
///
/// ```text
/// id url sha256|- label-column file [classes features samples reset_n retrain_n]
/// ```
///
/// The five trailing counts are required for ids outside the benchmark table and
/// forbidden for ids inside it, whose counts are fixed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

pub const DEFAULT_MANIFEST: &str = include_str!("../datasets.manifest");

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let row = i + 1;
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: String| Error::Parse { row, msg };
            if fields.len() != 5 && fields.len() != 10 {
                return Err(bad(format!(
                    "expected 5 or 10 fields, found {}",
                    fields.len()
                )));
            }
            let id = fields[0];
            let sha = match fields[2] {
                "-" => None,
                h if h.len() == 64 && h.chars().all(|c| c.is_ascii_hexdigit()) => {
                    Some(h.to_ascii_lowercase())
                }
                h => return Err(bad(format!("`{h}` is not a SHA-256 hex digest"))),
            };
            let label: LabelColumn = fields[3].parse()?;
            let file = fields[4].to_string();
            let descriptor = match (DatasetDescriptor::known(id), fields.len()) {
                (Some(mut d), 5) => {
                    d.file = file;
                    d
                }
                (Some(_), _) => {
                    return Err(bad(format!(
                        "{id} is a benchmark stream; its counts cannot be overridden"
                    )))
                }
                (None, 10) => {
                    let mut nums = [0usize; 5];
                    for (slot, f) in nums.iter_mut().zip(&fields[5..]) {
                        *slot = f
                            .parse()
                            .map_err(|_| bad(format!("`{f}` is not a count")))?;
                    }
                    DatasetDescriptor {
                        id: id.to_string(),
                        name: id.to_string(),
                        n_classes: nums[0],
                        n_features: nums[1],
                        n_samples: nums[2],
                        reset_n: nums[3],
                        retrain_n: nums[4],
                        file,
                    }
                }
                (None, _) => {
                    return Err(bad(format!(
                        "{id} is not a benchmark stream; give classes, features, samples, reset_n, retrain_n"
                    )))
                }
            };
            if descriptor.reset_n == 0 || descriptor.retrain_n == 0 {
                return Err(bad("reset_n and retrain_n must be positive".into()));
            }
            entries.push(ManifestEntry {
                url: fields[1].to_string(),
                sha256: sha,
                label,
                descriptor,
            });
        }
        Ok(Manifest { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn default_manifest() -> Self {
        Self::parse(DEFAULT_MANIFEST).expect("bundled manifest parses")
    }

    pub fn get(&self, id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.id() == id)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftKind {
    IncrementalGaussian,
    AbruptClassSwap,
    Stationary,
}

/// How the Gaussian mean moves between update points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuSchedule {
    /// `floor(t / period) * period / 10`: constant between updates.
    #[default]
    Step,
    /// `t / 10`: continuous ramp.
    Ramp,
}

impl std::str::FromStr for MuSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "step" => Ok(MuSchedule::Step),
            "ramp" => Ok(MuSchedule::Ramp),
            other => Err(Error::Config(format!(
                "unknown mu schedule `{other}` (step|ramp)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticDriftConfig {
    pub n_steps: usize,
    pub sigma: f64,
    pub step_period: usize,
    pub drift_kind: DriftKind,
    pub schedule: MuSchedule,
    pub rng: RngHandle,
}

impl SyntheticDriftConfig {
    /// Incremental drift with unit variance and a mean update every 10 steps.
    pub fn incremental(n_steps: usize, seed: u64) -> Self {
        Self {
            n_steps,
            sigma: 1.0,
            step_period: 10,
            drift_kind: DriftKind::IncrementalGaussian,
            schedule: MuSchedule::Step,
            rng: RngHandle::new(seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be at least 1".into()));
        }
        if self.step_period == 0 {
            return Err(Error::Config("step_period must be at least 1".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config("sigma must be positive".into()));
        }
        Ok(())
    }

    /// Generating mean at timestep `t`.
    pub fn mu(&self, t: u64) -> f64 {
        match self.drift_kind {
            DriftKind::Stationary | DriftKind::AbruptClassSwap => 0.0,
            DriftKind::IncrementalGaussian => match self.schedule {
                MuSchedule::Step => {
                    let p = self.step_period as u64;
                    (t / p) as f64 * (p as f64 / 10.0)
                }
                MuSchedule::Ramp => t as f64 / 10.0,
            },
        }
    }
}

/// Unlabeled univariate stream `X_t ~ N(mu_t, sigma^2)`, one instance per timestep.
pub fn gaussian_drift_stream(cfg: &SyntheticDriftConfig) -> Result<Vec<Instance>> {
    cfg.validate()?;
    if cfg.drift_kind == DriftKind::AbruptClassSwap {
        return Err(Error::Config(
            "abrupt class swaps are generated by abrupt_class_stream".into(),
        ));
    }
    let mut rng = cfg.rng.clone();
    Ok((0..cfg.n_steps as u64)
        .map(|t| Instance::unlabeled(t, vec![rng.normal(cfg.mu(t), cfg.sigma)]))
        .collect())
}

/// Two-feature, two-class stream whose class-conditional means swap at `switch_t`.
///
/// Labels alternate 0, 1, 0, ...; before the switch class 0 is centred at (0, 0) and
/// class 1 at (3, 3), afterwards the other way round. Unit variance per feature.
pub fn abrupt_class_stream(
    n_steps: usize,
    switch_t: usize,
    rng: &mut RngHandle,
) -> Result<Vec<Instance>> {
    if !(0 < switch_t && switch_t < n_steps) {
        return Err(Error::Config(format!(
            "switch point {switch_t} must lie in (0, {n_steps})"
        )));
    }
    Ok((0..n_steps)
        .map(|t| {
            let y = t % 2;
            let high = (y == 1) ^ (t >= switch_t);
            let centre = if high { 3.0 } else { 0.0 };
            let x = vec![rng.normal(centre, 1.0), rng.normal(centre, 1.0)];
            Instance::labeled(t as u64, x, y)
        })
        .collect())
}

/// Stationary, linearly separable classes: class `c` of `n_classes` is centred at
/// `separation * c` in every feature.
pub fn gaussian_classes_stream(
    n_steps: usize,
    n_features: usize,
    n_classes: usize,
    separation: f64,
    rng: &mut RngHandle,
) -> Vec<Instance> {
    (0..n_steps)
        .map(|t| {
            let y = rng.below(n_classes);
            let x = (0..n_features)
                .map(|_| rng.normal(separation * y as f64, 1.0))
                .collect();
            Instance::labeled(t as u64, x, y)
        })
        .collect()
}

/// Classes arrive in contiguous blocks of `block_len`, cycling through `n_classes`,
/// as in a typing-session stream where each subject types in turn. Each class is a
/// Gaussian blob whose centre wanders slowly between repetitions.
pub fn blocked_class_stream(
    n_blocks: usize,
    block_len: usize,
    n_features: usize,
    n_classes: usize,
    rng: &mut RngHandle,
) -> Vec<Instance> {
    let mut centres: Vec<Vec<f64>> = (0..n_classes)
        .map(|_| (0..n_features).map(|_| rng.normal(0.0, 2.0)).collect())
        .collect();
    let mut out = Vec::with_capacity(n_blocks * block_len);
    for b in 0..n_blocks {
        let y = b % n_classes;
        for c in centres[y].iter_mut() {
            *c += rng.normal(0.0, 0.1);
        }
        for _ in 0..block_len {
            let x = centres[y].iter().map(|&m| rng.normal(m, 1.0)).collect();
            let t = out.len() as u64;
            out.push(Instance::labeled(t, x, y));
        }
    }
    out
}
