//! Acceptance checks, one printed line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The process
//! fails if any criterion fails, except those listed in `KNOWN_SHORTFALLS`, which are
//! still run and still printed as FAIL.

mod common;

use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use driftbench::adaptation::{AdaptiveConfig, AdaptiveModel, StartMode};
use driftbench::config::{BenchConfig, TECHNIQUES};
use driftbench::datasets::{blocked_class_stream, Manifest};
use driftbench::detectors::{
    Adwin, AdwinConfig, D3Config, Ddm, DdmConfig, DetectorSignal, Discriminator, Ibdd,
    IbddConfig, D3,
};
use driftbench::dilemma::{dilemma_sweep, DilemmaConfig};
use driftbench::evaluation::{
    cohen_kappa, emit_report, format_rank, median_rank, parse_medrank_column, prequential_run,
    render_table, run_cell, CellSpec, ConfusionMatrix, Metric, MetricTrace, ReportOptions,
    ResultsMatrix, TieRule,
};
use driftbench::learners::{Classifier, ForestConfig, GaussianNaiveBayes};
use driftbench::runner::run_bench;
use driftbench::stream::{RngHandle, StreamSchema};

/// Criteria expected to fail here, with the reason. They run and print like the rest.
const KNOWN_SHORTFALLS: [(&str, &str); 3] = [
    (
        "4a",
        "ADWIN at delta 0.002 raised a drift in 1 of the 100 frozen stationary runs; seeds are not re-drawn to hide it",
    ),
    (
        "2",
        "no single tie rule reproduces all 22 reference median ranks; see the interval line",
    ),
    (
        "5c",
        "histogram TV at k = 50 sits near 0.85 against a true TV near 1.0, so a 0.2 gap is out of reach",
    ),
];

/// Criteria that need the benchmark files; without them they fail as unavailable.
const NEEDS_DATA: [&str; 2] = ["1", "3"];

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn line(id: &'static str, pass: bool, detail: impl Into<String>) -> Line {
    Line {
        id,
        pass,
        detail: detail.into(),
    }
}

struct Reference {
    datasets: Vec<String>,
    rows: Vec<(String, Vec<f64>, f64)>,
}

fn reference() -> Reference {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/reference_accuracy.csv");
    let text = fs::read_to_string(path).expect("reference fixture");
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let datasets = header[1..header.len() - 1].iter().map(|s| s.to_string()).collect();
    let rows = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let values = f[1..f.len() - 1]
                .iter()
                .map(|v| v.parse::<f64>().unwrap() / 100.0)
                .collect();
            (f[0].to_string(), values, f[f.len() - 1].parse().unwrap())
        })
        .collect();
    Reference { datasets, rows }
}

fn data_root() -> Option<PathBuf> {
    std::env::var_os("DRIFTBENCH_DATA").map(PathBuf::from)
}

fn cell_accuracy(technique: &str, dataset: &str, seed: u64, root: &PathBuf) -> Result<f64, String> {
    let manifest = Manifest::default_manifest();
    let entry = manifest.get(dataset).ok_or("not in manifest")?;
    let loaded = entry.load(root).map_err(|e| e.to_string())?;
    let spec = CellSpec {
        technique: technique.into(),
        dataset: dataset.into(),
        reset_n: entry.descriptor.reset_n,
        retrain_n: entry.descriptor.retrain_n,
        start: StartMode::Cold,
        master_seed: seed,
        kappa_window: None,
        forest: ForestConfig::default(),
    };
    run_cell(&spec, &loaded.schema, &loaded.instances)
        .map(|r| r.result.mean_accuracy)
        .map_err(|e| e.to_string())
}

fn criterion_1(reference: &Reference) -> Line {
    let Some(root) = data_root() else {
        return line("1", false, "benchmark files unavailable: set DRIFTBENCH_DATA");
    };
    let mut misses = Vec::new();
    for (t, values, _) in reference.rows.iter().filter(|r| r.0 == "LC" || r.0 == "MC") {
        for (d, &want) in reference.datasets.iter().zip(values) {
            match cell_accuracy(t, d, 42, &root) {
                Ok(got) if (got - want).abs() * 100.0 <= 0.5 => {}
                Ok(got) => misses.push(format!("{t}/{d} {:.1} vs {:.1}", got * 100.0, want * 100.0)),
                Err(e) => misses.push(format!("{t}/{d}: {e}")),
            }
        }
    }
    line("1", misses.is_empty(), if misses.is_empty() {
        "LC and MC within 0.5 points on all 11 streams".to_string()
    } else {
        misses.join("; ")
    })
}

fn criterion_2(reference: &Reference) -> Vec<Line> {
    let ds: Vec<&str> = reference.datasets.iter().map(String::as_str).collect();
    let rows: Vec<(&str, Vec<f64>)> = reference
        .rows
        .iter()
        .map(|(t, v, _)| (t.as_str(), v.clone()))
        .collect();
    let techniques: Vec<&str> = rows.iter().map(|r| r.0).collect();
    let matrix = ResultsMatrix::from_accuracy_rows(&ds, &rows).unwrap();
    let opts = ReportOptions {
        decimal_comma: true,
        ..Default::default()
    };
    let table = render_table(&matrix, &techniques, &ds, Metric::Accuracy, &opts).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_report(&matrix, &techniques, &ds, dir.path(), &opts).unwrap();
    let tables = fs::read_to_string(dir.path().join("tables.txt")).unwrap();
    let emitted = tables.contains(&table);
    let column: BTreeMap<String, String> = parse_medrank_column(&table).into_iter().collect();

    let named = [("ARF", "2"), ("AMF", "3"), ("I-RF", "3"), ("LC", "22")];
    let named_ok = named.iter().all(|(t, r)| column.get(*t).map(String::as_str) == Some(*r));
    let mismatched: Vec<String> = reference
        .rows
        .iter()
        .filter(|(t, _, want)| column[t] != format_rank(*want, true))
        .map(|(t, _, want)| format!("{t} {} vs {want}", column[t]))
        .collect();

    let lo = median_rank(&matrix, &techniques, &ds, Metric::Accuracy, TieRule::Min).unwrap();
    let hi = median_rank(&matrix, &techniques, &ds, Metric::Accuracy, TieRule::Max).unwrap();
    let within = reference
        .rows
        .iter()
        .zip(lo.iter().zip(&hi))
        .all(|((_, _, want), (l, h))| l <= want && want <= h);

    vec![
        line(
            "2a",
            named_ok && emitted,
            format!(
                "named ranks ARF 2, AMF 3, I-RF 3, LC 22 via median_rank + emit_report: {}",
                named.iter().map(|(t, _)| format!("{t}={}", column[*t])).collect::<Vec<_>>().join(" ")
            ),
        ),
        line(
            "2",
            mismatched.is_empty() && named_ok && emitted,
            if mismatched.is_empty() {
                "full MedRank column reproduced (average ties)".to_string()
            } else {
                format!("full column, average ties: {} of 22 rows differ: {}", mismatched.len(), mismatched.join(", "))
            },
        ),
        line(
            "2b",
            within,
            "every reference rank lies between the min-tie and max-tie medians",
        ),
    ]
}

fn criterion_3() -> Vec<Line> {
    let Some(root) = data_root() else {
        return vec![line("3", false, "benchmark files unavailable: set DRIFTBENCH_DATA")];
    };
    let checks = [
        ("EL", "DDM-NB", 0.03),
        ("EL", "R-NB", 0.05),
        ("IA", "ADWIN-NB", 0.05),
    ];
    let mut out = Vec::new();
    let mut all = true;
    for (d, t, margin) in checks {
        for seed in 0..3 {
            let res = cell_accuracy("NB", d, seed, &root)
                .and_then(|nb| cell_accuracy(t, d, seed, &root).map(|w| (nb, w)));
            match res {
                Ok((nb, w)) => {
                    let ok = w >= nb + margin;
                    all &= ok;
                    out.push(format!("{d} seed {seed}: {t} {:.1} vs NB {:.1}{}", w * 100.0, nb * 100.0, if ok { "" } else { " (short)" }));
                }
                Err(e) => {
                    all = false;
                    out.push(format!("{d}: {e}"));
                }
            }
        }
    }
    vec![line("3", all, out.join("; "))]
}

fn criterion_4() -> Vec<Line> {
    let bern = |r: &mut RngHandle, p: f64| r.bernoulli(p) as u8 as f64;
    let mut detected = 0;
    for seed in 0..100 {
        let mut a = Adwin::new(AdwinConfig::default()).unwrap();
        let mut r = RngHandle::new(seed);
        for _ in 0..1000 {
            a.update(bern(&mut r, 0.2)).unwrap();
        }
        if (0..300).any(|_| a.update(bern(&mut r, 0.8)).unwrap().0 == DetectorSignal::Drift) {
            detected += 1;
        }
    }
    let mut false_drifts = 0;
    for seed in 0..100 {
        let mut a = Adwin::new(AdwinConfig::default()).unwrap();
        let mut r = RngHandle::new(10_000 + seed);
        for _ in 0..10_000 {
            if a.update(bern(&mut r, 0.5)).unwrap().0 == DetectorSignal::Drift {
                false_drifts += 1;
            }
        }
    }

    let mut ddm_detected = 0;
    let mut ddm_early = 0;
    for seed in 0..100 {
        let mut d = Ddm::new(DdmConfig::default());
        let mut r = RngHandle::new(seed);
        let mut early = false;
        for _ in 0..1000 {
            early |= d.update(!r.bernoulli(0.1)) == DetectorSignal::Drift;
        }
        ddm_early += early as u32;
        if (0..300).any(|_| d.update(!r.bernoulli(0.6)) == DetectorSignal::Drift) {
            ddm_detected += 1;
        }
    }

    let mut d3 = Vec::new();
    for disc in [Discriminator::Linear, Discriminator::HoeffdingTree] {
        let mut stable = 0;
        for seed in 0..100 {
            let cfg = D3Config {
                discriminator: disc,
                ..Default::default()
            };
            let mut d = D3::new(2, cfg, RngHandle::new(seed)).unwrap();
            let mut r = RngHandle::new(500 + seed);
            let mut sig = DetectorSignal::Stable;
            for _ in 0..110 {
                sig = d.update(&[r.normal(0.0, 1.0), r.normal(0.0, 1.0)]).unwrap();
            }
            stable += (sig == DetectorSignal::Stable) as u32;
        }
        d3.push(stable);
    }

    let window = IbddConfig::default().window;
    let mut ibdd = 0;
    for seed in 0..20 {
        let mut d = Ibdd::new(2, IbddConfig::default()).unwrap();
        let mut r = RngHandle::new(seed);
        for _ in 0..1000 {
            d.update(&[r.normal(0.0, 1.0), r.normal(0.0, 1.0)]).unwrap();
        }
        if (0..2 * window).any(|_| {
            d.update(&[r.normal(5.0, 1.0), r.normal(5.0, 1.0)]).unwrap() == DetectorSignal::Drift
        }) {
            ibdd += 1;
        }
    }

    vec![
        line(
            "4a",
            detected >= 95 && false_drifts == 0,
            format!("ADWIN: {detected}/100 shifts caught within 300 steps; {false_drifts} drift(s) in 100 stationary runs"),
        ),
        line(
            "4b",
            ddm_detected >= 95,
            format!("DDM: {ddm_detected}/100 error rises caught within 300 steps ({ddm_early}/100 runs also alarmed before the change)"),
        ),
        line(
            "4c",
            d3.iter().all(|&s| s >= 95),
            format!("D3 on identically distributed 2-d windows: stable {}/100 (linear), {}/100 (tree)", d3[0], d3[1]),
        ),
        line(
            "4d",
            ibdd == 20,
            format!("IBDD: {ibdd}/20 five-sigma shifts caught within {} steps", 2 * window),
        ),
    ]
}

fn criterion_5() -> Vec<Line> {
    let (mut a, mut b, mut c) = (0, 0, 0);
    let mut gaps = Vec::new();
    for seed in 0..20 {
        let out = dilemma_sweep(&DilemmaConfig {
            seed,
            ..Default::default()
        })
        .unwrap();
        let at = |k| out.records.iter().find(|r| r.k == k).unwrap();
        a += ((at(99).right.mean - 10.0).abs() <= 0.5) as u32;
        b += (at(1).left.mean.abs() <= 0.5) as u32;
        let mid = at(50);
        c += (mid.s_empirical < mid.s_true - 0.2) as u32;
        gaps.push(mid.s_true - mid.s_empirical);
    }
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    vec![
        line("5a", a >= 18, format!("right mean within 0.5 of 10 at k = 99: {a}/20")),
        line("5b", b >= 18, format!("left mean within 0.5 of 0 at k = 1: {b}/20")),
        line(
            "5c",
            c >= 18,
            format!("TV at k = 50 below true TV by more than 0.2: {c}/20 (mean gap {mean_gap:.3})"),
        ),
    ]
}

fn criterion_6(manifest: &PathBuf, root: &PathBuf) -> Line {
    let k0 = cohen_kappa(&ConfusionMatrix::from_rows(&[vec![25, 25], vec![25, 25]]).unwrap()).unwrap();
    let mut r = RngHandle::new(6);
    let mut worst_const = 0.0f64;
    for constant in 0..3 {
        let mut trace = MetricTrace::new(3);
        for _ in 0..1000 {
            trace.record(r.below(3), constant);
        }
        worst_const = worst_const.max(trace.kappa().unwrap().abs());
    }
    let m = Manifest::from_file(manifest).unwrap();
    let mut cells = 0;
    let mut bad = Vec::new();
    for entry in &m.entries {
        let loaded = entry.load(root).unwrap();
        for t in TECHNIQUES {
            let spec = CellSpec {
                technique: t.into(),
                dataset: entry.id().into(),
                reset_n: entry.descriptor.reset_n,
                retrain_n: entry.descriptor.retrain_n,
                start: StartMode::Cold,
                master_seed: 42,
                kappa_window: None,
                forest: ForestConfig::default(),
            };
            let run = run_cell(&spec, &loaded.schema, &loaded.instances).unwrap();
            let cm = run.trace.confusion();
            cells += 1;
            if run.result.mean_accuracy != cm.trace() as f64 / cm.total() as f64 {
                bad.push(format!("{t}/{}", entry.id()));
            }
        }
    }
    line(
        "6",
        k0 == 0.0 && worst_const < 1e-12 && bad.is_empty(),
        format!(
            "kappa([[25,25],[25,25]]) = {k0}; max |kappa| of constant predictors {worst_const:e}; accuracy = trace/total on {}/{cells} cells",
            cells - bad.len()
        ),
    )
}

fn criterion_7() -> Vec<Line> {
    let mut exact = true;
    let mut streams = 0;
    for seed in 0..5 {
        let mut r = RngHandle::new(seed);
        let mut a = Adwin::new(AdwinConfig::default()).unwrap();
        let mut shadow = VecDeque::new();
        for t in 0..10_000 {
            let v = r.bernoulli(if (t / 2500) % 2 == 0 { 0.2 } else { 0.7 }) as u8 as f64;
            a.update(v).unwrap();
            shadow.push_back(v);
            while shadow.len() as u64 > a.width() {
                shadow.pop_front();
            }
            let (n, s) = a.bucket_aggregates();
            exact &= n == shadow.len() as u64 && s == shadow.iter().sum::<f64>();
        }
        streams += 1;
    }

    let mut r = RngHandle::new(77);
    let mut nb = GaussianNaiveBayes::new(4, 3);
    let mut rows: Vec<(Vec<f64>, usize)> = Vec::new();
    for _ in 0..10_000 {
        let y = r.below(3);
        let x: Vec<f64> = (0..4).map(|f| r.normal(1e3 * f as f64 + y as f64, 1.0 + f as f64)).collect();
        nb.learn_one(&x, y).unwrap();
        rows.push((x, y));
    }
    let mut worst = 0.0f64;
    for c in 0..3 {
        for f in 0..4 {
            let xs: Vec<f64> = rows.iter().filter(|r| r.1 == c).map(|r| r.0[f]).collect();
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let s = nb.feature_stats(c, f);
            worst = worst
                .max(((s.mean() - mean) / mean).abs())
                .max(((s.variance() - var) / var).abs());
        }
    }
    vec![
        line(
            "7a",
            exact,
            format!("ADWIN bucket count/sum equal a plain shadow window at every step of {streams} x 10,000 values"),
        ),
        line(
            "7b",
            worst <= 1e-9,
            format!("NB running moments vs two-pass: worst relative error {worst:e}"),
        ),
    ]
}

fn criterion_8(manifest: &PathBuf, root: &PathBuf, out: &PathBuf) -> Line {
    let run = |workers: usize, tag: &str| {
        let cfg = BenchConfig {
            seed: 42,
            workers,
            out: out.join(tag),
            manifest: Some(manifest.clone()),
            data_root: Some(root.clone()),
            ..Default::default()
        };
        let report = run_bench(&cfg).unwrap();
        assert!(report.failures.is_empty(), "{:?}", report.failures);
        (fs::read(report.dir.join("cells.csv")).unwrap(), report.results.len())
    };
    let (first, n) = run(1, "first");
    let (second, _) = run(1, "second");
    let (eight, _) = run(8, "eight");
    line(
        "8",
        first == second && first == eight,
        format!(
            "default technique set, seed 42, {n} cells on stand-in streams: repeat identical {}, workers 1 vs 8 identical {}",
            first == second,
            first == eight
        ),
    )
}

fn criterion_9() -> Vec<Line> {
    let schema = StreamSchema::anonymous(10, 4).unwrap();
    let accuracy = |block_len: usize, seed: u64, start| {
        let stream = blocked_class_stream(1600 / block_len, block_len, 10, 4, &mut RngHandle::new(300 + seed));
        let cfg = AdaptiveConfig::from_technique("R-RF", 60, 50, start).unwrap();
        let mut m = AdaptiveModel::new(cfg, &schema, RngHandle::new(seed)).unwrap();
        prequential_run(&mut m, &stream).unwrap().mean_accuracy().unwrap()
    };
    let mut pairs = Vec::new();
    for seed in 0..3 {
        pairs.push((accuracy(10, seed, StartMode::Warm), accuracy(10, seed, StartMode::Cold)));
    }
    let (w50, c50) = (accuracy(50, 0, StartMode::Warm), accuracy(50, 0, StartMode::Cold));
    vec![
        line(
            "9",
            pairs.iter().all(|(w, c)| w >= c),
            format!(
                "R-RF warm vs cold, 1,600 instances in 10-instance class blocks, retrain every 50: {}",
                pairs
                    .iter()
                    .map(|(w, c)| format!("{:.1}/{:.1}", w * 100.0, c * 100.0))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        ),
        line(
            "9-note",
            true,
            format!(
                "with 50-instance blocks every retraining window holds one class and cold start wins: {:.1}/{:.1}",
                w50 * 100.0,
                c50 * 100.0
            ),
        ),
    ]
}

fn main() -> ExitCode {
    let reference = reference();
    let dir = tempfile::tempdir().unwrap();
    let manifest = common::write_standins(dir.path());
    let root = dir.path().to_path_buf();

    let mut lines = vec![criterion_1(&reference)];
    lines.extend(criterion_2(&reference));
    lines.extend(criterion_3());
    lines.extend(criterion_4());
    lines.extend(criterion_5());
    lines.push(criterion_6(&manifest, &root));
    lines.extend(criterion_7());
    lines.push(criterion_8(&manifest, &root, &dir.path().join("runs")));
    lines.extend(criterion_9());

    let data = data_root().is_some();
    let mut unexpected = Vec::new();
    for l in &lines {
        let known = KNOWN_SHORTFALLS.iter().find(|(id, _)| *id == l.id).map(|(_, why)| *why);
        let no_data = !data && NEEDS_DATA.contains(&l.id);
        let status = if l.pass { "PASS" } else { "FAIL" };
        let tag = match (l.pass, known, no_data) {
            (false, Some(why), _) => format!(" [known: {why}]"),
            (false, None, true) => " [needs benchmark files]".to_string(),
            (false, None, false) => {
                unexpected.push(l.id);
                String::new()
            }
            _ => String::new(),
        };
        println!("criterion {:<6} {status}  {}{tag}", l.id, l.detail);
    }
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed, {} unexpected",
        lines.len() - failed,
        unexpected.len()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
