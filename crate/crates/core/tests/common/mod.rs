#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use driftbench::datasets::{abrupt_class_stream, blocked_class_stream, gaussian_classes_stream};
use driftbench::stream::{Instance, RngHandle};

/// Writes `instances` as CSV with a header and `c<id>` labels.
pub fn write_csv(path: &Path, instances: &[Instance]) {
    let d = instances[0].x.len();
    let mut s = (0..d).map(|f| format!("f{f}")).collect::<Vec<_>>().join(",");
    s.push_str(",class\n");
    for inst in instances {
        for v in &inst.x {
            write!(s, "{v},").unwrap();
        }
        writeln!(s, "c{}", inst.y.unwrap()).unwrap();
    }
    fs::write(path, s).unwrap();
}

/// Three small synthetic streams standing in for the benchmark files, plus a manifest
/// describing them. Returns the manifest path; the files live next to it.
pub fn write_standins(dir: &Path) -> PathBuf {
    let mut rng = RngHandle::new(2024);
    let streams: [(&str, Vec<Instance>, usize, usize, usize); 3] = [
        ("SA", abrupt_class_stream(600, 300, &mut rng).unwrap(), 2, 60, 50),
        ("SB", blocked_class_stream(40, 10, 6, 4, &mut rng), 4, 60, 50),
        ("SC", gaussian_classes_stream(500, 3, 3, 2.0, &mut rng), 3, 32, 50),
    ];
    let mut manifest = String::from("# stand-in streams\n");
    for (id, instances, classes, reset_n, retrain_n) in &streams {
        let file = format!("{id}.csv");
        write_csv(&dir.join(&file), instances);
        writeln!(
            manifest,
            "{id} file://{id}.csv - last {file} {classes} {} {} {reset_n} {retrain_n}",
            instances[0].x.len(),
            instances.len()
        )
        .unwrap();
    }
    let path = dir.join("standins.manifest");
    fs::write(&path, manifest).unwrap();
    path
}

/// Accuracy over the scored instances from position `from` onwards.
pub fn tail_accuracy(correct: impl Iterator<Item = bool>, from: usize) -> f64 {
    let (mut n, mut k) = (0usize, 0usize);
    for c in correct.skip(from) {
        n += 1;
        k += c as usize;
    }
    k as f64 / n as f64
}
