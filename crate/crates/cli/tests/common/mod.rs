//! Helpers shared by the binary-level test targets.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn floodcast() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_floodcast"));
    c.env_remove("FLOODCAST_SEED");
    c
}

pub fn run(args: &[&str]) -> Output {
    floodcast().args(args).output().expect("binary runs")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn path_arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

/// Small grids so binary-level runs stay quick.
pub const QUICK_GRID: [&str; 14] = [
    "--forest-n-trees",
    "20",
    "--forest-max-depth",
    "6",
    "--gbdt-n-rounds",
    "30",
    "--gbdt-learning-rate",
    "0.1",
    "--gbdt-max-depth",
    "3",
    "--mlp-hidden",
    "8",
    "--mlp-epochs",
    "10",
];

/// `floodcast synth` into `dir`; panics on failure.
pub fn synth(dir: &Path, extra: &[&str]) {
    let mut args = vec!["synth", "--out", path_arg(dir)];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert!(o.status.success(), "synth failed: {}", stderr(&o));
}

fn quarter_hours_of(month: (i32, u32)) -> Vec<String> {
    let (y, m) = month;
    let days = match m {
        2 if y % 4 == 0 => 29,
        2 => 28,
        4 | 6 | 9 | 11 => 30,
        _ => 31,
    };
    let mut out = Vec::new();
    for d in 1..=days {
        for h in 0..24 {
            for q in [0, 15, 30, 45] {
                out.push(format!("{y}-{m:02}-{d:02}T{h:02}:{q:02}:00Z"));
            }
        }
    }
    out
}

/// Hand-counted forecast fixture over five gauge-months.
///
/// Stage is 1 ft throughout with one 12 ft reading in flooded months;
/// every minor threshold is 10 ft.
///
/// | gauge | month   | observed | max forecast | outcome |
/// |-------|---------|----------|--------------|---------|
/// | A     | 2020-01 | flood    | 11.0         | TP      |
/// | A     | 2020-02 | dry      | 10.0         | FP      |
/// | A     | 2020-03 | flood    | 9.99         | FN      |
/// | B     | 2020-01 | flood    | 3.0          | FN      |
/// | B     | 2020-02 | dry      | 3.0          | TN      |
pub fn write_noaa_fixture(dir: &Path) -> PathBuf {
    fs::create_dir_all(dir).unwrap();
    let months: [(&str, (i32, u32), bool); 5] = [
        ("A", (2020, 1), true),
        ("A", (2020, 2), false),
        ("A", (2020, 3), true),
        ("B", (2020, 1), true),
        ("B", (2020, 2), false),
    ];
    let mut stage = String::from("gauge_id,timestamp,stage_ft\n");
    for (g, m, flood) in months {
        let stamps = quarter_hours_of(m);
        let spike = stamps.len() - 10;
        for (i, t) in stamps.iter().enumerate() {
            let v = if flood && i == spike { "12" } else { "1" };
            let _ = writeln!(stage, "{g},{t},{v}");
        }
    }
    fs::write(dir.join("stage.csv"), stage).unwrap();
    fs::write(
        dir.join("thresholds.csv"),
        "gauge_id,minor_ft,moderate_ft,major_ft\nA,10,,\nB,10,,\n",
    )
    .unwrap();
    let forecasts = "gauge_id,issued_at,valid_at,forecast_stage_ft\n\
        A,2020-01-04T00:00:00Z,2020-01-05T00:00:00Z,11.0\n\
        A,2020-01-04T00:00:00Z,2020-01-05T06:00:00Z,2.0\n\
        A,2020-02-04T00:00:00Z,2020-02-05T00:00:00Z,10.0\n\
        A,2020-03-04T00:00:00Z,2020-03-05T00:00:00Z,9.99\n\
        B,2020-01-04T00:00:00Z,2020-01-05T00:00:00Z,3.0\n\
        B,2020-02-04T00:00:00Z,2020-02-05T00:00:00Z,3.0\n";
    fs::write(dir.join("forecasts.csv"), forecasts).unwrap();
    dir.to_path_buf()
}

/// File names with their bytes.
pub type Snapshot = Vec<(String, Vec<u8>)>;

/// Names and contents of every file directly under `dir`, sorted by name.
pub fn snapshot(dir: &Path) -> Snapshot {
    let mut files: Snapshot = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}
