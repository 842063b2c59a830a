//! The `floodcast` binary end to end: outputs, exit codes and config layering.

mod common;

use std::fs;

use common::*;
use serde_json::Value;

fn experiment_args<'a>(data: &'a str, out: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut a = vec!["experiment", "--data", data, "--out", out];
    a.extend_from_slice(&QUICK_GRID);
    a.extend_from_slice(extra);
    a
}

fn read_json(p: &std::path::Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn synth_is_reproducible_byte_for_byte() {
    let root = tempfile::tempdir().unwrap();
    let (a, b) = (root.path().join("a"), root.path().join("b"));
    synth(&a, &["--seed", "11", "--gauges", "6", "--months", "3"]);
    synth(
        &b,
        &["--seed", "11", "--gauges", "6", "--months", "3", "--threads", "3"],
    );
    let (sa, sb) = (snapshot(&a), snapshot(&b));
    let names: Vec<&str> = sa.iter().map(|(n, _)| n.as_str()).collect();
    for required in [
        "stage.csv",
        "thresholds.csv",
        "precip.csv",
        "attributes.csv",
        "ground_truth.csv",
    ] {
        assert!(names.contains(&required), "{names:?}");
    }
    // the resolved config records the output path, which differs
    let strip = |s: Vec<(String, Vec<u8>)>| {
        s.into_iter()
            .filter(|(n, _)| n != "config.resolved.toml")
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(sa), strip(sb));
}

#[test]
fn usage_errors_exit_with_two() {
    let root = tempfile::tempdir().unwrap();
    let out = root.path().join("o");
    let o = run(&["synth", "--seed", "1", "--gauges", "2", "--out", path_arg(&out)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(!out.exists());

    let o = run(&[
        "experiment",
        "--data",
        ".",
        "--out",
        path_arg(&out),
        "--seed",
        "1",
        "--experiment",
        "e9",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("e9"), "{}", stderr(&o));

    let o = run(&["synth", "--out", path_arg(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("FLOODCAST_SEED"), "{}", stderr(&o));

    let o = run(&["synth", "--seed", "1", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_falls_back_to_the_environment() {
    let root = tempfile::tempdir().unwrap();
    let out = root.path().join("o");
    let o = floodcast()
        .args(["synth", "--gauges", "5", "--months", "2", "--out", path_arg(&out)])
        .env("FLOODCAST_SEED", "5")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let resolved = fs::read_to_string(out.join("config.resolved.toml")).unwrap();
    assert!(resolved.contains("seed = 5"), "{resolved}");
}

#[test]
fn runtime_errors_exit_with_one_and_leave_no_partial_output() {
    let root = tempfile::tempdir().unwrap();
    let data = root.path().join("data");
    synth(&data, &["--seed", "2", "--gauges", "5", "--months", "2"]);
    // thresholds for gauges that have no stage: nothing joins
    fs::write(
        data.join("thresholds.csv"),
        "gauge_id,minor_ft,moderate_ft,major_ft\nZZ1,3,,\n",
    )
    .unwrap();
    let out = root.path().join("run");
    let o = run(&experiment_args(path_arg(&data), path_arg(&out), &["--seed", "1"]));
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(!out.exists());
    let leftovers: Vec<_> = fs::read_dir(root.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.contains("partial"))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");

    let o = run(&[
        "ingest",
        "--data",
        path_arg(&root.path().join("missing")),
        "--out",
        path_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("stage.csv"));
}

#[test]
fn flags_override_the_config_file() {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("c.toml");
    fs::write(&cfg, "seed = 4\ngauges = 6\nmonths = 2\nmissing_rate = 0.0\n").unwrap();
    let out = root.path().join("o");
    let o = run(&[
        "synth",
        "--config",
        path_arg(&cfg),
        "--gauges",
        "5",
        "--out",
        path_arg(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let resolved = fs::read_to_string(out.join("config.resolved.toml")).unwrap();
    for line in ["seed = 4", "gauges = 5", "months = 2", "missing_rate = 0.0"] {
        assert!(resolved.lines().any(|l| l == line), "{line} missing from\n{resolved}");
    }
    // the resolved file is itself a valid config that reproduces the run
    let again = root.path().join("again");
    let o = run(&[
        "synth",
        "--config",
        path_arg(&out.join("config.resolved.toml")),
        "--out",
        path_arg(&again),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read(out.join("stage.csv")).unwrap(),
        fs::read(again.join("stage.csv")).unwrap()
    );

    fs::write(&cfg, "seed = 4\ngauge = 6\n").unwrap();
    let o = run(&["synth", "--config", path_arg(&cfg), "--out", path_arg(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gauge"));
}

#[test]
fn experiment_writes_its_outputs_and_report_reads_them() {
    let root = tempfile::tempdir().unwrap();
    let data = root.path().join("data");
    synth(
        &data,
        &[
            "--seed",
            "3",
            "--gauges",
            "20",
            "--months",
            "12",
            "--positive-rate",
            "0.15",
            "--planted",
            "0.8",
        ],
    );
    let out = root.path().join("run");
    let o = run(&experiment_args(
        path_arg(&data),
        path_arg(&out),
        &["--seed", "9", "--threads", "2"],
    ));
    assert!(o.status.success(), "{}", stderr(&o));
    let names: Vec<String> = snapshot(&out).into_iter().map(|(n, _)| n).collect();
    assert_eq!(
        names,
        [
            "config.resolved.toml",
            "pr_all.svg",
            "pr_forest.csv",
            "pr_gbdt.csv",
            "pr_mlp.csv",
            "report.json",
            "split.json"
        ]
    );

    let report = read_json(&out.join("report.json"));
    assert_eq!(report["format"], "floodcast-report");
    assert_eq!(report["seed"], 9);
    assert_eq!(report["reference"]["precision"], 0.5);
    assert_eq!(report["reference"]["recall"], 0.245);
    assert_eq!(report["reference"]["label"], "published reference, not recomputed");
    assert!(report["config"].get("out").is_none() && report["config"].get("threads").is_none());
    let curves = report["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 4);
    let baseline = curves.iter().find(|c| c["name"] == "baseline").unwrap();
    assert_eq!(baseline["average_precision"], report["positive_rate"]);
    let bayes = report["bayes_optimal_ap"].as_f64().unwrap();
    for c in curves.iter().filter(|c| c["kind"] == "model") {
        assert!(c["expected_ap"].as_f64().unwrap() <= bayes + 1e-12);
    }

    let svg = fs::read_to_string(out.join("pr_all.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).expect("well-formed svg");
    assert_eq!(doc.root_element().tag_name().name(), "svg");

    let printed = String::from_utf8(o.stdout).unwrap();
    let o = run(&["report", "--run", path_arg(&out)]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap(), printed);
    assert!(printed.contains("published reference, not recomputed"), "{printed}");
    assert!(printed.contains("bayes-optimal expected AP"));
}

#[test]
fn ingest_and_featurize_report_counts() {
    let root = tempfile::tempdir().unwrap();
    let data = root.path().join("data");
    synth(&data, &["--seed", "6", "--gauges", "5", "--months", "3"]);
    let out = root.path().join("ing");
    let o = run(&["ingest", "--data", path_arg(&data), "--out", path_arg(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["joined_gauges"].as_array().unwrap().len(), 5);
    assert_eq!(read_json(&out.join("ingest_report.json")), summary);

    let feat = root.path().join("feat");
    let o = run(&[
        "featurize",
        "--data",
        path_arg(&data),
        "--out",
        path_arg(&feat),
        "--experiment",
        "e2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(feat.join("features.csv")).unwrap();
    // two labelled months per gauge: the first has no previous month
    assert_eq!(table.lines().count(), 1 + 5 * 2);
    assert!(table.lines().next().unwrap().contains("stage_mean_prev"));
}

#[test]
fn eval_noaa_on_the_hand_counted_fixture() {
    let root = tempfile::tempdir().unwrap();
    let data = write_noaa_fixture(&root.path().join("noaa"));
    let out = root.path().join("out");
    let o = run(&["eval-noaa", "--data", path_arg(&data), "--out", path_arg(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_json(&out.join("noaa_report.json"));
    let counts: Vec<u64> = ["true_positives", "false_positives", "false_negatives", "true_negatives"]
        .iter()
        .map(|k| r[k].as_u64().unwrap())
        .collect();
    assert_eq!(counts, [1, 1, 2, 1]);
    assert_eq!(r["precision"].as_f64(), Some(0.5));
    assert_eq!(r["recall"].as_f64(), Some(1.0 / 3.0));
}
