//! Generated bundles survive the CSV schemas unchanged.

use std::fs;

use floodcast_core::ingest::*;
use floodcast_core::synth::{
    generate_bundle, planted_signal, read_flood_truth, read_planted_records, read_ttp_truth, write_bundle, SynthConfig,
};
use proptest::prelude::*;

fn config() -> SynthConfig {
    SynthConfig::new(6, 3, 0.1)
}

#[test]
fn strict_parse_round_trips_every_schema() {
    let b = generate_bundle(&config(), 11).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_bundle(&b, dir.path()).unwrap();

    let stage = parse_stage_csv(dir.path().join("stage.csv"), Strictness::Strict).unwrap();
    assert_eq!(stage.report.skipped, 0);
    assert_eq!(stage.items, b.series);

    assert_eq!(
        parse_thresholds_csv(dir.path().join("thresholds.csv")).unwrap(),
        b.thresholds
    );

    let precip = parse_precip_csv(dir.path().join("precip.csv"), Strictness::Strict).unwrap();
    assert_eq!(precip.report.skipped, 0);
    assert_eq!(precip.items, b.precip);

    let attrs = parse_attributes_csv(dir.path().join("attributes.csv"), Strictness::Strict).unwrap();
    assert_eq!(attrs.report.skipped, 0);
    assert_eq!(attrs.items, b.attributes);

    let fc = parse_forecast_csv(dir.path().join("forecasts.csv"), Strictness::Strict).unwrap();
    assert_eq!(fc.report.skipped, 0);
    assert_eq!(fc.items, b.forecasts);

    assert_eq!(
        read_flood_truth(dir.path().join("ground_truth.csv")).unwrap(),
        b.flood_truth
    );
    let ttp = read_ttp_truth(dir.path().join("ground_truth_ttp.csv")).unwrap();
    assert_eq!(ttp, b.ttp_truth);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let p1 = planted_signal(&generate_bundle(&config(), 5).unwrap(), 0.5).unwrap();
    let p2 = planted_signal(&generate_bundle(&config(), 5).unwrap(), 0.5).unwrap();
    write_bundle(&p1, d1.path()).unwrap();
    write_bundle(&p2, d2.path()).unwrap();
    let mut names: Vec<_> = fs::read_dir(d1.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 9);
    for n in names {
        assert_eq!(
            fs::read(d1.path().join(&n)).unwrap(),
            fs::read(d2.path().join(&n)).unwrap(),
            "{n:?}"
        );
    }
}

#[test]
fn planted_records_round_trip() {
    let p = planted_signal(&generate_bundle(&config(), 3).unwrap(), 0.7).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_bundle(&p, dir.path()).unwrap();
    let back = read_planted_records(dir.path().join("planted_signal.csv")).unwrap();
    assert_eq!(back, p.planted.unwrap().records);
}

#[test]
fn generation_ignores_thread_count() {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = one.install(|| generate_bundle(&config(), 8).unwrap());
    let b = generate_bundle(&config(), 8).unwrap();
    assert_eq!(a.series, b.series);
    assert_eq!(a.forecasts, b.forecasts);
    assert_eq!(a.thresholds, b.thresholds);
}

#[test]
fn joined_bundle_loses_nothing() {
    let b = generate_bundle(&config(), 2).unwrap();
    let j = join_gauges(
        b.series.clone(),
        b.thresholds.clone(),
        b.precip.clone(),
        b.attributes.clone(),
    )
    .unwrap();
    assert_eq!(j.records.len(), 6);
    assert!(j.coverage.dropped.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // Parsers return a value or an error for any input; they never panic.
    #[test]
    fn parsers_are_total(body in proptest::collection::vec(any::<u8>(), 0..400), strict in any::<bool>()) {
        let mode = if strict { Strictness::Strict } else { Strictness::Lenient };
        for header in [STAGE_HEADER, PRECIP_HEADER, FORECAST_HEADER, "gauge_id,impervious_pct,elevation_m,characteristic_length"] {
            let mut text = format!("{header}\n").into_bytes();
            text.extend_from_slice(&body);
            let _ = read_stage_csv(&text[..], mode);
            let _ = read_precip_csv(&text[..], mode);
            let _ = read_forecast_csv(&text[..], mode);
            let _ = read_attributes_csv(&text[..], mode);
            let _ = read_thresholds_csv(&text[..]);
        }
        let _ = read_stage_csv(&body[..], mode);
    }

    #[test]
    fn lenient_rows_add_up(rows in proptest::collection::vec(("[A-C]", 0u32..6, prop_oneof!["[0-9]\\.[0-9]", Just(String::new()), Just("x".to_string())]), 0..30)) {
        let mut text = format!("{STAGE_HEADER}\n");
        for (g, slot, v) in &rows {
            text.push_str(&format!("{g},2021-03-01T00:{:02}:00Z,{v}\n", slot * 15 % 60));
        }
        let parsed = read_stage_csv(text.as_bytes(), Strictness::Lenient).unwrap();
        let kept: usize = parsed.items.iter().map(StageSeries::len).sum();
        prop_assert_eq!(kept + parsed.report.skipped, rows.len());
        prop_assert_eq!(parsed.report.rows, rows.len());
    }
}
