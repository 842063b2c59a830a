//! Assembly, splitting and scaling on generated gauges.

use std::collections::BTreeSet;

use floodcast_core::features::*;
use floodcast_core::hydrology::HydrologyConfig;
use floodcast_core::ingest::{join_gauges, GaugeRecord};
use floodcast_core::synth::{generate_bundle, SynthConfig};
use floodcast_core::Dataset;
use proptest::prelude::*;

fn records(n_gauges: usize, n_months: usize, seed: u64) -> Vec<GaugeRecord> {
    let b = generate_bundle(&SynthConfig::new(n_gauges.max(5), n_months, 0.1), seed).unwrap();
    let mut r = join_gauges(b.series, b.thresholds, b.precip, b.attributes)
        .unwrap()
        .records;
    r.truncate(n_gauges);
    r
}

#[test]
fn two_gauges_three_months_give_four_examples() {
    let r = records(2, 3, 1);
    for e in Experiment::ALL {
        let d = assemble_experiment(&r, e, Target::GaugeMonth, &HydrologyConfig::default()).unwrap();
        assert_eq!(d.len(), 4, "{e}");
        let months: BTreeSet<String> = d.examples.iter().map(|x| x.key.to_string()).collect();
        assert_eq!(months.into_iter().collect::<Vec<_>>(), ["2015-02", "2015-03"]);
    }
}

#[test]
fn feature_groups_nest() {
    let r = records(5, 3, 2);
    let hc = HydrologyConfig::default();
    let names = |e| -> BTreeSet<String> {
        assemble_experiment(&r, e, Target::GaugeMonth, &hc)
            .unwrap()
            .feature_names
            .into_iter()
            .collect()
    };
    let (e1, e2, e3) = (names(Experiment::E1), names(Experiment::E2), names(Experiment::E3));
    assert!(e1.is_subset(&e2) && e2.is_subset(&e3));
    assert!(e1.iter().all(|n| !n.contains("stage")));
    assert!(e2.iter().any(|n| n.starts_with("stage_")));
    for t in [Target::TtpBin(0), Target::TtpBin(3)] {
        let d = assemble_experiment(&r, Experiment::E1, t, &hc).unwrap();
        assert!(d.feature_names.iter().all(|n| !n.contains("stage")));
        assert!(d.examples.iter().all(|x| x.bin.is_some()));
    }
}

#[test]
fn prior_month_features_ignore_the_labelled_month() {
    // Rain added to the last month changes only E3's current-month columns.
    let r = records(5, 4, 3);
    let mut changed = r.clone();
    for rec in &mut changed {
        let days: Vec<f64> = rec
            .precip
            .records()
            .iter()
            .map(|d| {
                if d.date.format("%Y-%m").to_string() == "2015-04" {
                    d.precip_mm + 50.0
                } else {
                    d.precip_mm
                }
            })
            .collect();
        let first = rec.precip.records()[0].date;
        rec.precip = floodcast_core::ingest::DailyPrecip::from_daily(rec.gauge_id.clone(), first, &days).unwrap();
    }
    let hc = HydrologyConfig::default();
    for e in Experiment::ALL {
        let a = assemble_experiment(&r, e, Target::GaugeMonth, &hc).unwrap();
        let b = assemble_experiment(&changed, e, Target::GaugeMonth, &hc).unwrap();
        for (x, y) in a.examples.iter().zip(&b.examples) {
            for (name, (u, v)) in a.feature_names.iter().zip(x.features.iter().zip(&y.features)) {
                if e == Experiment::E3 && name.ends_with("_cur") && x.key.to_string() == "2015-04" {
                    continue;
                }
                assert_eq!(u, v, "{e} {name} {}", x.key);
            }
        }
    }
}

fn split_sets(d: &Dataset, a: &SplitAssignment) -> [BTreeSet<String>; 3] {
    [Split::Train, Split::Val, Split::Test].map(|s| {
        d.examples
            .iter()
            .filter(|x| a.get(&x.gauge_id) == Some(s))
            .map(|x| x.gauge_id.clone())
            .collect()
    })
}

#[test]
fn split_and_normalizer_invariants() {
    let r = records(10, 3, 4);
    let d = assemble_experiment(&r, Experiment::E2, Target::GaugeMonth, &HydrologyConfig::default()).unwrap();
    let ids: Vec<String> = d.gauges().into_iter().map(String::from).collect();
    let a = split_by_gauge(&ids, 42).unwrap();
    assert_eq!(a.counts(), (6, 2, 2));
    let [tr, va, te] = split_sets(&d, &a);
    assert!(tr.is_disjoint(&va) && tr.is_disjoint(&te) && va.is_disjoint(&te));
    assert_eq!(tr.len() + va.len() + te.len(), 10);

    let train = d.filter_gauges(|g| a.get(g) == Some(Split::Train));
    let test = d.filter_gauges(|g| a.get(g) == Some(Split::Test));
    let norm = fit_normalizer(&train).unwrap();
    let scaled = norm.apply(&train).unwrap();
    for j in 0..d.n_features() {
        let col: Vec<f64> = scaled.examples.iter().map(|x| x.features[j]).collect();
        let raw: Vec<f64> = train.examples.iter().map(|x| x.features[j]).collect();
        let (lo, hi) = col.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        if raw.iter().all(|&v| v == raw[0]) {
            assert!(col.iter().all(|&v| v == 0.0));
        } else {
            assert!(lo.abs() < 1e-12 && (hi - 1.0).abs() < 1e-12, "{}", d.feature_names[j]);
        }
    }
    // fitting on train plus a shifted test set moves the bounds
    let mut shifted = test.clone();
    for x in &mut shifted.examples {
        for v in &mut x.features {
            *v += 1000.0;
        }
    }
    let mut both = train.clone();
    both.examples.extend(shifted.examples);
    let leaky = fit_normalizer(&both).unwrap();
    assert_ne!(leaky.max(), norm.max());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_is_a_partition(n in 5usize..80, seed in any::<u64>()) {
        let ids: Vec<String> = (0..n).map(|i| format!("g{i:03}")).collect();
        let a = split_by_gauge(&ids, seed).unwrap();
        let (tr, va, te) = a.counts();
        prop_assert_eq!(tr + va + te, n);
        prop_assert!(ids.iter().all(|g| a.get(g).is_some()));
        let floor = |p: usize| n * p / 10;
        prop_assert!(tr >= floor(6) && va >= floor(2) && te == floor(2));
        prop_assert!(tr - floor(6) <= 1 && va - floor(2) <= 1);
    }
}
