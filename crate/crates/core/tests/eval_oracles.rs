//! Average precision against brute-force enumeration and statistical baselines.

use floodcast_core::eval::{bayes_optimal_ap, expected_ap, pr_curve, random_baseline};
use floodcast_core::seed;
use proptest::prelude::*;
use rand::Rng;

/// For every distinct threshold, count the confusion matrix directly.
fn brute_force_ap(scores: &[f64], labels: &[u8]) -> f64 {
    let positives = labels.iter().filter(|&&l| l == 1).count() as f64;
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for t in thresholds {
        let tp = scores.iter().zip(labels).filter(|(&s, &l)| s >= t && l == 1).count() as f64;
        let fp = scores.iter().zip(labels).filter(|(&s, &l)| s >= t && l == 0).count() as f64;
        let recall = tp / positives;
        ap += (recall - prev_recall) * tp / (tp + fp);
        prev_recall = recall;
    }
    ap
}

fn instance(rng: &mut seed::Rng) -> (Vec<f64>, Vec<u8>) {
    let n = rng.random_range(1..=1000);
    let levels = rng.random_range(2..=n.max(2) + 1);
    let mut labels: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<f64>() < 0.3)).collect();
    labels[0] = 1;
    // a coarse grid of levels forces ties
    let scores = (0..n)
        .map(|_| f64::from(rng.random_range(0..levels as u32)) / levels as f64)
        .collect();
    (scores, labels)
}

#[test]
fn ap_matches_brute_force() {
    let mut rng = seed::rng(77);
    for _ in 0..200 {
        let (s, l) = instance(&mut rng);
        let c = pr_curve(&s, &l).unwrap();
        assert!((c.average_precision - brute_force_ap(&s, &l)).abs() < 1e-9);
    }
}

#[test]
fn spec_example_by_enumeration() {
    let (s, l) = ([0.9, 0.8, 0.7, 0.6], [1u8, 0, 1, 0]);
    assert!((brute_force_ap(&s, &l) - 0.833_333_333_333_333_4).abs() < 1e-12);
    assert!((pr_curve(&s, &l).unwrap().average_precision - brute_force_ap(&s, &l)).abs() < 1e-15);
}

#[test]
fn uniform_scores_average_to_positive_fraction() {
    let n = 2000;
    let mut labels = vec![0u8; n];
    labels[..110].fill(1);
    assert!((random_baseline(&labels).unwrap().precision_level - 0.055).abs() < 1e-12);
    let mean: f64 = (0..100)
        .map(|s| {
            let mut rng = seed::rng(seed::derive_seed(99, s));
            let scores: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            pr_curve(&scores, &labels).unwrap().average_precision
        })
        .sum::<f64>()
        / 100.0;
    assert!((mean - 0.055).abs() <= 0.02, "mean AP {mean}");
}

#[test]
fn larger_samples_approach_positive_fraction() {
    let ap_at = |n: usize| {
        let mut rng = seed::rng(n as u64);
        let labels: Vec<u8> = (0..n).map(|i| u8::from(i % 5 == 0)).collect();
        let scores: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        (pr_curve(&scores, &labels).unwrap().average_precision - 0.2).abs()
    };
    assert!(ap_at(200_000) < 0.01);
}

fn scored() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
    (1usize..60).prop_flat_map(|n| {
        (
            proptest::collection::vec(0u8..20, n).prop_map(|v| v.into_iter().map(|x| f64::from(x) / 20.0).collect()),
            proptest::collection::vec(0u8..2, n),
        )
            .prop_map(|(s, mut l): (Vec<f64>, Vec<u8>)| {
                l[0] = 1;
                (s, l)
            })
    })
}

proptest! {
    #[test]
    fn invariant_under_increasing_transform((s, l) in scored()) {
        let t: Vec<f64> = s.iter().map(|x| (3.0 * x).exp() - 7.0).collect();
        let a = pr_curve(&s, &l).unwrap().average_precision;
        let b = pr_curve(&t, &l).unwrap().average_precision;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn invariant_under_joint_permutation((s, l) in scored(), seed_v in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut idx: Vec<usize> = (0..s.len()).collect();
        idx.shuffle(&mut seed::rng(seed_v));
        let ps: Vec<f64> = idx.iter().map(|&i| s[i]).collect();
        let pl: Vec<u8> = idx.iter().map(|&i| l[i]).collect();
        prop_assert_eq!(pr_curve(&s, &l).unwrap(), pr_curve(&ps, &pl).unwrap());
    }

    #[test]
    fn false_positive_on_top_lowers_ap((s, l) in scored()) {
        let a = pr_curve(&s, &l).unwrap().average_precision;
        let mut s2 = s.clone();
        let mut l2 = l.clone();
        s2.push(2.0);
        l2.push(0);
        let b = pr_curve(&s2, &l2).unwrap().average_precision;
        prop_assert!(b < a);
    }

    #[test]
    fn curve_shape((s, l) in scored()) {
        let c = pr_curve(&s, &l).unwrap();
        prop_assert!(c.points.windows(2).all(|w| w[0].recall <= w[1].recall && w[0].threshold > w[1].threshold));
        prop_assert!(c.points.iter().all(|p| (0.0..=1.0).contains(&p.precision) && (0.0..=1.0).contains(&p.recall)));
        prop_assert_eq!(c.points.last().unwrap().recall, 1.0);
        prop_assert!((0.0..=1.0).contains(&c.average_precision));
    }
}

/// `E[AP | some positive]` by weighting every label vector with its probability.
fn enumerated_expected_ap(scores: &[f64], probs: &[f64]) -> Option<f64> {
    let n = probs.len();
    let (mut num, mut mass) = (0.0, 0.0);
    for bits in 1u32..(1 << n) {
        let labels: Vec<u8> = (0..n).map(|i| ((bits >> i) & 1) as u8).collect();
        let w: f64 = labels
            .iter()
            .zip(probs)
            .map(|(&l, &p)| if l == 1 { p } else { 1.0 - p })
            .product();
        num += w * brute_force_ap(scores, &labels);
        mass += w;
    }
    (mass > 0.0).then(|| num / mass)
}

fn coarse_scores(n: usize) -> impl Strategy<Value = Vec<f64>> {
    // Few distinct values, so ties are common.
    proptest::collection::vec((0u8..5).prop_map(f64::from), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expected_ap_matches_label_enumeration(
        (scores, probs) in (1usize..=9).prop_flat_map(|n| (coarse_scores(n), proptest::collection::vec(0.0f64..=1.0, n)))
    ) {
        let exact = expected_ap(&scores, &probs).unwrap();
        let brute = enumerated_expected_ap(&scores, &probs);
        match (exact, brute) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}"),
            (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
        }
    }

    // Any ranking, tied or not, earns at most the Bayes ranking's expected AP.
    #[test]
    fn no_ranking_beats_bayes_in_expectation(
        (scores, probs) in (2usize..=40).prop_flat_map(|n| (coarse_scores(n), proptest::collection::vec(0.0f64..=1.0, n)))
    ) {
        let bayes = bayes_optimal_ap(&probs).unwrap().unwrap();
        let e = expected_ap(&scores, &probs).unwrap().unwrap();
        prop_assert!(e <= bayes + 1e-12, "{e} > {bayes}");
    }
}
