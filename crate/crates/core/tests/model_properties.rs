//! Cross-model properties: bounded scores, determinism, monotone loss.

use floodcast_core::models::*;
use floodcast_core::seed;
use proptest::prelude::*;
use rand::Rng;

fn noisy(n: usize, d: usize, s: u64) -> (Matrix<f64>, Vec<u8>) {
    let mut rng = seed::rng(s);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let y = rows
        .iter()
        .map(|r| u8::from(r[0] * 1.5 - r[1] + rng.random_range(-0.5..0.5) > 0.2))
        .collect();
    (Matrix::from_vecs(&rows), y)
}

fn small_models(x: &Matrix<f64>, y: &[u8], s: u64) -> Vec<Model<f64>> {
    vec![
        fit_model(
            x,
            y,
            &HyperParams::Forest(ForestParams {
                n_trees: 15,
                ..Default::default()
            }),
            s,
        )
        .unwrap(),
        fit_model(
            x,
            y,
            &HyperParams::Gbdt(GbdtParams {
                n_rounds: 30,
                ..Default::default()
            }),
            s,
        )
        .unwrap(),
        fit_model(
            x,
            y,
            &HyperParams::Mlp(MlpParams {
                hidden: vec![8],
                epochs: 10,
                ..Default::default()
            }),
            s,
        )
        .unwrap(),
    ]
}

#[test]
fn gbdt_loss_is_monotone_over_many_rounds() {
    for s in 0..3 {
        let (x, y) = noisy(300, 5, 50 + s);
        let m = fit_gbdt(
            &x,
            &y,
            &GbdtParams {
                n_rounds: 100,
                learning_rate: 0.3,
                ..Default::default()
            },
            s,
        )
        .unwrap();
        let loss = m.train_loss();
        assert_eq!(loss.len(), 101);
        assert!(loss.windows(2).all(|w| w[1] <= w[0]), "seed {s}");
        assert!(loss[100] < loss[0]);
    }
}

#[test]
fn models_are_identical_across_thread_counts() {
    let (x, y) = noisy(200, 4, 3);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| small_models(&x, &y, 9));
    let b = four.install(|| small_models(&x, &y, 9));
    assert_eq!(a, b);
    let grid = default_grid(ModelFamily::Gbdt)[..2].to_vec();
    let ta = one.install(|| tune(&grid, (&x, &y), (&x, &y), 1).unwrap());
    let tb = four.install(|| tune(&grid, (&x, &y), (&x, &y), 1).unwrap());
    assert_eq!(ta.model, tb.model);
    assert_eq!(ta.val_ap, tb.val_ap);
}

#[test]
fn forest_of_one_full_tree_is_cart() {
    let (x, y) = noisy(120, 3, 4);
    let p = ForestParams {
        n_trees: 1,
        bootstrap: false,
        feature_subset: FeatureSubset::All,
        max_depth: 5,
        min_leaf: 2,
    };
    let f = fit_forest(&x, &y, &p, 6).unwrap();
    let t = fit_tree(
        &x,
        &y,
        &TreeParams {
            max_depth: 5,
            min_leaf: 2,
            feature_subset: FeatureSubset::All,
        },
        0,
    )
    .unwrap();
    for r in x.rows() {
        assert_eq!(f.score(r).unwrap().to_bits(), t.score(r).unwrap().to_bits());
    }
}

#[test]
fn dimension_mismatch_is_reported() {
    let (x, y) = noisy(50, 3, 5);
    for m in small_models(&x, &y, 1) {
        assert!(matches!(
            m.score(&[0.0, 1.0]),
            Err(ModelError::DimensionMismatch { expected: 3, found: 2 })
        ));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scores_stay_in_unit_interval(row in proptest::collection::vec(-1e12f64..1e12, 4)) {
        use std::sync::OnceLock;
        static MODELS: OnceLock<Vec<Model<f64>>> = OnceLock::new();
        let models = MODELS.get_or_init(|| {
            let (x, y) = noisy(150, 4, 11);
            small_models(&x, &y, 2)
        });
        for m in models {
            let s = m.score(&row).unwrap();
            prop_assert!(s.is_finite() && (0.0..=1.0).contains(&s));
        }
    }

    #[test]
    fn increasing_feature_transform_keeps_training_scores(s in 0u64..1000, col in 0usize..3) {
        let (x, y) = noisy(60, 3, s);
        let xt = x.map_column(col, |v| (2.0 * v).exp() + 3.0);
        // Out-of-bag rows can sit between a split's neighbours, where raw and
        // transformed midpoints disagree, so only in-sample trees qualify.
        let fp = ForestParams { n_trees: 5, bootstrap: false, ..Default::default() };
        let gp = GbdtParams { n_rounds: 10, ..Default::default() };
        let f = (fit_forest(&x, &y, &fp, s).unwrap(), fit_forest(&xt, &y, &fp, s).unwrap());
        let g = (fit_gbdt(&x, &y, &gp, s).unwrap(), fit_gbdt(&xt, &y, &gp, s).unwrap());
        prop_assert_eq!(f.0.score_matrix(&x).unwrap(), f.1.score_matrix(&xt).unwrap());
        prop_assert_eq!(g.0.score_matrix(&x).unwrap(), g.1.score_matrix(&xt).unwrap());
    }
}
