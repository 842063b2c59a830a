//! Split, featurize, tune, refit and score: the in-memory part of
//! `experiment`, kept apart from file output so tests can call it directly.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{anyhow, Context};
use floodcast_core::eval::{
    bayes_optimal_ap, expected_ap, pr_curve, random_baseline, recall_at_precision, BaselineCurve, PrCurve,
    NOAA_REFERENCE_PRECISION, NOAA_REFERENCE_RECALL,
};
use floodcast_core::features::{
    assemble_experiment, fit_normalizer, split_by_gauge, Dataset, Split, SplitAssignment, Target,
};
use floodcast_core::ingest::{
    join_gauges, parse_attributes_csv, parse_precip_csv, parse_stage_csv, parse_thresholds_csv, CoverageReport,
    GaugeRecord, ParseReport, Strictness,
};
use floodcast_core::models::{fit_model, tune, Classifier, HyperParams, ModelFamily};
use floodcast_core::seed::derive_seed_str;
use floodcast_core::synth::read_planted_records;
use floodcast_core::YearMonth;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentSettings;
use crate::error::CliResult;

pub const REPORT_FORMAT: &str = "floodcast-report";
pub const REPORT_VERSION: u32 = 1;
pub const REFERENCE_LABEL: &str = "published reference, not recomputed";

/// Parsed and joined input files of one data directory.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub records: Vec<GaugeRecord>,
    pub coverage: CoverageReport,
    /// Per-file row counts, in the order the files were read.
    pub reports: Vec<(&'static str, ParseReport)>,
}

pub fn load_inputs(dir: &Path, strictness: Strictness) -> anyhow::Result<Inputs> {
    let file = |name: &str| dir.join(name);
    let ctx = |name: &'static str| move || format!("reading {}", dir.join(name).display());
    let stage = parse_stage_csv(file("stage.csv"), strictness).with_context(ctx("stage.csv"))?;
    let thresholds = parse_thresholds_csv(file("thresholds.csv")).with_context(ctx("thresholds.csv"))?;
    let precip = parse_precip_csv(file("precip.csv"), strictness).with_context(ctx("precip.csv"))?;
    let attributes = parse_attributes_csv(file("attributes.csv"), strictness).with_context(ctx("attributes.csv"))?;
    let threshold_report = ParseReport {
        rows: thresholds.len(),
        ..Default::default()
    };
    let reports = vec![
        ("stage.csv", stage.report),
        ("thresholds.csv", threshold_report),
        ("precip.csv", precip.report),
        ("attributes.csv", attributes.report),
    ];
    let joined = join_gauges(stage.items, thresholds, precip.items, attributes.items)
        .with_context(|| format!("joining gauges in {}", dir.display()))?;
    Ok(Inputs {
        records: joined.records,
        coverage: joined.coverage,
        reports,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Model,
    Baseline,
}

/// Test-set summary of one precision-recall curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSummary {
    pub name: String,
    pub kind: CurveKind,
    pub average_precision: f64,
    pub recall_at_precision: f64,
    /// AP averaged over test labels drawn from the planted posterior;
    /// present only for planted-signal data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_ap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    /// Winning grid point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<HyperParams>,
    /// Validation AP of every grid point, in grid order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation_ap: Option<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitCounts {
    pub gauges: usize,
    pub examples: usize,
    pub positives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reference {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
}

impl Reference {
    pub fn published() -> Self {
        Self {
            label: REFERENCE_LABEL.to_string(),
            precision: NOAA_REFERENCE_PRECISION,
            recall: NOAA_REFERENCE_RECALL,
        }
    }
}

/// Contents of `report.json`. Holds no timestamps or paths that vary
/// between identical runs, so equal settings give equal bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub experiment: String,
    pub target: String,
    pub joined_gauges: usize,
    pub dropped_gauges: Vec<String>,
    pub train: SplitCounts,
    pub val: SplitCounts,
    pub test: SplitCounts,
    /// Positive fraction of the test split; also the baseline's precision.
    pub positive_rate: f64,
    pub precision_target: f64,
    pub curves: Vec<CurveSummary>,
    /// Expected AP, over test labels drawn from the planted posterior, of
    /// ranking by that posterior: no fixed ranking can do better on average.
    /// Present only for planted-signal data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bayes_optimal_ap: Option<f64>,
    pub reference: Reference,
    pub config: ExperimentSettings,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn curve(&self, name: &str) -> Option<&CurveSummary> {
        self.curves.iter().find(|c| c.name == name)
    }
}

/// Everything an experiment produced, before anything is written.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub report: ExperimentReport,
    pub curves: Vec<(ModelFamily, PrCurve<f64>)>,
    pub baseline: BaselineCurve,
    pub split: SplitAssignment,
}

fn counts(d: &Dataset<f64>) -> SplitCounts {
    SplitCounts {
        gauges: d.gauges().len(),
        examples: d.len(),
        positives: d.examples.iter().filter(|e| e.label == 1).count(),
    }
}

/// Planted posterior of every test example, in example order, when the
/// data directory carries a planted signal.
fn planted_posteriors(dir: &Path, test: &Dataset<f64>) -> anyhow::Result<Option<Vec<f64>>> {
    let path = dir.join("planted_signal.csv");
    if !path.is_file() {
        return Ok(None);
    }
    let posterior: HashMap<(String, YearMonth), f64> = read_planted_records(&path)?
        .into_iter()
        .map(|r| ((r.gauge_id, r.month), r.posterior))
        .collect();
    test.examples
        .iter()
        .map(|e| {
            let m = e.key.month();
            posterior
                .get(&(e.gauge_id.clone(), m))
                .copied()
                .with_context(|| format!("{} has no planted record for {} {m}", path.display(), e.gauge_id))
        })
        .collect::<anyhow::Result<Vec<_>>>()
        .map(Some)
}

/// Runs one experiment on the current rayon pool.
///
/// Gauges are split 60/20/20; features are scaled with train-split
/// statistics; each requested family is tuned on validation AP, optionally
/// refit on train plus validation, and scored on the test split.
pub fn run_experiment(settings: &ExperimentSettings) -> CliResult<ExperimentRun> {
    let inputs = load_inputs(&settings.data, settings.strictness)?;
    let data = assemble_experiment(
        &inputs.records,
        settings.experiment,
        settings.target,
        &settings.hydrology.config(),
    )
    .context("assembling features")?;
    let ids: Vec<&str> = inputs.records.iter().map(|r| r.gauge_id.as_str()).collect();
    let split = split_by_gauge(&ids, derive_seed_str(settings.seed, "split")).context("splitting gauges")?;
    let part = |s: Split| data.filter_gauges(|g| split.get(g) == Some(s));
    let (train, val, test) = (part(Split::Train), part(Split::Val), part(Split::Test));
    for (name, d) in [("train", &train), ("validation", &val), ("test", &test)] {
        if d.is_empty() {
            return Err(anyhow!("the {name} split has no examples").into());
        }
    }
    let norm = fit_normalizer(&train).context("fitting the normalizer")?;
    let scale = |d: &Dataset<f64>| norm.apply(d).context("scaling features");
    let (train_n, val_n, test_n) = (scale(&train)?, scale(&val)?, scale(&test)?);
    let (x_tr, y_tr) = (train_n.to_matrix(), train_n.labels());
    let (x_va, y_va) = (val_n.to_matrix(), val_n.labels());
    let (x_te, y_te) = (test_n.to_matrix(), test_n.labels());
    let pooled = Dataset::new(
        train_n.feature_names.clone(),
        train_n.examples.iter().chain(&val_n.examples).cloned().collect(),
    )
    .context("pooling train and validation")?;
    let (x_all, y_all) = (pooled.to_matrix(), pooled.labels());
    let posteriors = match settings.target {
        Target::GaugeMonth => planted_posteriors(&settings.data, &test)?,
        Target::TtpBin(_) => None,
    };

    let fitted = settings
        .model
        .families()
        .into_par_iter()
        .map(|family| -> anyhow::Result<_> {
            let seed = derive_seed_str(settings.seed, family.name());
            let tuned = tune(&settings.grid.grid(family), (&x_tr, &y_tr), (&x_va, &y_va), seed)
                .with_context(|| format!("tuning {family}"))?;
            let model = if settings.refit {
                fit_model(&x_all, &y_all, &tuned.best, seed).with_context(|| format!("refitting {family}"))?
            } else {
                tuned.model.clone()
            };
            let scores = model.score_matrix(&x_te)?;
            let curve = pr_curve(&scores, &y_te).with_context(|| format!("scoring {family} on the test split"))?;
            let expected = match &posteriors {
                Some(p) => expected_ap(&scores, p)?,
                None => None,
            };
            Ok((family, tuned, curve, expected))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let baseline = random_baseline(&y_te).context("baseline")?;
    let target = settings.precision_target;
    let mut curves: Vec<CurveSummary> = fitted
        .iter()
        .map(|(family, tuned, curve, expected)| CurveSummary {
            name: family.to_string(),
            kind: CurveKind::Model,
            average_precision: curve.average_precision,
            recall_at_precision: recall_at_precision(curve, target),
            expected_ap: *expected,
            file: Some(format!("pr_{family}.csv")),
            params: Some(tuned.best.clone()),
            validation_ap: Some(tuned.val_ap.clone()),
        })
        .collect();
    curves.push(CurveSummary {
        name: "baseline".into(),
        kind: CurveKind::Baseline,
        average_precision: baseline.precision_level,
        // A flat curve reaches every recall at its one precision level.
        recall_at_precision: if baseline.precision_level >= target { 1.0 } else { 0.0 },
        expected_ap: None,
        file: None,
        params: None,
        validation_ap: None,
    });

    let bayes_optimal_ap = match &posteriors {
        Some(p) => bayes_optimal_ap(p).context("bayes-optimal AP")?,
        None => None,
    };
    let report = ExperimentReport {
        format: REPORT_FORMAT.into(),
        version: REPORT_VERSION,
        seed: settings.seed,
        experiment: settings.experiment.to_string(),
        target: settings.target.to_string(),
        joined_gauges: inputs.records.len(),
        dropped_gauges: inputs.coverage.dropped.iter().map(|(g, _)| g.clone()).collect(),
        train: counts(&train),
        val: counts(&val),
        test: counts(&test),
        positive_rate: baseline.precision_level,
        precision_target: target,
        curves,
        bayes_optimal_ap,
        reference: Reference::published(),
        config: settings.clone(),
    };
    Ok(ExperimentRun {
        report,
        curves: fitted.into_iter().map(|(f, _, c, _)| (f, c)).collect(),
        baseline,
        split,
    })
}
