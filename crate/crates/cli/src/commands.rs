use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use floodcast_core::eval::{emit_pr_csv, noaa_monthly_eval, render_pr_svg, PlotSeries};
use floodcast_core::features::{assemble_experiment, class_balance, write_dataset_csv};
use floodcast_core::ingest::{parse_forecast_csv, parse_stage_csv, parse_thresholds_csv};
use floodcast_core::synth::{generate_bundle, planted_signal, write_bundle, SynthError};
use serde::Serialize;
use serde_json::Value;

use crate::config::{to_toml, ExperimentConfig, FeaturizeSettings, InputSettings, SynthSettings, RESOLVED_CONFIG};
use crate::error::{CliError, CliResult};
use crate::output::Staging;
use crate::pipeline::{load_inputs, run_experiment, ExperimentReport, Reference};

/// Runs `f` on a dedicated pool; 0 threads lets rayon choose.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("building the thread pool")?;
    Ok(pool.install(f))
}

fn synth_error(e: SynthError) -> CliError {
    match e {
        SynthError::TooFewGauges(_) | SynthError::TooFewMonths(_) | SynthError::InvalidParameter(_) => {
            CliError::usage(e.to_string())
        }
        other => CliError::Runtime(other.into()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthSummary {
    pub gauges: usize,
    pub months: usize,
    pub flood_rate: f64,
    pub files: Vec<PathBuf>,
}

pub fn cmd_synth(s: &SynthSettings) -> CliResult<SynthSummary> {
    let bundle = with_threads(s.threads, || {
        let b = generate_bundle(&s.synth_config(), s.seed)?;
        match s.planted_strength {
            Some(p) => planted_signal(&b, p),
            None => Ok(b),
        }
    })?
    .map_err(synth_error)?;
    let staging = Staging::new(&s.out)?;
    write_bundle(&bundle, staging.path("")).map_err(synth_error)?;
    staging.write(RESOLVED_CONFIG, to_toml(s))?;
    Ok(SynthSummary {
        gauges: s.gauges,
        months: s.months,
        flood_rate: bundle.flood_rate(),
        files: staging.commit()?,
    })
}

#[derive(Debug, Clone, Serialize)]
struct FileReport {
    file: &'static str,
    rows: usize,
    skipped: usize,
    diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestSummary {
    files: Vec<FileReport>,
    pub joined_gauges: Vec<String>,
    pub dropped: floodcast_core::ingest::CoverageReport,
}

pub fn cmd_ingest(s: &InputSettings) -> CliResult<IngestSummary> {
    let inputs = load_inputs(&s.data, s.strictness)?;
    let mut files: Vec<FileReport> = inputs
        .reports
        .into_iter()
        .map(|(file, r)| FileReport {
            file,
            rows: r.rows,
            skipped: r.skipped,
            diagnostics: r.diagnostics,
        })
        .collect();
    let forecasts = s.data.join("forecasts.csv");
    if forecasts.is_file() {
        let r = parse_forecast_csv(&forecasts, s.strictness)
            .with_context(|| format!("reading {}", forecasts.display()))?
            .report;
        files.push(FileReport {
            file: "forecasts.csv",
            rows: r.rows,
            skipped: r.skipped,
            diagnostics: r.diagnostics,
        });
    }
    let summary = IngestSummary {
        files,
        joined_gauges: inputs.records.iter().map(|r| r.gauge_id.clone()).collect(),
        dropped: inputs.coverage,
    };
    let staging = Staging::new(&s.out)?;
    staging.write("ingest_report.json", json(&summary))?;
    staging.write(RESOLVED_CONFIG, to_toml(s))?;
    staging.commit()?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeaturizeSummary {
    pub examples: usize,
    pub features: Vec<String>,
    pub positive_rate: f64,
}

pub fn cmd_featurize(s: &FeaturizeSettings) -> CliResult<FeaturizeSummary> {
    let inputs = load_inputs(&s.data, s.strictness)?;
    let data = assemble_experiment(&inputs.records, s.experiment, s.target, &s.hydrology.config())
        .context("assembling features")?;
    let staging = Staging::new(&s.out)?;
    write_dataset_csv(staging.path("features.csv"), &data).context("writing features.csv")?;
    staging.write(RESOLVED_CONFIG, to_toml(s))?;
    staging.commit()?;
    Ok(FeaturizeSummary {
        examples: data.len(),
        positive_rate: class_balance(&data.examples),
        features: data.feature_names,
    })
}

/// Runs an experiment and writes `report.json`, one `pr_<model>.csv` per
/// model, `pr_all.svg`, `split.json` and the resolved config.
pub fn cmd_experiment(cfg: &ExperimentConfig) -> CliResult<ExperimentReport> {
    let run = with_threads(cfg.threads, || run_experiment(&cfg.settings))??;
    let staging = Staging::new(&cfg.out)?;
    staging.write(RESOLVED_CONFIG, to_toml(cfg))?;
    staging.write("report.json", run.report.to_json())?;
    staging.write("split.json", json(&run.split))?;
    let mut series = Vec::new();
    for (family, curve) in &run.curves {
        let name = format!("pr_{family}.csv");
        emit_pr_csv(curve, staging.path(&name)).with_context(|| format!("writing {name}"))?;
        series.push(PlotSeries::from_curve(family.to_string(), curve));
    }
    series.push(PlotSeries::from_baseline("baseline", &run.baseline));
    staging.write("pr_all.svg", render_pr_svg(&series))?;
    staging.commit()?;
    Ok(run.report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoaaReport {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub evaluated_months: usize,
    pub precision: f64,
    pub recall: f64,
    pub reference: Reference,
}

/// Scores `forecasts.csv` against `stage.csv` and `thresholds.csv`.
pub fn cmd_eval_noaa(s: &InputSettings) -> CliResult<NoaaReport> {
    let read = |name: &str| s.data.join(name);
    let forecasts = parse_forecast_csv(read("forecasts.csv"), s.strictness)
        .with_context(|| format!("reading {}", read("forecasts.csv").display()))?;
    let stage = parse_stage_csv(read("stage.csv"), s.strictness)
        .with_context(|| format!("reading {}", read("stage.csv").display()))?;
    let thresholds = parse_thresholds_csv(read("thresholds.csv"))
        .with_context(|| format!("reading {}", read("thresholds.csv").display()))?;
    let c = noaa_monthly_eval(&forecasts.items, &stage.items, &thresholds, s.coverage_cutoff)
        .context("comparing forecasts with observations")?;
    let report = NoaaReport {
        true_positives: c.true_positives,
        false_positives: c.false_positives,
        false_negatives: c.false_negatives,
        true_negatives: c.true_negatives,
        evaluated_months: c.evaluated_months,
        precision: c.precision,
        recall: c.recall,
        reference: Reference::published(),
    };
    let staging = Staging::new(&s.out)?;
    staging.write("noaa_report.json", json(&report))?;
    staging.write(RESOLVED_CONFIG, to_toml(s))?;
    staging.commit()?;
    Ok(report)
}

/// Text summary of an experiment directory's `report.json`.
pub fn cmd_report(run_dir: &Path) -> CliResult<String> {
    let path = run_dir.join("report.json");
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let r: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let field = |v: &Value, k: &str| v.get(k).cloned().unwrap_or(Value::Null);
    let num = |v: &Value, k: &str| {
        field(v, k)
            .as_f64()
            .ok_or_else(|| anyhow::anyhow!("report.json: `{k}` missing"))
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "experiment {}  target {}  seed {}",
        field(&r, "experiment").as_str().unwrap_or("?"),
        field(&r, "target").as_str().unwrap_or("?"),
        field(&r, "seed")
    );
    let test = field(&r, "test");
    let _ = writeln!(
        out,
        "test split: {} examples, {} positive (rate {:.4})",
        field(&test, "examples"),
        field(&test, "positives"),
        num(&r, "positive_rate")?
    );
    let target = num(&r, "precision_target")?;
    let _ = writeln!(
        out,
        "{:<10} {:>8} {:>14} {:>12}",
        "curve",
        "AP",
        format!("recall@P>={target}"),
        "expected AP"
    );
    for c in field(&r, "curves").as_array().into_iter().flatten() {
        let expected = c
            .get("expected_ap")
            .and_then(Value::as_f64)
            .map_or_else(|| "-".to_string(), |e| format!("{e:.4}"));
        let _ = writeln!(
            out,
            "{:<10} {:>8.4} {:>14.4} {:>12}",
            field(c, "name").as_str().unwrap_or("?"),
            num(c, "average_precision")?,
            num(c, "recall_at_precision")?,
            expected
        );
    }
    if let Some(b) = r.get("bayes_optimal_ap").and_then(Value::as_f64) {
        let _ = writeln!(out, "bayes-optimal expected AP {b:.4}");
    }
    let reference = field(&r, "reference");
    let _ = writeln!(
        out,
        "operational forecast, {}: precision {} recall {}",
        field(&reference, "label").as_str().unwrap_or("?"),
        field(&reference, "precision"),
        field(&reference, "recall")
    );
    Ok(out)
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes") + "\n"
}
