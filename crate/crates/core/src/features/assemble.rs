use std::fmt;
use std::str::FromStr;

use chrono::Duration;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{monthly_precip_stats, window_stats, PRECIP_STAT_NAMES, STAGE_STAT_NAMES};
use super::{Dataset, Example, ExampleKey, FeatureError};
use crate::hydrology::{detect_precip_events, month_flood_label, time_to_peak, HydrologyConfig, TTP_BINS};
use crate::ingest::GaugeRecord;
use crate::month::YearMonth;

/// Feature groups.
///
/// * `E1` – basin attributes plus the previous month's precipitation; no
///   river level information (ungauged sites).
/// * `E2` – `E1` plus the previous month's stage statistics.
/// * `E3` – `E2` plus the current month's observed precipitation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Experiment {
    E1,
    E2,
    E3,
}

impl Experiment {
    pub const ALL: [Experiment; 3] = [Experiment::E1, Experiment::E2, Experiment::E3];

    fn uses_stage(self) -> bool {
        self >= Experiment::E2
    }

    fn uses_current_precip(self) -> bool {
        self == Experiment::E3
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::E1 => "e1",
            Experiment::E2 => "e2",
            Experiment::E3 => "e3",
        })
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "e1" => Ok(Experiment::E1),
            "e2" => Ok(Experiment::E2),
            "e3" => Ok(Experiment::E3),
            _ => Err(format!("unknown experiment `{s}` (expected e1, e2 or e3)")),
        }
    }
}

/// Prediction target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    /// Flood occurrence in a gauge-month.
    GaugeMonth,
    /// One-vs-rest membership of a time-to-peak bin (0..=3).
    TtpBin(u8),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::GaugeMonth => f.write_str("gauge-month"),
            Target::TtpBin(k) => write!(f, "ttp-bin:{k}"),
        }
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "gauge-month" {
            return Ok(Target::GaugeMonth);
        }
        if let Some(k) = s.strip_prefix("ttp-bin:") {
            if let Ok(k) = k.parse::<u8>() {
                if k < TTP_BINS {
                    return Ok(Target::TtpBin(k));
                }
            }
        }
        Err(format!("unknown target `{s}` (expected gauge-month or ttp-bin:0..3)"))
    }
}

fn feature_names(attr_names: &[String], experiment: Experiment) -> Vec<String> {
    let mut names: Vec<String> = attr_names.iter().map(|a| format!("attr_{a}")).collect();
    names.extend(PRECIP_STAT_NAMES.iter().map(|n| format!("{n}_prev")));
    if experiment.uses_stage() {
        names.extend(STAGE_STAT_NAMES.iter().map(|n| format!("{n}_prev")));
    }
    if experiment.uses_current_precip() {
        names.extend(PRECIP_STAT_NAMES.iter().map(|n| format!("{n}_cur")));
    }
    names
}

/// Features for a reference month; `stage_window` is the span whose stage
/// statistics enter `E2`/`E3`. `None` when stage coverage is insufficient.
fn features_for(
    record: &GaugeRecord,
    experiment: Experiment,
    month: YearMonth,
    stage_window: (chrono::DateTime<chrono::Utc>, chrono::DateTime<chrono::Utc>),
    config: &HydrologyConfig,
) -> Option<Vec<f64>> {
    let mut f: Vec<f64> = record.attributes.values.values().copied().collect();
    f.extend(monthly_precip_stats(&record.precip, month.prev()).values());
    if experiment.uses_stage() {
        let st = window_stats(
            &record.series,
            stage_window.0,
            stage_window.1,
            record.thresholds.minor,
            config.coverage_cutoff,
        )
        .ok()?;
        f.extend(st.values());
    }
    if experiment.uses_current_precip() {
        f.extend(monthly_precip_stats(&record.precip, month).values());
    }
    Some(f)
}

fn gauge_month_examples(
    record: &GaugeRecord,
    experiment: Experiment,
    config: &HydrologyConfig,
) -> Result<Vec<Example<f64>>, FeatureError> {
    let (Some(first), Some(last)) = (record.series.first_time(), record.series.last_time()) else {
        return Ok(Vec::new());
    };
    let (first, last) = (YearMonth::of(&first), YearMonth::of(&last));
    let mut out = Vec::new();
    // the first month has no predecessor and is skipped
    let mut month = first.next();
    while month <= last {
        let label = month_flood_label(&record.series, &record.thresholds, month, config.coverage_cutoff)?;
        if let Some(label) = label.as_binary() {
            let prev = month.prev();
            if let Some(features) = features_for(record, experiment, month, (prev.start(), prev.end()), config) {
                out.push(Example {
                    gauge_id: record.gauge_id.clone(),
                    key: ExampleKey::Month(month),
                    features,
                    label,
                    bin: None,
                });
            }
        }
        month = month.next();
    }
    Ok(out)
}

fn event_examples(
    record: &GaugeRecord,
    experiment: Experiment,
    bin: u8,
    config: &HydrologyConfig,
) -> Result<Vec<Example<f64>>, FeatureError> {
    let Some(first) = record.series.first_time() else {
        return Ok(Vec::new());
    };
    let first = YearMonth::of(&first);
    let events = detect_precip_events(&record.precip, config.onset_mm, config.dry_gap_days)?;
    let mut out = Vec::new();
    for event in events {
        let month = event.month();
        if month <= first {
            continue;
        }
        let Some(peak) = time_to_peak(&record.series, &event, config.search_hours)? else {
            continue;
        };
        let window = (event.start - Duration::days(30), event.start);
        if let Some(features) = features_for(record, experiment, month, window, config) {
            out.push(Example {
                gauge_id: record.gauge_id.clone(),
                key: ExampleKey::Event(event.start),
                features,
                label: u8::from(peak.bin == bin),
                bin: Some(peak.bin),
            });
        }
    }
    Ok(out)
}

/// Builds the dataset for one experiment and target.
///
/// Gauge-month examples pair the flood label of month `m` with features from
/// month `m - 1` (plus static attributes, plus month `m` precipitation in
/// `E3`); the first month of each record and months with insufficient
/// coverage are skipped. Event examples use the month of event onset as the
/// reference month and the 30 days before onset for stage statistics; events
/// without an observed peak are skipped.
pub fn assemble_experiment(
    records: &[GaugeRecord],
    experiment: Experiment,
    target: Target,
    config: &HydrologyConfig,
) -> Result<Dataset<f64>, FeatureError> {
    let attr_names: Vec<String> = match records.first() {
        Some(r) => r.attributes.values.keys().cloned().collect(),
        None => return Err(FeatureError::EmptyDataset),
    };
    if records
        .iter()
        .any(|r| r.attributes.values.len() != attr_names.len() || !r.attributes.values.keys().eq(attr_names.iter()))
    {
        return Err(FeatureError::InconsistentFeatures);
    }
    let per_gauge: Vec<Vec<Example<f64>>> = records
        .par_iter()
        .map(|r| match target {
            Target::GaugeMonth => gauge_month_examples(r, experiment, config),
            Target::TtpBin(k) => event_examples(r, experiment, k, config),
        })
        .collect::<Result<_, _>>()?;
    Dataset::new(
        feature_names(&attr_names, experiment),
        per_gauge.into_iter().flatten().collect(),
    )
}
