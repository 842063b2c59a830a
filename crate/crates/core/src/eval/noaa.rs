use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::hydrology::{month_flood_label, MonthLabel};
use crate::ingest::{FloodThresholds, ForecastRecord, StageSeries};
use crate::month::YearMonth;

/// Published operational-forecast precision; reported alongside, never recomputed.
pub const NOAA_REFERENCE_PRECISION: f64 = 0.5;
/// Published operational-forecast recall; reported alongside, never recomputed.
pub const NOAA_REFERENCE_RECALL: f64 = 0.245;

/// Monthly confusion counts of forecast floods against observed floods.
///
/// Precision (recall) is 0 when nothing was predicted (observed) positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoaaComparison {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub evaluated_months: usize,
    pub reference_precision: f64,
    pub reference_recall: f64,
}

/// A gauge-month is forecast to flood when any forecast valid inside it
/// reaches the minor stage. Months are assigned by valid time; months
/// without enough observed readings are skipped.
pub fn noaa_monthly_eval(
    forecasts: &[ForecastRecord],
    observed: &[StageSeries],
    thresholds: &[FloodThresholds],
    coverage_cutoff: f64,
) -> Result<NoaaComparison, EvalError> {
    let series: BTreeMap<&str, &StageSeries> = observed.iter().map(|s| (s.gauge_id(), s)).collect();
    let minor: BTreeMap<&str, &FloodThresholds> = thresholds.iter().map(|t| (t.gauge_id.as_str(), t)).collect();

    let mut predicted: BTreeMap<(&str, YearMonth), bool> = BTreeMap::new();
    for f in forecasts {
        let Some(t) = minor.get(f.gauge_id.as_str()) else {
            continue;
        };
        let hit = predicted
            .entry((f.gauge_id.as_str(), YearMonth::of(&f.valid_at)))
            .or_insert(false);
        *hit |= f.forecast_stage >= t.minor;
    }

    let (mut tp, mut fp, mut fneg, mut tn) = (0, 0, 0, 0);
    let mut seen = BTreeSet::new();
    for (&(gauge, month), &pred) in &predicted {
        let (Some(s), Some(t)) = (series.get(gauge), minor.get(gauge)) else {
            continue;
        };
        let obs = match month_flood_label(s, t, month, coverage_cutoff)? {
            MonthLabel::InsufficientData => continue,
            MonthLabel::Flood => true,
            MonthLabel::NoFlood => false,
        };
        seen.insert((gauge, month));
        match (pred, obs) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            (false, false) => tn += 1,
        }
    }
    if seen.is_empty() {
        return Err(EvalError::NoOverlap);
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(NoaaComparison {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fneg,
        true_negatives: tn,
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fneg),
        evaluated_months: seen.len(),
        reference_precision: NOAA_REFERENCE_PRECISION,
        reference_recall: NOAA_REFERENCE_RECALL,
    })
}
