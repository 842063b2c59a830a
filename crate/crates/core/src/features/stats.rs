use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::ingest::{DailyPrecip, StageSeries, CADENCE_SECONDS};
use crate::month::YearMonth;

pub const STAGE_STAT_NAMES: [&str; 6] = [
    "stage_mean",
    "stage_max",
    "stage_min",
    "stage_std",
    "stage_p90",
    "stage_frac_above_half_minor",
];

pub const PRECIP_STAT_NAMES: [&str; 3] = ["precip_total", "precip_max_day", "precip_wet_days"];

/// Daily total at or above which a day counts toward `precip_wet_days`.
pub const WET_DAY_MM: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageStats {
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    /// Population standard deviation.
    pub std: f64,
    /// 90th percentile, linear interpolation between order statistics.
    pub p90: f64,
    /// Fraction of readings at or above half the minor flood stage.
    pub frac_above_half_minor: f64,
}

impl StageStats {
    pub fn values(&self) -> [f64; 6] {
        [
            self.mean,
            self.max,
            self.min,
            self.std,
            self.p90,
            self.frac_above_half_minor,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecipStats {
    pub total: f64,
    pub max_day: f64,
    pub wet_days: f64,
}

impl PrecipStats {
    pub fn values(&self) -> [f64; 3] {
        [self.total, self.max_day, self.wet_days]
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Stage statistics over readings in `[from, to)`.
pub fn window_stats(
    series: &StageSeries,
    from: DateTime<Utc>,
    to: DateTime<Utc>,
    minor: f64,
    coverage_cutoff: f64,
) -> Result<StageStats, FeatureError> {
    let mut values: Vec<f64> = series.between(from, to).iter().filter_map(|r| r.stage).collect();
    let slots = ((to - from).num_seconds() / CADENCE_SECONDS).max(1) as f64;
    let coverage = values.len() as f64 / slots;
    if values.is_empty() || coverage < coverage_cutoff {
        return Err(FeatureError::InsufficientCoverage {
            coverage,
            cutoff: coverage_cutoff,
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let above = values.iter().filter(|&&v| v >= 0.5 * minor).count() as f64 / n;
    values.sort_by(f64::total_cmp);
    Ok(StageStats {
        mean,
        max: values[values.len() - 1],
        min: values[0],
        std: var.sqrt(),
        p90: percentile(&values, 0.9),
        frac_above_half_minor: above,
    })
}

pub fn monthly_stats(
    series: &StageSeries,
    month: YearMonth,
    minor: f64,
    coverage_cutoff: f64,
) -> Result<StageStats, FeatureError> {
    window_stats(series, month.start(), month.end(), minor, coverage_cutoff)
}

pub fn monthly_precip_stats(precip: &DailyPrecip, month: YearMonth) -> PrecipStats {
    let days = precip.between(month.first_day(), month.next().first_day());
    PrecipStats {
        total: days.iter().map(|d| d.precip_mm).sum(),
        max_day: days.iter().map(|d| d.precip_mm).fold(0.0, f64::max),
        wet_days: days.iter().filter(|d| d.precip_mm >= WET_DAY_MM).count() as f64,
    }
}
