//! Label construction: monthly flood occurrence and time-to-peak.
//!
//! A gauge-month is flooded when any reading in the calendar month reaches
//! the minor flood stage. Time to peak is measured from the onset of a
//! precipitation event to the highest stage observed within a search window.

use chrono::{DateTime, Duration, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{DailyPrecip, FloodThresholds, StageSeries};
use crate::month::YearMonth;

/// Upper edges of time-to-peak bins 0, 1 and 2, in hours.
pub const TTP_BIN_EDGES: [f64; 3] = [3.12, 7.44, 18.0];
pub const TTP_BINS: u8 = 4;

#[derive(Debug, Error, PartialEq)]
pub enum HydrologyError {
    #[error("gauge mismatch: expected {expected}, got {found}")]
    UnknownGauge { expected: String, found: String },
    #[error("time to peak must be positive, got {0}")]
    NonPositiveTtp(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Tunable label parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydrologyConfig {
    /// Daily total (mm) at or above which a day counts as wet.
    pub onset_mm: f64,
    /// Consecutive dry days that separate two events.
    pub dry_gap_days: u32,
    /// Peak search window after event onset, hours.
    pub search_hours: f64,
    /// Minimum fraction of 15-minute slots with a reading for a month to be labelled.
    pub coverage_cutoff: f64,
}

impl Default for HydrologyConfig {
    fn default() -> Self {
        Self {
            onset_mm: 10.0,
            dry_gap_days: 1,
            search_hours: 168.0,
            coverage_cutoff: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonthLabel {
    Flood,
    NoFlood,
    InsufficientData,
}

impl MonthLabel {
    pub fn as_binary(self) -> Option<u8> {
        match self {
            MonthLabel::Flood => Some(1),
            MonthLabel::NoFlood => Some(0),
            MonthLabel::InsufficientData => None,
        }
    }
}

fn check_gauge(expected: &str, found: &str) -> Result<(), HydrologyError> {
    if expected != found {
        return Err(HydrologyError::UnknownGauge {
            expected: expected.into(),
            found: found.into(),
        });
    }
    Ok(())
}

/// Fraction of the month's expected 15-minute slots that hold a reading.
pub fn month_coverage(series: &StageSeries, month: YearMonth) -> f64 {
    let present = series
        .between(month.start(), month.end())
        .iter()
        .filter(|r| r.stage.is_some())
        .count();
    present as f64 / f64::from(month.expected_slots())
}

/// Flood occurrence for one calendar month; a reading equal to the minor
/// stage counts as a flood.
pub fn month_flood_label(
    series: &StageSeries,
    thresholds: &FloodThresholds,
    month: YearMonth,
    coverage_cutoff: f64,
) -> Result<MonthLabel, HydrologyError> {
    check_gauge(series.gauge_id(), &thresholds.gauge_id)?;
    if month_coverage(series, month) < coverage_cutoff {
        return Ok(MonthLabel::InsufficientData);
    }
    let flooded = series
        .between(month.start(), month.end())
        .iter()
        .filter_map(|r| r.stage)
        .any(|s| s >= thresholds.minor);
    Ok(if flooded {
        MonthLabel::Flood
    } else {
        MonthLabel::NoFlood
    })
}

/// A run of wet days, from midnight of the first wet day to midnight after the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecipEvent {
    pub gauge_id: String,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub total_precip_mm: f64,
}

impl PrecipEvent {
    pub fn first_day(&self) -> NaiveDate {
        self.start.date_naive()
    }

    /// Last wet day of the event.
    pub fn last_day(&self) -> NaiveDate {
        (self.end - Duration::days(1)).date_naive()
    }

    pub fn month(&self) -> YearMonth {
        YearMonth::of(&self.start)
    }
}

/// Segments daily totals into events.
///
/// A day is wet when its total is at least `onset_mm`. Wet days separated by
/// fewer than `dry_gap_days` dry days belong to the same event; days missing
/// from the record count as dry, and so does the time before the record
/// starts. The event total sums every recorded day from first to last wet day.
pub fn detect_precip_events(
    precip: &DailyPrecip,
    onset_mm: f64,
    dry_gap_days: u32,
) -> Result<Vec<PrecipEvent>, HydrologyError> {
    if !(onset_mm > 0.0) {
        return Err(HydrologyError::InvalidParameter(format!(
            "onset_mm must be > 0, got {onset_mm}"
        )));
    }
    if dry_gap_days < 1 {
        return Err(HydrologyError::InvalidParameter("dry_gap_days must be >= 1".into()));
    }
    let records = precip.records();
    let mut events = Vec::new();
    // (first wet index, last wet index)
    let mut open: Option<(usize, usize)> = None;
    let close = |first: usize, last: usize| {
        let start = records[first].date;
        let end = records[last].date + Duration::days(1);
        PrecipEvent {
            gauge_id: precip.gauge_id().to_string(),
            start: start.and_hms_opt(0, 0, 0).expect("midnight").and_utc(),
            end: end.and_hms_opt(0, 0, 0).expect("midnight").and_utc(),
            total_precip_mm: records[first..=last].iter().map(|r| r.precip_mm).sum(),
        }
    };
    for (i, r) in records.iter().enumerate() {
        if r.precip_mm < onset_mm {
            continue;
        }
        open = match open {
            Some((first, last)) => {
                let dry_between = (r.date - records[last].date).num_days() - 1;
                if dry_between < i64::from(dry_gap_days) {
                    Some((first, i))
                } else {
                    events.push(close(first, last));
                    Some((i, i))
                }
            }
            None => Some((i, i)),
        };
    }
    if let Some((first, last)) = open {
        events.push(close(first, last));
    }
    Ok(events)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeToPeak {
    pub event: PrecipEvent,
    pub peak_time: DateTime<Utc>,
    pub ttp_hours: f64,
    pub bin: u8,
}

/// Locates the stage peak in `(event.start, event.start + search_hours]`.
///
/// Returns `None` (no peak) when the window holds fewer than four readings or
/// its maximum sits on the last reading, i.e. the stage may still be rising.
/// Ties resolve to the earliest reading.
pub fn time_to_peak(
    series: &StageSeries,
    event: &PrecipEvent,
    search_hours: f64,
) -> Result<Option<TimeToPeak>, HydrologyError> {
    check_gauge(series.gauge_id(), &event.gauge_id)?;
    if !(search_hours > 0.0) {
        return Err(HydrologyError::InvalidParameter(format!(
            "search_hours must be > 0, got {search_hours}"
        )));
    }
    let window_end = event.start + Duration::seconds((search_hours * 3600.0).round() as i64);
    let lo = series.readings().partition_point(|r| r.time <= event.start);
    let hi = series.readings().partition_point(|r| r.time <= window_end);
    let window: Vec<_> = series.readings()[lo..hi.max(lo)]
        .iter()
        .filter_map(|r| r.stage.map(|s| (r.time, s)))
        .collect();
    if window.len() < 4 {
        return Ok(None);
    }
    let (mut best, mut best_stage) = (0, window[0].1);
    for (i, &(_, s)) in window.iter().enumerate().skip(1) {
        if s > best_stage {
            best = i;
            best_stage = s;
        }
    }
    if best == window.len() - 1 {
        return Ok(None);
    }
    let peak_time = window[best].0;
    let ttp_hours = (peak_time - event.start).num_seconds() as f64 / 3600.0;
    Ok(Some(TimeToPeak {
        event: event.clone(),
        peak_time,
        ttp_hours,
        bin: bin_ttp(ttp_hours)?,
    }))
}

/// Bins: `[0, 3.12)`, `[3.12, 7.44)`, `[7.44, 18)`, `[18, inf)`.
pub fn bin_ttp(ttp_hours: f64) -> Result<u8, HydrologyError> {
    if !(ttp_hours > 0.0) {
        return Err(HydrologyError::NonPositiveTtp(ttp_hours));
    }
    Ok(TTP_BIN_EDGES.iter().filter(|&&edge| ttp_hours >= edge).count() as u8)
}
