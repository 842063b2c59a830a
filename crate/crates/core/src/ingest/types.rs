use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::IngestError;

/// Nominal spacing of stage readings.
pub const CADENCE_SECONDS: i64 = 15 * 60;
pub const MAX_FORECAST_HORIZON_HOURS: i64 = 72;
pub const REQUIRED_ATTRIBUTES: [&str; 3] = ["impervious_pct", "elevation_m", "characteristic_length"];

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT)
        .ok()
        .map(|t| t.and_utc())
}

pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.format(TIMESTAMP_FORMAT).to_string()
}

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

pub(crate) fn valid_gauge_id(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reading {
    pub time: DateTime<Utc>,
    /// `None` marks a missing reading; zero is a valid stage.
    pub stage: Option<f64>,
}

impl Reading {
    pub fn new(time: DateTime<Utc>, stage: f64) -> Self {
        Self {
            time,
            stage: Some(stage),
        }
    }

    pub fn missing(time: DateTime<Utc>) -> Self {
        Self { time, stage: None }
    }
}

/// A stretch longer than the nominal cadence with no reading row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gap {
    pub after: DateTime<Utc>,
    pub before: DateTime<Utc>,
    pub missing_slots: i64,
}

/// Stage readings for one gauge, strictly increasing in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSeries {
    gauge_id: String,
    readings: Vec<Reading>,
}

impl StageSeries {
    pub fn new(gauge_id: impl Into<String>, readings: Vec<Reading>) -> Result<Self, IngestError> {
        let gauge_id = gauge_id.into();
        if let Some(i) = readings.windows(2).position(|w| w[1].time <= w[0].time) {
            return Err(IngestError::NonMonotonicTimestamp {
                gauge_id,
                line: i as u64 + 1,
            });
        }
        for r in &readings {
            if let Some(s) = r.stage {
                if !(s.is_finite() && s >= 0.0) {
                    return Err(IngestError::OutOfRange {
                        gauge_id,
                        column: "stage_ft".into(),
                        value: s,
                    });
                }
            }
        }
        Ok(Self { gauge_id, readings })
    }

    pub fn gauge_id(&self) -> &str {
        &self.gauge_id
    }

    pub fn readings(&self) -> &[Reading] {
        &self.readings
    }

    pub fn len(&self) -> usize {
        self.readings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }

    /// Readings with `from <= time < to`.
    pub fn between(&self, from: DateTime<Utc>, to: DateTime<Utc>) -> &[Reading] {
        let lo = self.readings.partition_point(|r| r.time < from);
        let hi = self.readings.partition_point(|r| r.time < to);
        &self.readings[lo..hi.max(lo)]
    }

    pub fn first_time(&self) -> Option<DateTime<Utc>> {
        self.readings.first().map(|r| r.time)
    }

    pub fn last_time(&self) -> Option<DateTime<Utc>> {
        self.readings.last().map(|r| r.time)
    }

    pub fn missing_count(&self) -> usize {
        self.readings.iter().filter(|r| r.stage.is_none()).count()
    }

    /// Spans between consecutive rows wider than the 15-minute cadence.
    pub fn gaps(&self) -> Vec<Gap> {
        self.readings
            .windows(2)
            .filter_map(|w| {
                let dt = (w[1].time - w[0].time).num_seconds();
                (dt > CADENCE_SECONDS).then(|| Gap {
                    after: w[0].time,
                    before: w[1].time,
                    missing_slots: dt / CADENCE_SECONDS - 1 + i64::from(dt % CADENCE_SECONDS != 0),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloodThresholds {
    pub gauge_id: String,
    pub minor: f64,
    pub moderate: Option<f64>,
    pub major: Option<f64>,
}

impl FloodThresholds {
    pub fn new(
        gauge_id: impl Into<String>,
        minor: f64,
        moderate: Option<f64>,
        major: Option<f64>,
    ) -> Result<Self, IngestError> {
        let gauge_id = gauge_id.into();
        if !(minor > 0.0) || !minor.is_finite() {
            return Err(IngestError::NonPositiveMinor { gauge_id });
        }
        let mut last = minor;
        for v in [moderate, major].into_iter().flatten() {
            if !v.is_finite() || v < last {
                return Err(IngestError::ThresholdOrderViolation { gauge_id });
            }
            last = v;
        }
        Ok(Self {
            gauge_id,
            minor,
            moderate,
            major,
        })
    }

    pub fn minor_only(gauge_id: impl Into<String>, minor: f64) -> Result<Self, IngestError> {
        Self::new(gauge_id, minor, None, None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyTotal {
    pub date: NaiveDate,
    pub precip_mm: f64,
}

/// Daily precipitation totals for one gauge, strictly increasing in date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyPrecip {
    gauge_id: String,
    records: Vec<DailyTotal>,
}

impl DailyPrecip {
    pub fn new(gauge_id: impl Into<String>, records: Vec<DailyTotal>) -> Result<Self, IngestError> {
        let gauge_id = gauge_id.into();
        if let Some(i) = records.windows(2).position(|w| w[1].date <= w[0].date) {
            return Err(IngestError::NonMonotonicTimestamp {
                gauge_id,
                line: i as u64 + 1,
            });
        }
        if let Some(r) = records
            .iter()
            .find(|r| !(r.precip_mm >= 0.0 && r.precip_mm.is_finite()))
        {
            return Err(IngestError::OutOfRange {
                gauge_id,
                column: "precip_mm".into(),
                value: r.precip_mm,
            });
        }
        Ok(Self { gauge_id, records })
    }

    /// Builds a record from consecutive daily values starting at `first`.
    pub fn from_daily(gauge_id: impl Into<String>, first: NaiveDate, values: &[f64]) -> Result<Self, IngestError> {
        let records = first
            .iter_days()
            .zip(values)
            .map(|(date, &precip_mm)| DailyTotal { date, precip_mm })
            .collect();
        Self::new(gauge_id, records)
    }

    pub fn gauge_id(&self) -> &str {
        &self.gauge_id
    }

    pub fn records(&self) -> &[DailyTotal] {
        &self.records
    }

    /// Records with `from <= date < to`.
    pub fn between(&self, from: NaiveDate, to: NaiveDate) -> &[DailyTotal] {
        let lo = self.records.partition_point(|r| r.date < from);
        let hi = self.records.partition_point(|r| r.date < to);
        &self.records[lo..hi.max(lo)]
    }
}

/// Static attributes of the basin upstream of a gauge. Column order is kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinAttributes {
    pub gauge_id: String,
    pub values: IndexMap<String, f64>,
}

impl BasinAttributes {
    pub fn new(gauge_id: impl Into<String>, values: IndexMap<String, f64>) -> Result<Self, IngestError> {
        let gauge_id = gauge_id.into();
        for col in REQUIRED_ATTRIBUTES {
            if !values.contains_key(col) {
                return Err(IngestError::MissingColumn {
                    column: col.to_string(),
                });
            }
        }
        for (k, &v) in &values {
            if !v.is_finite() {
                return Err(IngestError::OutOfRange {
                    gauge_id,
                    column: k.clone(),
                    value: v,
                });
            }
        }
        let imp = values["impervious_pct"];
        if !(0.0..=100.0).contains(&imp) {
            return Err(IngestError::OutOfRange {
                gauge_id,
                column: "impervious_pct".into(),
                value: imp,
            });
        }
        Ok(Self { gauge_id, values })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn impervious_pct(&self) -> f64 {
        self.values["impervious_pct"]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub gauge_id: String,
    pub issued_at: DateTime<Utc>,
    pub valid_at: DateTime<Utc>,
    pub forecast_stage: f64,
}

impl ForecastRecord {
    pub fn lead_hours(&self) -> f64 {
        (self.valid_at - self.issued_at).num_seconds() as f64 / 3600.0
    }

    pub(crate) fn horizon_ok(&self) -> bool {
        let lead = (self.valid_at - self.issued_at).num_seconds();
        (0..=MAX_FORECAST_HORIZON_HOURS * 3600).contains(&lead)
    }
}
