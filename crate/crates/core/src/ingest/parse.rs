use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use indexmap::IndexMap;

use super::types::{
    parse_date, parse_timestamp, valid_gauge_id, BasinAttributes, DailyPrecip, DailyTotal, FloodThresholds,
    ForecastRecord, Reading, StageSeries,
};
use super::{IngestError, FORECAST_HEADER, PRECIP_HEADER, STAGE_HEADER, THRESHOLDS_HEADER};

/// How row-level problems are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Abort on the first malformed row.
    #[default]
    Strict,
    /// Skip malformed rows, counting them in the report.
    Lenient,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParseReport {
    pub rows: usize,
    pub skipped: usize,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub items: Vec<T>,
    pub report: ParseReport,
}

struct Rows<R: Read> {
    reader: csv::Reader<R>,
    record: csv::StringRecord,
}

impl<R: Read> Rows<R> {
    fn open(source: R) -> Self {
        let reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(source);
        Self {
            reader,
            record: csv::StringRecord::new(),
        }
    }

    fn header(&mut self) -> Result<Vec<String>, IngestError> {
        if !self.next_row()? {
            return Err(IngestError::MissingHeader {
                expected: String::new(),
                found: String::new(),
            });
        }
        Ok(self.record.iter().map(str::to_string).collect())
    }

    fn expect_header(&mut self, expected: &str) -> Result<(), IngestError> {
        let found = self.header().map_err(|_| IngestError::MissingHeader {
            expected: expected.into(),
            found: String::new(),
        })?;
        let found = found.join(",");
        if found != expected {
            return Err(IngestError::MissingHeader {
                expected: expected.into(),
                found,
            });
        }
        Ok(())
    }

    fn next_row(&mut self) -> Result<bool, IngestError> {
        self.reader
            .read_record(&mut self.record)
            .map_err(|e| IngestError::Csv(e.to_string()))
    }

    fn line(&self) -> u64 {
        self.record.position().map_or(0, |p| p.line())
    }
}

struct Collector {
    strictness: Strictness,
    report: ParseReport,
}

impl Collector {
    fn new(strictness: Strictness) -> Self {
        Self {
            strictness,
            report: ParseReport::default(),
        }
    }

    /// Routes a row-level error: fatal when strict, counted when lenient.
    fn reject(&mut self, err: IngestError) -> Result<(), IngestError> {
        match self.strictness {
            Strictness::Strict => Err(err),
            Strictness::Lenient => {
                self.report.skipped += 1;
                self.report.diagnostics.push(err.to_string());
                Ok(())
            }
        }
    }
}

fn unparseable(line: u64, reason: impl Into<String>) -> IngestError {
    IngestError::UnparseableRow {
        line,
        reason: reason.into(),
    }
}

fn field_count(rec: &csv::StringRecord, n: usize, line: u64) -> Result<(), IngestError> {
    if rec.len() != n {
        return Err(unparseable(line, format!("expected {n} fields, found {}", rec.len())));
    }
    Ok(())
}

fn gauge_field(s: &str, line: u64) -> Result<String, IngestError> {
    if valid_gauge_id(s) {
        Ok(s.to_string())
    } else {
        Err(unparseable(line, format!("invalid gauge id `{s}`")))
    }
}

fn number(s: &str, column: &str, line: u64) -> Result<f64, IngestError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(unparseable(line, format!("`{column}`: cannot parse `{s}` as a number"))),
    }
}

fn timestamp(s: &str, column: &str, line: u64) -> Result<chrono::DateTime<chrono::Utc>, IngestError> {
    parse_timestamp(s).ok_or_else(|| unparseable(line, format!("`{column}`: bad timestamp `{s}`")))
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|e| IngestError::io(path, e))
}

pub fn parse_stage_csv(path: impl AsRef<Path>, strictness: Strictness) -> Result<Parsed<StageSeries>, IngestError> {
    read_stage_csv(open(path.as_ref())?, strictness)
}

pub fn read_stage_csv<R: Read>(source: R, strictness: Strictness) -> Result<Parsed<StageSeries>, IngestError> {
    let mut rows = Rows::open(source);
    rows.expect_header(STAGE_HEADER)?;
    let mut out = Collector::new(strictness);
    let mut groups: BTreeMap<String, Vec<Reading>> = BTreeMap::new();
    while rows.next_row()? {
        out.report.rows += 1;
        let line = rows.line();
        let rec = &rows.record;
        let parsed = (|| {
            field_count(rec, 3, line)?;
            let gauge = gauge_field(&rec[0], line)?;
            let time = timestamp(&rec[1], "timestamp", line)?;
            let stage = if rec[2].is_empty() {
                None
            } else {
                let v = number(&rec[2], "stage_ft", line)?;
                if v < 0.0 {
                    return Err(unparseable(line, "`stage_ft` is negative"));
                }
                Some(v)
            };
            Ok((gauge, Reading { time, stage }))
        })();
        let (gauge, reading) = match parsed {
            Ok(v) => v,
            Err(e) => {
                out.reject(e)?;
                continue;
            }
        };
        let series = groups.entry(gauge.clone()).or_default();
        if strictness == Strictness::Strict {
            if let Some(last) = series.last() {
                if reading.time <= last.time {
                    return Err(IngestError::NonMonotonicTimestamp { gauge_id: gauge, line });
                }
            }
        }
        series.push(reading);
    }
    let mut items = Vec::with_capacity(groups.len());
    for (gauge, mut readings) in groups {
        if strictness == Strictness::Lenient {
            readings.sort_by_key(|r| r.time);
            let before = readings.len();
            readings.dedup_by_key(|r| r.time);
            let dropped = before - readings.len();
            if dropped > 0 {
                out.report.skipped += dropped;
                out.report
                    .diagnostics
                    .push(format!("gauge {gauge}: dropped {dropped} duplicate timestamps"));
            }
        }
        items.push(StageSeries::new(gauge, readings)?);
    }
    Ok(Parsed {
        items,
        report: out.report,
    })
}

pub fn parse_thresholds_csv(path: impl AsRef<Path>) -> Result<Vec<FloodThresholds>, IngestError> {
    read_thresholds_csv(open(path.as_ref())?)
}

pub fn read_thresholds_csv<R: Read>(source: R) -> Result<Vec<FloodThresholds>, IngestError> {
    let mut rows = Rows::open(source);
    rows.expect_header(THRESHOLDS_HEADER)?;
    let mut by_gauge: BTreeMap<String, FloodThresholds> = BTreeMap::new();
    while rows.next_row()? {
        let line = rows.line();
        let rec = &rows.record;
        field_count(rec, 4, line)?;
        let gauge = gauge_field(&rec[0], line)?;
        let optional = |i: usize, col: &str| -> Result<Option<f64>, IngestError> {
            if rec[i].is_empty() {
                Ok(None)
            } else {
                number(&rec[i], col, line).map(Some)
            }
        };
        let minor = if rec[1].is_empty() {
            return Err(IngestError::NonPositiveMinor { gauge_id: gauge });
        } else {
            number(&rec[1], "minor_ft", line)?
        };
        let t = FloodThresholds::new(
            gauge.clone(),
            minor,
            optional(2, "moderate_ft")?,
            optional(3, "major_ft")?,
        )?;
        match by_gauge.entry(gauge) {
            Entry::Occupied(e) => {
                return Err(IngestError::DuplicateGauge {
                    gauge_id: e.key().clone(),
                })
            }
            Entry::Vacant(e) => {
                e.insert(t);
            }
        }
    }
    Ok(by_gauge.into_values().collect())
}

pub fn parse_precip_csv(path: impl AsRef<Path>, strictness: Strictness) -> Result<Parsed<DailyPrecip>, IngestError> {
    read_precip_csv(open(path.as_ref())?, strictness)
}

pub fn read_precip_csv<R: Read>(source: R, strictness: Strictness) -> Result<Parsed<DailyPrecip>, IngestError> {
    let mut rows = Rows::open(source);
    rows.expect_header(PRECIP_HEADER)?;
    let mut out = Collector::new(strictness);
    let mut groups: BTreeMap<String, Vec<DailyTotal>> = BTreeMap::new();
    while rows.next_row()? {
        out.report.rows += 1;
        let line = rows.line();
        let rec = &rows.record;
        let parsed = (|| {
            field_count(rec, 3, line)?;
            let gauge = gauge_field(&rec[0], line)?;
            let date = parse_date(&rec[1]).ok_or_else(|| unparseable(line, format!("bad date `{}`", &rec[1])))?;
            let precip_mm = number(&rec[2], "precip_mm", line)?;
            if precip_mm < 0.0 {
                return Err(unparseable(line, "`precip_mm` is negative"));
            }
            Ok((gauge, DailyTotal { date, precip_mm }))
        })();
        let (gauge, total) = match parsed {
            Ok(v) => v,
            Err(e) => {
                out.reject(e)?;
                continue;
            }
        };
        let records = groups.entry(gauge.clone()).or_default();
        if strictness == Strictness::Strict {
            if let Some(last) = records.last() {
                if total.date <= last.date {
                    return Err(IngestError::NonMonotonicTimestamp { gauge_id: gauge, line });
                }
            }
        }
        records.push(total);
    }
    let mut items = Vec::with_capacity(groups.len());
    for (gauge, mut records) in groups {
        if strictness == Strictness::Lenient {
            records.sort_by_key(|r| r.date);
            let before = records.len();
            records.dedup_by_key(|r| r.date);
            let dropped = before - records.len();
            if dropped > 0 {
                out.report.skipped += dropped;
                out.report
                    .diagnostics
                    .push(format!("gauge {gauge}: dropped {dropped} duplicate dates"));
            }
        }
        items.push(DailyPrecip::new(gauge, records)?);
    }
    Ok(Parsed {
        items,
        report: out.report,
    })
}

pub fn parse_attributes_csv(
    path: impl AsRef<Path>,
    strictness: Strictness,
) -> Result<Parsed<BasinAttributes>, IngestError> {
    read_attributes_csv(open(path.as_ref())?, strictness)
}

pub fn read_attributes_csv<R: Read>(source: R, strictness: Strictness) -> Result<Parsed<BasinAttributes>, IngestError> {
    let mut rows = Rows::open(source);
    let header = rows.header()?;
    if header.first().map(String::as_str) != Some("gauge_id") {
        return Err(IngestError::MissingHeader {
            expected: "gauge_id,<attr1>,<attr2>,...".into(),
            found: header.join(","),
        });
    }
    let columns = &header[1..];
    for (i, c) in columns.iter().enumerate() {
        if c.is_empty() || columns[..i].contains(c) {
            return Err(IngestError::DuplicateColumn { column: c.clone() });
        }
    }
    for required in super::REQUIRED_ATTRIBUTES {
        if !columns.iter().any(|c| c == required) {
            return Err(IngestError::MissingColumn {
                column: required.into(),
            });
        }
    }
    let mut out = Collector::new(strictness);
    let mut by_gauge: BTreeMap<String, BasinAttributes> = BTreeMap::new();
    while rows.next_row()? {
        out.report.rows += 1;
        let line = rows.line();
        let rec = &rows.record;
        let parsed = (|| {
            field_count(rec, header.len(), line)?;
            let gauge = gauge_field(&rec[0], line)?;
            let mut values = IndexMap::with_capacity(columns.len());
            for (i, col) in columns.iter().enumerate() {
                let cell = &rec[i + 1];
                if cell.is_empty() {
                    return Err(IngestError::MissingAttribute {
                        gauge_id: gauge,
                        column: col.clone(),
                        line,
                    });
                }
                values.insert(col.clone(), number(cell, col, line)?);
            }
            let attrs = BasinAttributes::new(gauge.clone(), values)?;
            if by_gauge.contains_key(&gauge) {
                return Err(IngestError::DuplicateGauge { gauge_id: gauge });
            }
            Ok(attrs)
        })();
        match parsed {
            Ok(a) => {
                by_gauge.insert(a.gauge_id.clone(), a);
            }
            Err(e) => out.reject(e)?,
        }
    }
    Ok(Parsed {
        items: by_gauge.into_values().collect(),
        report: out.report,
    })
}

pub fn parse_forecast_csv(
    path: impl AsRef<Path>,
    strictness: Strictness,
) -> Result<Parsed<ForecastRecord>, IngestError> {
    read_forecast_csv(open(path.as_ref())?, strictness)
}

pub fn read_forecast_csv<R: Read>(source: R, strictness: Strictness) -> Result<Parsed<ForecastRecord>, IngestError> {
    let mut rows = Rows::open(source);
    rows.expect_header(FORECAST_HEADER)?;
    let mut out = Collector::new(strictness);
    let mut items = Vec::new();
    while rows.next_row()? {
        out.report.rows += 1;
        let line = rows.line();
        let rec = &rows.record;
        let parsed = (|| {
            field_count(rec, 4, line)?;
            let gauge_id = gauge_field(&rec[0], line)?;
            let issued_at = timestamp(&rec[1], "issued_at", line)?;
            let valid_at = timestamp(&rec[2], "valid_at", line)?;
            let forecast_stage = number(&rec[3], "forecast_stage_ft", line)?;
            let r = ForecastRecord {
                gauge_id,
                issued_at,
                valid_at,
                forecast_stage,
            };
            if valid_at < issued_at {
                return Err(unparseable(line, "`valid_at` precedes `issued_at`"));
            }
            if !r.horizon_ok() {
                return Err(IngestError::HorizonExceeded {
                    gauge_id: r.gauge_id,
                    line,
                });
            }
            Ok(r)
        })();
        match parsed {
            Ok(r) => items.push(r),
            Err(e) => out.reject(e)?,
        }
    }
    Ok(Parsed {
        items,
        report: out.report,
    })
}
