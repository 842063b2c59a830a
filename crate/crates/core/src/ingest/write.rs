use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::types::{format_timestamp, BasinAttributes, DailyPrecip, FloodThresholds, ForecastRecord, StageSeries};
use super::{IngestError, FORECAST_HEADER, PRECIP_HEADER, STAGE_HEADER, THRESHOLDS_HEADER};

// `{}` on f64 prints the shortest representation that parses back to the
// same bits, so every writer below round-trips exactly.

fn with_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), IngestError> {
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| IngestError::io(path, e))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_stage_csv(path: impl AsRef<Path>, series: &[StageSeries]) -> Result<(), IngestError> {
    with_file(path.as_ref(), |w| {
        writeln!(w, "{STAGE_HEADER}")?;
        for s in series {
            for r in s.readings() {
                writeln!(w, "{},{},{}", s.gauge_id(), format_timestamp(&r.time), opt(r.stage))?;
            }
        }
        Ok(())
    })
}

pub fn write_thresholds_csv(path: impl AsRef<Path>, thresholds: &[FloodThresholds]) -> Result<(), IngestError> {
    with_file(path.as_ref(), |w| {
        writeln!(w, "{THRESHOLDS_HEADER}")?;
        for t in thresholds {
            writeln!(w, "{},{},{},{}", t.gauge_id, t.minor, opt(t.moderate), opt(t.major))?;
        }
        Ok(())
    })
}

pub fn write_precip_csv(path: impl AsRef<Path>, precip: &[DailyPrecip]) -> Result<(), IngestError> {
    with_file(path.as_ref(), |w| {
        writeln!(w, "{PRECIP_HEADER}")?;
        for p in precip {
            for r in p.records() {
                writeln!(w, "{},{},{}", p.gauge_id(), r.date.format("%Y-%m-%d"), r.precip_mm)?;
            }
        }
        Ok(())
    })
}

pub fn write_attributes_csv(path: impl AsRef<Path>, attributes: &[BasinAttributes]) -> Result<(), IngestError> {
    let Some(first) = attributes.first() else {
        return with_file(path.as_ref(), |w| {
            writeln!(w, "gauge_id,{}", super::REQUIRED_ATTRIBUTES.join(","))
        });
    };
    let names: Vec<&String> = first.values.keys().collect();
    if attributes
        .iter()
        .any(|a| a.values.len() != names.len() || !a.values.keys().zip(&names).all(|(k, n)| k == *n))
    {
        return Err(IngestError::InconsistentColumns);
    }
    with_file(path.as_ref(), |w| {
        write!(w, "gauge_id")?;
        for n in &names {
            write!(w, ",{n}")?;
        }
        writeln!(w)?;
        for a in attributes {
            write!(w, "{}", a.gauge_id)?;
            for v in a.values.values() {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    })
}

pub fn write_forecast_csv(path: impl AsRef<Path>, forecasts: &[ForecastRecord]) -> Result<(), IngestError> {
    with_file(path.as_ref(), |w| {
        writeln!(w, "{FORECAST_HEADER}")?;
        for f in forecasts {
            writeln!(
                w,
                "{},{},{},{}",
                f.gauge_id,
                format_timestamp(&f.issued_at),
                format_timestamp(&f.valid_at),
                f.forecast_stage
            )?;
        }
        Ok(())
    })
}
