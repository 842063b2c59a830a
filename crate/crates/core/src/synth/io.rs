use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{Bundle, FloodTruth, PlantedRecord, SynthError, TtpTruth};
use crate::ingest::{
    format_timestamp, parse_timestamp, write_attributes_csv, write_forecast_csv, write_precip_csv, write_stage_csv,
    write_thresholds_csv,
};

/// File names written by [`write_bundle`]; the two planted files only for
/// planted bundles.
pub const BUNDLE_FILES: [&str; 9] = [
    "stage.csv",
    "thresholds.csv",
    "precip.csv",
    "attributes.csv",
    "forecasts.csv",
    "ground_truth.csv",
    "ground_truth_ttp.csv",
    "planted_signal.json",
    "planted_signal.csv",
];

fn io_err(path: &Path, source: std::io::Error) -> SynthError {
    SynthError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_lines(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<(), SynthError> {
    let f = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(f);
    let go = || -> std::io::Result<()> {
        writeln!(w, "{header}")?;
        for r in rows {
            writeln!(w, "{r}")?;
        }
        w.flush()
    };
    go().map_err(|e| io_err(path, e))
}

pub fn write_bundle(bundle: &Bundle, dir: impl AsRef<Path>) -> Result<(), SynthError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    write_stage_csv(dir.join("stage.csv"), &bundle.series)?;
    write_thresholds_csv(dir.join("thresholds.csv"), &bundle.thresholds)?;
    write_precip_csv(dir.join("precip.csv"), &bundle.precip)?;
    write_attributes_csv(dir.join("attributes.csv"), &bundle.attributes)?;
    write_forecast_csv(dir.join("forecasts.csv"), &bundle.forecasts)?;
    write_lines(
        &dir.join("ground_truth.csv"),
        "gauge_id,month,true_flood",
        bundle
            .flood_truth
            .iter()
            .map(|t| format!("{},{},{}", t.gauge_id, t.month, u8::from(t.true_flood))),
    )?;
    write_lines(
        &dir.join("ground_truth_ttp.csv"),
        "gauge_id,event_start,true_ttp_hours",
        bundle.ttp_truth.iter().map(|t| {
            format!(
                "{},{},{}",
                t.gauge_id,
                format_timestamp(&t.event_start),
                t.true_ttp_hours
            )
        }),
    )?;
    if let Some(sig) = &bundle.planted {
        let path = dir.join("planted_signal.json");
        let meta = serde_json::json!({
            "strength": sig.strength,
            "positive_rate": sig.positive_rate,
            "tau": if sig.tau.is_finite() { serde_json::json!(sig.tau) } else { serde_json::Value::Null },
            "rule": sig.rule,
        });
        let text = serde_json::to_string_pretty(&meta).expect("json value");
        fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
        write_lines(
            &dir.join("planted_signal.csv"),
            "gauge_id,month,z,rule,posterior,label",
            sig.records.iter().map(|r| {
                let z = r.z.map(|v| v.to_string()).unwrap_or_default();
                format!(
                    "{},{},{},{},{},{}",
                    r.gauge_id,
                    r.month,
                    z,
                    u8::from(r.rule),
                    r.posterior,
                    u8::from(r.label)
                )
            }),
        )?;
    }
    Ok(())
}

fn read_rows(path: &Path, header: &str) -> Result<Vec<Vec<String>>, SynthError> {
    let width = header.split(',').count();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let bad = |reason: String| SynthError::Format {
        path: path.display().to_string(),
        reason,
    };
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(bad(format!("expected header {header:?}")));
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let f: Vec<String> = l.split(',').map(str::to_string).collect();
            if f.len() == width {
                Ok(f)
            } else {
                Err(bad(format!("line {}: expected {width} fields", i + 2)))
            }
        })
        .collect()
}

pub fn read_flood_truth(path: impl AsRef<Path>) -> Result<Vec<FloodTruth>, SynthError> {
    let path = path.as_ref();
    let bad = |reason: String| SynthError::Format {
        path: path.display().to_string(),
        reason,
    };
    read_rows(path, "gauge_id,month,true_flood")?
        .into_iter()
        .map(|f| {
            Ok(FloodTruth {
                month: f[1].parse().map_err(|e| bad(format!("{e}")))?,
                true_flood: match f[2].as_str() {
                    "1" => true,
                    "0" => false,
                    other => return Err(bad(format!("true_flood {other:?}"))),
                },
                gauge_id: f[0].clone(),
            })
        })
        .collect()
}

pub fn read_ttp_truth(path: impl AsRef<Path>) -> Result<Vec<TtpTruth>, SynthError> {
    let path = path.as_ref();
    let bad = |reason: String| SynthError::Format {
        path: path.display().to_string(),
        reason,
    };
    read_rows(path, "gauge_id,event_start,true_ttp_hours")?
        .into_iter()
        .map(|f| {
            Ok(TtpTruth {
                event_start: parse_timestamp(&f[1]).ok_or_else(|| bad(format!("timestamp {:?}", f[1])))?,
                true_ttp_hours: f[2].parse().map_err(|e| bad(format!("{e}")))?,
                gauge_id: f[0].clone(),
            })
        })
        .collect()
}

/// Reads `planted_signal.csv` back into records.
pub fn read_planted_records(path: impl AsRef<Path>) -> Result<Vec<PlantedRecord>, SynthError> {
    let path = path.as_ref();
    let bad = |reason: String| SynthError::Format {
        path: path.display().to_string(),
        reason,
    };
    let flag = |v: &str| match v {
        "1" => Ok(true),
        "0" => Ok(false),
        other => Err(bad(format!("expected 0 or 1, got {other:?}"))),
    };
    read_rows(path, "gauge_id,month,z,rule,posterior,label")?
        .into_iter()
        .map(|f| {
            Ok(PlantedRecord {
                month: f[1].parse().map_err(|e| bad(format!("{e}")))?,
                z: match f[2].as_str() {
                    "" => None,
                    v => Some(v.parse().map_err(|e| bad(format!("{e}")))?),
                },
                rule: flag(&f[3])?,
                posterior: f[4].parse().map_err(|e| bad(format!("{e}")))?,
                label: flag(&f[5])?,
                gauge_id: f[0].clone(),
            })
        })
        .collect()
}
