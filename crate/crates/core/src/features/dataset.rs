use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::ingest::{format_timestamp, parse_timestamp};
use crate::models::Matrix;
use crate::month::YearMonth;
use crate::scalar::Scalar;

/// What an example describes: a calendar month or a precipitation event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExampleKey {
    Month(YearMonth),
    Event(DateTime<Utc>),
}

impl ExampleKey {
    pub fn month(&self) -> YearMonth {
        match self {
            ExampleKey::Month(m) => *m,
            ExampleKey::Event(t) => YearMonth::of(t),
        }
    }
}

impl fmt::Display for ExampleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleKey::Month(m) => write!(f, "{m}"),
            ExampleKey::Event(t) => f.write_str(&format_timestamp(t)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example<F> {
    pub gauge_id: String,
    pub key: ExampleKey,
    pub features: Vec<F>,
    pub label: u8,
    /// Time-to-peak bin for event examples.
    pub bin: Option<u8>,
}

/// Dense examples sharing one ordered list of feature names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset<F> {
    pub feature_names: Vec<String>,
    pub examples: Vec<Example<F>>,
}

impl<F: Scalar> Dataset<F> {
    pub fn new(feature_names: Vec<String>, examples: Vec<Example<F>>) -> Result<Self, FeatureError> {
        let d = feature_names.len();
        if let Some(e) = examples.iter().find(|e| e.features.len() != d) {
            return Err(FeatureError::DimensionMismatch {
                expected: d,
                found: e.features.len(),
            });
        }
        Ok(Self {
            feature_names,
            examples,
        })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.examples.iter().map(|e| e.label).collect()
    }

    pub fn gauges(&self) -> BTreeSet<&str> {
        self.examples.iter().map(|e| e.gauge_id.as_str()).collect()
    }

    pub fn to_matrix(&self) -> Matrix<F> {
        Matrix::from_rows(self.n_features(), self.examples.iter().map(|e| e.features.as_slice()))
    }

    /// Examples whose gauge satisfies `keep`, in original order.
    pub fn filter_gauges(&self, keep: impl Fn(&str) -> bool) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            examples: self.examples.iter().filter(|e| keep(&e.gauge_id)).cloned().collect(),
        }
    }

    pub fn cast<G: Scalar>(&self) -> Dataset<G> {
        Dataset {
            feature_names: self.feature_names.clone(),
            examples: self
                .examples
                .iter()
                .map(|e| Example {
                    gauge_id: e.gauge_id.clone(),
                    key: e.key,
                    features: e.features.iter().map(|&x| G::lit(x.as_f64())).collect(),
                    label: e.label,
                    bin: e.bin,
                })
                .collect(),
        }
    }
}

/// Fraction of examples labelled 1; 0 for an empty collection.
pub fn class_balance<F>(examples: &[Example<F>]) -> f64 {
    if examples.is_empty() {
        return 0.0;
    }
    examples.iter().filter(|e| e.label == 1).count() as f64 / examples.len() as f64
}

/// Writes `gauge_id,month,label,<feature...>`; event examples carry their
/// onset timestamp in the `month` column.
pub fn write_dataset_csv(path: impl AsRef<Path>, data: &Dataset<f64>) -> Result<(), FeatureError> {
    let path = path.as_ref();
    let io = |e| FeatureError::Io {
        path: path.into(),
        source: e,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    (|| {
        write!(w, "gauge_id,month,label")?;
        for n in &data.feature_names {
            write!(w, ",{n}")?;
        }
        writeln!(w)?;
        for e in &data.examples {
            write!(w, "{},{},{}", e.gauge_id, e.key, e.label)?;
            for v in &e.features {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    })()
    .map_err(io)
}

pub fn read_dataset_csv(path: impl AsRef<Path>) -> Result<Dataset<f64>, FeatureError> {
    let path = path.as_ref();
    let io = |e| FeatureError::Io {
        path: path.into(),
        source: e,
    };
    let mut lines = BufReader::new(File::open(path).map_err(io)?).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(io)?
        .ok_or_else(|| FeatureError::Format("missing header".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[..3] != ["gauge_id", "month", "label"] {
        return Err(FeatureError::Format(format!("bad header `{header}`")));
    }
    let names: Vec<String> = cols[3..].iter().map(|s| s.to_string()).collect();
    let mut examples = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(io)?;
        let bad = |what: &str| FeatureError::Format(format!("line {}: {what}", i + 2));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != names.len() + 3 {
            return Err(bad("wrong field count"));
        }
        let key = if let Ok(m) = f[1].parse::<YearMonth>() {
            ExampleKey::Month(m)
        } else {
            ExampleKey::Event(parse_timestamp(f[1]).ok_or_else(|| bad("bad month/timestamp"))?)
        };
        let label = match f[2] {
            "0" => 0,
            "1" => 1,
            _ => return Err(bad("label must be 0 or 1")),
        };
        let features = f[3..]
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| bad("bad number")))
            .collect::<Result<_, _>>()?;
        examples.push(Example {
            gauge_id: f[0].to_string(),
            key,
            features,
            label,
            bin: None,
        });
    }
    Dataset::new(names, examples)
}
