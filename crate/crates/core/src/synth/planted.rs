use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Bundle, SynthError, STEP_HOURS};
use crate::features::monthly_precip_stats;
use crate::month::YearMonth;
use crate::seed;

/// Generating record for one gauge-month of a planted bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedRecord {
    pub gauge_id: String,
    pub month: YearMonth,
    /// `impervious_pct / 100 * previous month's precipitation total`; absent
    /// for the first month.
    pub z: Option<f64>,
    pub rule: bool,
    /// Probability of a flood given `z`, under the generator.
    pub posterior: f64,
    /// Planted flood occurrence.
    pub label: bool,
}

/// Flood months follow `z >= tau` with probability `strength`, otherwise an
/// independent coin with the bundle's positive rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSignal {
    pub strength: f64,
    pub positive_rate: f64,
    pub tau: f64,
    pub rule: String,
    pub records: Vec<PlantedRecord>,
}

impl PlantedSignal {
    pub fn record(&self, gauge_id: &str, month: YearMonth) -> Option<&PlantedRecord> {
        self.records
            .binary_search_by(|r| (r.gauge_id.as_str(), r.month).cmp(&(gauge_id, month)))
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn posterior(&self, gauge_id: &str, month: YearMonth) -> Option<f64> {
        self.record(gauge_id, month).map(|r| r.posterior)
    }
}

pub const RULE_TEXT: &str = "flood = [impervious_pct / 100 * precip_total(previous month) >= tau] \
with probability strength, else Bernoulli(positive_rate)";

/// Rebuilds `bundle` so that flood months follow a planted rule.
///
/// Flood months receive an extra runoff pulse that clears the minor
/// threshold; in other months the excess over baseflow is scaled below it.
/// Precipitation and attributes are unchanged. Peak-timing truth is dropped
/// because the pulses are not rain driven.
pub fn planted_signal(bundle: &Bundle, strength: f64) -> Result<Bundle, SynthError> {
    if !(0.0..=1.0).contains(&strength) {
        return Err(SynthError::InvalidParameter(format!(
            "signal strength {strength} outside [0, 1]"
        )));
    }
    let pi = bundle.config.target_positive_rate;
    let months = bundle.months();
    let mut rng = seed::rng(seed::derive_seed_str(bundle.seed, "planted"));

    let z: Vec<Vec<Option<f64>>> = bundle
        .basins
        .iter()
        .zip(&bundle.precip)
        .map(|(b, p)| {
            let imp = b.attributes.impervious_pct();
            std::iter::once(None)
                .chain(
                    months
                        .windows(2)
                        .map(|w| Some(imp / 100.0 * monthly_precip_stats(p, w[0]).total)),
                )
                .collect()
        })
        .collect();
    let mut all: Vec<f64> = z.iter().flatten().flatten().copied().collect();
    all.sort_by(|a, b| b.total_cmp(a));
    let n_pos = (pi * all.len() as f64).round() as usize;
    let tau = if n_pos == 0 { f64::INFINITY } else { all[n_pos - 1] };

    let mut out = bundle.clone();
    let mut records = Vec::with_capacity(z.len() * months.len());
    for (g, basin) in bundle.basins.iter().enumerate() {
        for (j, &month) in months.iter().enumerate() {
            let u_rule: f64 = rng.random();
            let u_coin: f64 = rng.random();
            let onset_u: f64 = rng.random();
            let zj = z[g][j];
            let rule = zj.is_some_and(|v| v >= tau);
            let (flood, posterior) = match zj {
                Some(_) if u_rule < strength => (rule, strength * f64::from(u8::from(rule)) + (1.0 - strength) * pi),
                Some(_) => (
                    u_coin < pi,
                    strength * f64::from(u8::from(rule)) + (1.0 - strength) * pi,
                ),
                None => (u_coin < pi, pi),
            };
            reshape_month(&mut out, g, month, flood, onset_u, basin.k);
            records.push(PlantedRecord {
                gauge_id: basin.gauge_id.clone(),
                month,
                z: zj,
                rule,
                posterior,
                label: flood,
            });
        }
    }
    out.refresh_from_clean()?;
    records.sort_by(|a, b| (&a.gauge_id, a.month).cmp(&(&b.gauge_id, b.month)));
    out.ttp_truth.clear();
    out.planted = Some(PlantedSignal {
        strength,
        positive_rate: pi,
        tau,
        rule: RULE_TEXT.to_string(),
        records,
    });
    Ok(out)
}

fn reshape_month(bundle: &mut Bundle, g: usize, month: YearMonth, flood: bool, onset_u: f64, k: f64) {
    let range = bundle.slot_range(month);
    let base = bundle.basins[g].baseflow;
    let minor = bundle.basins[g].minor;
    let clean = &mut bundle.clean[g][range.clone()];
    if flood {
        let peak_slots = (1.0 / k / STEP_HOURS).ceil() as usize;
        let latest = clean.len().saturating_sub(peak_slots + 8).max(1);
        let onset = ((onset_u * latest as f64) as usize).min(latest - 1);
        let height = 1.2 * (minor - base);
        for (i, v) in clean.iter_mut().enumerate().skip(onset) {
            let x = k * (i - onset) as f64 * STEP_HOURS;
            *v += height * x * (1.0 - x).exp();
        }
    } else {
        let top = clean.iter().copied().fold(base, f64::max);
        let cap = base + 0.9 * (minor - base);
        if top > cap {
            let c = (cap - base) / (top - base);
            for v in clean.iter_mut() {
                *v = base + (*v - base) * c;
            }
        }
    }
}
