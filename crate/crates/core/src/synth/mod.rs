//! Synthetic basins with known ground truth.
//!
//! Each basin turns daily rain into 15-minute stage through a two-store
//! linear reservoir. Rain on a wet day arrives as one burst at a random
//! quarter hour; dry days are rain-free. Thresholds are calibrated so the
//! share of flooded gauge-months approaches a target rate.

mod io;
mod planted;
mod reservoir;

use chrono::{Datelike, NaiveDate};
use indexmap::IndexMap;
use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{read_flood_truth, read_planted_records, read_ttp_truth, write_bundle, BUNDLE_FILES};
pub use planted::{planted_signal, PlantedRecord, PlantedSignal};
pub use reservoir::{advance, continuous_argmax, impulse_response, simulate, ImpulseResponse, STEP_HOURS};

use crate::hydrology::{detect_precip_events, HydrologyConfig};
use crate::ingest::{BasinAttributes, DailyPrecip, FloodThresholds, ForecastRecord, IngestError, Reading, StageSeries};
use crate::month::{YearMonth, SLOTS_PER_DAY};
use crate::seed;
use reservoir::{round_to, slot_time};

pub const MIN_GAUGES: usize = 5;
pub const MIN_MONTHS: usize = 2;
const CALIBRATION_ITERATIONS: usize = 50;
const REFERENCE_QUANTILE: f64 = 0.99;
const FORECAST_LEADS_HOURS: std::ops::RangeInclusive<usize> = 1..=12;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("need at least {MIN_GAUGES} gauges, got {0}")]
    TooFewGauges(usize),
    #[error("need at least {MIN_MONTHS} months, got {0}")]
    TooFewMonths(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot reach positive rate {target} (closest {achieved})")]
    InfeasibleRate { target: f64, achieved: f64 },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Hydrology(#[from] crate::hydrology::HydrologyError),
    #[error("i/o error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Format { path: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_gauges: usize,
    pub n_months: usize,
    pub start: YearMonth,
    /// Desired share of flooded gauge-months; 0 disables floods.
    pub target_positive_rate: f64,
    /// Mean probability that a day is wet, modulated by season.
    pub wet_day_prob: f64,
    /// Log-scale mean and deviation of wet-day depth in millimetres.
    pub rain_log_mean: f64,
    pub rain_log_sd: f64,
    /// Probability that a reading is dropped.
    pub missing_rate: f64,
    pub forecasts: bool,
    /// Forecast error standard deviation per day of lead, in feet.
    pub forecast_noise_ft: f64,
}

impl SynthConfig {
    pub fn new(n_gauges: usize, n_months: usize, target_positive_rate: f64) -> Self {
        Self {
            n_gauges,
            n_months,
            target_positive_rate,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_gauges < MIN_GAUGES {
            return Err(SynthError::TooFewGauges(self.n_gauges));
        }
        if self.n_months < MIN_MONTHS {
            return Err(SynthError::TooFewMonths(self.n_months));
        }
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.target_positive_rate) || !unit(self.wet_day_prob) || !unit(self.missing_rate) {
            return Err(SynthError::InvalidParameter(
                "rates and probabilities must lie in [0, 1]".into(),
            ));
        }
        if !(self.rain_log_sd > 0.0) || !self.rain_log_mean.is_finite() || !(self.forecast_noise_ft >= 0.0) {
            return Err(SynthError::InvalidParameter(
                "rain and forecast noise parameters".into(),
            ));
        }
        Ok(())
    }
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_gauges: 50,
            n_months: 24,
            start: YearMonth::new(2015, 1).expect("valid month"),
            target_positive_rate: 0.055,
            wet_day_prob: 0.25,
            rain_log_mean: 1.6,
            rain_log_sd: 1.0,
            missing_rate: 0.01,
            forecasts: true,
            forecast_noise_ft: 0.1,
        }
    }
}

/// Hidden parameters of one generated basin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticBasin {
    pub gauge_id: String,
    /// Drainage rate of each store, 1/hours.
    pub k: f64,
    pub baseflow: f64,
    /// Feet of stage per millimetre held in the lower store.
    pub gain: f64,
    pub minor: f64,
    pub attributes: BasinAttributes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloodTruth {
    pub gauge_id: String,
    pub month: YearMonth,
    pub true_flood: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtpTruth {
    pub gauge_id: String,
    pub event_start: chrono::DateTime<chrono::Utc>,
    pub true_ttp_hours: f64,
}

/// Everything a generator run produces, in ingest types.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub config: SynthConfig,
    pub seed: u64,
    pub basins: Vec<SyntheticBasin>,
    pub series: Vec<StageSeries>,
    pub thresholds: Vec<FloodThresholds>,
    pub precip: Vec<DailyPrecip>,
    pub attributes: Vec<BasinAttributes>,
    pub forecasts: Vec<ForecastRecord>,
    pub flood_truth: Vec<FloodTruth>,
    /// Continuous-time peak timing per precipitation event; empty after
    /// [`planted_signal`] reshapes the hydrographs.
    pub ttp_truth: Vec<TtpTruth>,
    pub planted: Option<PlantedSignal>,
    /// Noise-free stage per slot, before rounding and dropouts.
    clean: Vec<Vec<f64>>,
    /// Dropped readings per slot.
    missing: Vec<Vec<bool>>,
    /// `(slot, depth_mm)` rain bursts per gauge.
    rain: Vec<Vec<(usize, f64)>>,
}

impl Bundle {
    pub fn months(&self) -> Vec<YearMonth> {
        self.config.start.iter(self.config.n_months).collect()
    }

    pub fn n_slots(&self) -> usize {
        self.clean.first().map_or(0, Vec::len)
    }

    /// Noise-free stage of gauge `g` at every 15-minute slot.
    pub fn clean_stage(&self, g: usize) -> &[f64] {
        &self.clean[g]
    }

    /// Rain bursts of gauge `g` as `(slot, depth_mm)`, one per wet day.
    pub fn rain_bursts(&self, g: usize) -> &[(usize, f64)] {
        &self.rain[g]
    }

    pub fn flood_rate(&self) -> f64 {
        let n = self.flood_truth.iter().filter(|t| t.true_flood).count();
        n as f64 / self.flood_truth.len() as f64
    }
}

struct GaugeSim {
    basin: SyntheticBasin,
    clean: Vec<f64>,
    missing: Vec<bool>,
    daily: Vec<f64>,
    impulses: Vec<(usize, f64)>,
}

fn season_factor(date: NaiveDate) -> f64 {
    let phase = 2.0 * std::f64::consts::PI * f64::from(date.month0()) / 12.0;
    1.0 + 0.4 * phase.cos()
}

fn draw_basin(gauge_id: &str, rng: &mut seed::Rng) -> Result<SyntheticBasin, SynthError> {
    let impervious = round_to(rng.random_range(0.0..60.0), 10.0);
    let elevation = round_to(rng.random_range(20.0..1500.0), 1.0);
    let char_len = round_to(rng.random_range(0.5..40.0), 100.0);
    let area = round_to((rng.random_range(10f64.ln()..5000f64.ln())).exp(), 10.0);
    let permeability = round_to(rng.random_range(0.05..1.0), 1000.0);
    let slope = round_to(rng.random_range(0.1..12.0), 100.0);
    let baseflow = round_to(rng.random_range(1.0..5.0), 1000.0);
    let mut values = IndexMap::new();
    values.insert("impervious_pct".to_string(), impervious);
    values.insert("elevation_m".to_string(), elevation);
    values.insert("characteristic_length".to_string(), char_len);
    values.insert("drainage_area_km2".to_string(), area);
    values.insert("soil_permeability".to_string(), permeability);
    values.insert("slope_pct".to_string(), slope);
    Ok(SyntheticBasin {
        gauge_id: gauge_id.to_string(),
        k: (2.0 / area.sqrt()).clamp(0.02, 1.0),
        baseflow,
        gain: 0.02 + 0.0006 * impervious,
        minor: f64::NAN,
        attributes: BasinAttributes::new(gauge_id, values)?,
    })
}

fn simulate_gauge(cfg: &SynthConfig, seed: u64, g: usize) -> Result<GaugeSim, SynthError> {
    let gauge_id = format!("G{:04}", g + 1);
    let gauge_seed = seed::derive_seed(seed, g as u64);
    let mut rng = seed::rng(gauge_seed);
    let basin = draw_basin(&gauge_id, &mut rng)?;

    let first = cfg.start.first_day();
    let end = cfg.start.iter(cfg.n_months + 1).last().expect("non-empty").first_day();
    let n_days = (end - first).num_days() as usize;
    let depth =
        LogNormal::new(cfg.rain_log_mean, cfg.rain_log_sd).map_err(|e| SynthError::InvalidParameter(e.to_string()))?;
    let mut daily = vec![0.0; n_days];
    let mut impulses = Vec::new();
    for (d, day) in first.iter_days().take(n_days).enumerate() {
        // fixed draw count per day keeps streams aligned across configs
        let u: f64 = rng.random();
        let mm = round_to(depth.sample(&mut rng), 100.0);
        let slot = rng.random_range(0..SLOTS_PER_DAY as usize);
        if u < (cfg.wet_day_prob * season_factor(day)).min(1.0) && mm > 0.0 {
            daily[d] = mm;
            impulses.push((d * SLOTS_PER_DAY as usize + slot, mm));
        }
    }
    let n_slots = n_days * SLOTS_PER_DAY as usize;
    let clean = simulate(basin.k, n_slots, &impulses)
        .into_iter()
        .map(|b| basin.baseflow + basin.gain * b)
        .collect();
    let mut drop_rng = seed::rng(seed::derive_seed(gauge_seed, 1));
    let missing = (0..n_slots)
        .map(|_| drop_rng.random::<f64>() < cfg.missing_rate)
        .collect();
    Ok(GaugeSim {
        basin,
        clean,
        missing,
        daily,
        impulses,
    })
}

fn emit_readings(
    gauge_id: &str,
    origin: chrono::DateTime<chrono::Utc>,
    clean: &[f64],
    missing: &[bool],
) -> Result<StageSeries, SynthError> {
    let readings = clean
        .iter()
        .zip(missing)
        .enumerate()
        .map(|(n, (&v, &gone))| {
            let t = slot_time(origin, n);
            if gone {
                Reading::missing(t)
            } else {
                Reading::new(t, round_to(v, 1e6))
            }
        })
        .collect();
    Ok(StageSeries::new(gauge_id, readings)?)
}

/// Largest observed stage per month, `None` for a month without readings.
fn monthly_maxima(series: &StageSeries, months: &[YearMonth]) -> Vec<Option<f64>> {
    months
        .iter()
        .map(|m| {
            series
                .between(m.start(), m.end())
                .iter()
                .filter_map(|r| r.stage)
                .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))))
        })
        .collect()
}

fn threshold_at(baseflow: f64, reference: f64, lambda: f64) -> f64 {
    let excess = (lambda * (reference - baseflow)).max(1e-3);
    ((baseflow + excess) * 1000.0).ceil() / 1000.0
}

/// Picks one multiplier `lambda` shared by all gauges so that thresholds
/// `baseflow + lambda * (q99 - baseflow)` flood the target share of months.
fn calibrate(
    cfg: &SynthConfig,
    baseflows: &[f64],
    references: &[f64],
    maxima: &[Vec<Option<f64>>],
) -> Result<Vec<f64>, SynthError> {
    let total: usize = maxima.iter().map(|m| m.iter().flatten().count()).sum();
    let rate = |lambda: f64| -> (f64, Vec<f64>) {
        let th: Vec<f64> = baseflows
            .iter()
            .zip(references)
            .map(|(&b, &r)| threshold_at(b, r, lambda))
            .collect();
        let floods: usize = maxima
            .iter()
            .zip(&th)
            .map(|(m, &t)| m.iter().flatten().filter(|&&v| v >= t).count())
            .sum();
        (floods as f64 / total.max(1) as f64, th)
    };
    let mut hi = maxima
        .iter()
        .zip(baseflows.iter().zip(references))
        .map(|(m, (&b, &r))| {
            let top = m.iter().flatten().fold(b, |a, &v| a.max(v));
            if r > b {
                (top - b) / (r - b)
            } else {
                1.0
            }
        })
        .fold(1.0, f64::max)
        * 2.0;
    let mut lo = 0.0;
    let target = cfg.target_positive_rate;
    let (mut best_rate, mut best) = rate(hi);
    if target > 0.0 {
        for _ in 0..CALIBRATION_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            let (r, th) = rate(mid);
            if (r - target).abs() < (best_rate - target).abs() {
                best_rate = r;
                best = th;
            }
            if r > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let tolerance = (1.0 / total.max(1) as f64).max(0.01);
    if (best_rate - target).abs() > tolerance {
        return Err(SynthError::InfeasibleRate {
            target,
            achieved: best_rate,
        });
    }
    Ok(best)
}

fn make_forecasts(
    cfg: &SynthConfig,
    seed: u64,
    g: usize,
    gauge_id: &str,
    origin: chrono::DateTime<chrono::Utc>,
    clean: &[f64],
) -> Vec<ForecastRecord> {
    if !cfg.forecasts {
        return Vec::new();
    }
    let mut rng = seed::rng(seed::derive_seed(seed::derive_seed(seed, g as u64), 2));
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let per_day = SLOTS_PER_DAY as usize;
    let mut out = Vec::new();
    for issue in (0..clean.len()).step_by(per_day) {
        for step in FORECAST_LEADS_HOURS {
            let lead_hours = step * 6;
            let valid = issue + lead_hours * 4;
            let z: f64 = unit.sample(&mut rng);
            if valid >= clean.len() {
                continue;
            }
            let sd = cfg.forecast_noise_ft * lead_hours as f64 / 24.0;
            out.push(ForecastRecord {
                gauge_id: gauge_id.to_string(),
                issued_at: slot_time(origin, issue),
                valid_at: slot_time(origin, valid),
                forecast_stage: round_to((clean[valid] + sd * z).max(0.0), 1000.0),
            });
        }
    }
    out
}

fn flood_truth_for(series: &StageSeries, minor: f64, months: &[YearMonth]) -> Vec<FloodTruth> {
    monthly_maxima(series, months)
        .into_iter()
        .zip(months)
        .map(|(m, &month)| FloodTruth {
            gauge_id: series.gauge_id().to_string(),
            month,
            true_flood: m.is_some_and(|v| v >= minor),
        })
        .collect()
}

fn ttp_truth_for(
    sim: &GaugeSim,
    precip: &DailyPrecip,
    origin: chrono::DateTime<chrono::Utc>,
) -> Result<Vec<TtpTruth>, SynthError> {
    let hc = HydrologyConfig::default();
    let events = detect_precip_events(precip, hc.onset_mm, hc.dry_gap_days)?;
    let impulses: Vec<(f64, f64)> = sim
        .impulses
        .iter()
        .map(|&(s, mm)| (s as f64 * STEP_HOURS, mm))
        .collect();
    let last = (sim.clean.len() - 1) as f64 * STEP_HOURS;
    let mut out = Vec::new();
    for ev in events {
        let onset = (ev.start - origin).num_minutes() as f64 / 60.0;
        // the first reading after onset is the earliest observable instant
        let from = onset + STEP_HOURS;
        let to = (onset + hc.search_hours).min(last);
        if to <= from {
            continue;
        }
        let (t, _) = continuous_argmax(sim.basin.k, &impulses, from, to);
        // a peak this close to the window end may sit on the last reading,
        // which the detector treats as still rising
        if t > to - STEP_HOURS {
            continue;
        }
        out.push(TtpTruth {
            gauge_id: sim.basin.gauge_id.clone(),
            event_start: ev.start,
            true_ttp_hours: t - onset,
        });
    }
    Ok(out)
}

/// Generates a full bundle. Gauges are simulated in parallel from per-gauge
/// seeds, so the output does not depend on the thread count.
pub fn generate_bundle(cfg: &SynthConfig, seed: u64) -> Result<Bundle, SynthError> {
    cfg.validate()?;
    let months: Vec<YearMonth> = cfg.start.iter(cfg.n_months).collect();
    let origin = cfg.start.start();
    let sims: Vec<GaugeSim> = (0..cfg.n_gauges)
        .into_par_iter()
        .map(|g| simulate_gauge(cfg, seed, g))
        .collect::<Result<_, _>>()?;
    let series: Vec<StageSeries> = sims
        .par_iter()
        .map(|s| emit_readings(&s.basin.gauge_id, origin, &s.clean, &s.missing))
        .collect::<Result<_, _>>()?;
    let precip: Vec<DailyPrecip> = sims
        .iter()
        .map(|s| DailyPrecip::from_daily(s.basin.gauge_id.clone(), cfg.start.first_day(), &s.daily))
        .collect::<Result<_, _>>()?;

    let maxima: Vec<Vec<Option<f64>>> = series.par_iter().map(|s| monthly_maxima(s, &months)).collect();
    let references: Vec<f64> = series
        .iter()
        .map(|s| {
            let mut v: Vec<f64> = s.readings().iter().filter_map(|r| r.stage).collect();
            v.sort_by(f64::total_cmp);
            v.get(((v.len().saturating_sub(1)) as f64 * REFERENCE_QUANTILE) as usize)
                .copied()
                .unwrap_or(0.0)
        })
        .collect();
    let baseflows: Vec<f64> = sims.iter().map(|s| s.basin.baseflow).collect();
    let minors = calibrate(cfg, &baseflows, &references, &maxima)?;

    let mut basins = Vec::with_capacity(sims.len());
    let mut thresholds = Vec::with_capacity(sims.len());
    for (s, &minor) in sims.iter().zip(&minors) {
        let mut b = s.basin.clone();
        b.minor = minor;
        thresholds.push(FloodThresholds::new(
            b.gauge_id.clone(),
            minor,
            Some(minor + 2.0),
            Some(minor + 4.0),
        )?);
        basins.push(b);
    }
    let flood_truth = series
        .iter()
        .zip(&minors)
        .flat_map(|(s, &m)| flood_truth_for(s, m, &months))
        .collect();
    let ttp_truth = sims
        .par_iter()
        .zip(&precip)
        .map(|(s, p)| ttp_truth_for(s, p, origin))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let forecasts = sims
        .par_iter()
        .enumerate()
        .map(|(g, s)| make_forecasts(cfg, seed, g, &s.basin.gauge_id, origin, &s.clean))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let attributes = basins.iter().map(|b| b.attributes.clone()).collect();
    let mut clean = Vec::with_capacity(sims.len());
    let mut missing = Vec::with_capacity(sims.len());
    let mut rain = Vec::with_capacity(sims.len());
    for s in sims {
        clean.push(s.clean);
        missing.push(s.missing);
        rain.push(s.impulses);
    }
    Ok(Bundle {
        config: cfg.clone(),
        seed,
        basins,
        series,
        thresholds,
        precip,
        attributes,
        forecasts,
        flood_truth,
        ttp_truth,
        planted: None,
        clean,
        missing,
        rain,
    })
}

impl Bundle {
    /// Re-derives readings, flood truth and forecasts after `clean` changed.
    fn refresh_from_clean(&mut self) -> Result<(), SynthError> {
        let origin = self.config.start.start();
        let months = self.months();
        self.series = self
            .clean
            .par_iter()
            .zip(&self.missing)
            .zip(&self.basins)
            .map(|((c, m), b)| emit_readings(&b.gauge_id, origin, c, m))
            .collect::<Result<_, _>>()?;
        self.flood_truth = self
            .series
            .iter()
            .zip(&self.basins)
            .flat_map(|(s, b)| flood_truth_for(s, b.minor, &months))
            .collect();
        let (cfg, seed) = (&self.config, self.seed);
        self.forecasts = self
            .clean
            .par_iter()
            .enumerate()
            .map(|(g, c)| make_forecasts(cfg, seed, g, &self.basins[g].gauge_id, origin, c))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect();
        Ok(())
    }

    pub(crate) fn slot_range(&self, month: YearMonth) -> std::ops::Range<usize> {
        let origin = self.config.start.start();
        let per = |t: chrono::DateTime<chrono::Utc>| ((t - origin).num_minutes() / 15) as usize;
        per(month.start())..per(month.end()).min(self.n_slots())
    }
}

/// Number of days spanned by `n_months` months from `start`.
pub fn span_days(start: YearMonth, n_months: usize) -> i64 {
    let end = start.iter(n_months + 1).last().expect("non-empty").first_day();
    (end - start.first_day()).num_days()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydrology::{month_flood_label, time_to_peak, MonthLabel};

    fn small(target: f64) -> SynthConfig {
        SynthConfig {
            n_gauges: 6,
            n_months: 4,
            ..SynthConfig::new(6, 4, target)
        }
    }

    #[test]
    fn rejects_small_bundles() {
        assert!(matches!(
            generate_bundle(&SynthConfig::new(2, 12, 0.05), 1),
            Err(SynthError::TooFewGauges(2))
        ));
        assert!(matches!(
            generate_bundle(&SynthConfig::new(5, 1, 0.05), 1),
            Err(SynthError::TooFewMonths(1))
        ));
    }

    #[test]
    fn zero_rain_is_flat_and_dry() {
        let cfg = SynthConfig {
            wet_day_prob: 0.0,
            ..small(0.0)
        };
        let b = generate_bundle(&cfg, 3).unwrap();
        for (s, basin) in b.series.iter().zip(&b.basins) {
            assert!(s.readings().iter().filter_map(|r| r.stage).all(|v| v == basin.baseflow));
            assert!(basin.minor > basin.baseflow);
        }
        assert!(b.flood_truth.iter().all(|t| !t.true_flood));
    }

    #[test]
    fn zero_rain_cannot_hit_positive_target() {
        let cfg = SynthConfig {
            wet_day_prob: 0.0,
            n_gauges: 20,
            n_months: 12,
            ..small(0.2)
        };
        assert!(matches!(
            generate_bundle(&cfg, 3),
            Err(SynthError::InfeasibleRate { .. })
        ));
    }

    #[test]
    fn deterministic_for_seed() {
        let a = generate_bundle(&small(0.1), 9).unwrap();
        let b = generate_bundle(&small(0.1), 9).unwrap();
        assert_eq!(a.series, b.series);
        assert_eq!(a.forecasts, b.forecasts);
        assert_eq!(a.flood_truth, b.flood_truth);
        let c = generate_bundle(&small(0.1), 10).unwrap();
        assert_ne!(a.series, c.series);
    }

    #[test]
    fn sidecar_matches_hydrology() {
        let b = generate_bundle(
            &SynthConfig {
                missing_rate: 0.0,
                ..small(0.1)
            },
            4,
        )
        .unwrap();
        let months = b.months();
        for ((s, t), chunk) in b
            .series
            .iter()
            .zip(&b.thresholds)
            .zip(b.flood_truth.chunks(months.len()))
        {
            for (m, truth) in months.iter().zip(chunk) {
                let label = month_flood_label(s, t, *m, 0.5).unwrap();
                assert_eq!(label == MonthLabel::Flood, truth.true_flood);
            }
        }
        let hc = HydrologyConfig::default();
        let mut matched = 0;
        for (s, p) in b.series.iter().zip(&b.precip) {
            for ev in detect_precip_events(p, hc.onset_mm, hc.dry_gap_days).unwrap() {
                let truth = b
                    .ttp_truth
                    .iter()
                    .find(|t| t.gauge_id == ev.gauge_id && t.event_start == ev.start);
                let found = time_to_peak(s, &ev, hc.search_hours).unwrap();
                match (truth, &found) {
                    (Some(t), Some(f)) => {
                        assert!(
                            (t.true_ttp_hours - f.ttp_hours).abs() <= STEP_HOURS + 1e-9,
                            "{t:?} vs {}",
                            f.ttp_hours
                        );
                        matched += 1;
                    }
                    (Some(t), None) => panic!("no peak detected for {t:?}"),
                    (None, Some(f)) => {
                        let end = (ev.start + chrono::Duration::hours(168)).min(s.last_time().unwrap());
                        assert!(end - f.peak_time <= chrono::Duration::minutes(30), "{f:?}");
                    }
                    (None, None) => {}
                }
            }
        }
        assert!(matched > 0);
    }

    #[test]
    fn impulse_peak_matches_closed_form() {
        let origin = YearMonth::new(2020, 5).unwrap().start();
        let r = impulse_response("X1", 0.2, 0.05, 2.0, 30.0, 10, origin, 4).unwrap();
        let hc = HydrologyConfig::default();
        let ev = detect_precip_events(&r.precip, hc.onset_mm, hc.dry_gap_days).unwrap();
        let ttp = time_to_peak(&r.series, &ev[0], hc.search_hours).unwrap().unwrap();
        assert_eq!(r.peak_hours, 2.5 + 5.0);
        assert!((ttp.ttp_hours - r.peak_hours).abs() <= STEP_HOURS);
    }

    #[test]
    fn forecasts_respect_horizon() {
        let b = generate_bundle(&small(0.1), 2).unwrap();
        assert!(!b.forecasts.is_empty());
        assert!(b
            .forecasts
            .iter()
            .all(|f| f.lead_hours() > 0.0 && f.lead_hours() <= 72.0));
    }

    #[test]
    fn span_days_counts_calendar() {
        assert_eq!(span_days(YearMonth::new(2016, 1).unwrap(), 2), 60);
    }
}
