//! Two equal linear reservoirs in series (a Nash cascade of order two).
//!
//! Rain enters the upper store `A`; `A` drains into `B` at rate `k`; stage is
//! `baseflow + gain * B`. An impulse into an empty cascade gives
//! `B(t) = r k t e^{-k t}`, which peaks at `t = 1/k`.

use chrono::{DateTime, Duration, Utc};

use super::SynthError;
use crate::ingest::{DailyPrecip, Reading, StageSeries};
use crate::month::SLOTS_PER_DAY;

/// Reading interval in hours.
pub const STEP_HOURS: f64 = 0.25;

/// State after letting `(a, b)` evolve without input for `tau` hours.
pub fn advance(a: f64, b: f64, k: f64, tau: f64) -> (f64, f64) {
    let e = (-k * tau).exp();
    (a * e, (b + k * tau * a) * e)
}

/// Lower-store level `B` at every slot. `impulses` holds `(slot, depth_mm)`
/// sorted by slot; each depth enters `A` at its slot time.
pub fn simulate(k: f64, n_slots: usize, impulses: &[(usize, f64)]) -> Vec<f64> {
    let e = (-k * STEP_HOURS).exp();
    let kd = k * STEP_HOURS;
    let (mut a, mut b) = (0.0, 0.0);
    let mut next = impulses.iter().peekable();
    let mut out = Vec::with_capacity(n_slots);
    for n in 0..n_slots {
        out.push(b);
        while let Some(&&(slot, depth)) = next.peek() {
            if slot != n {
                break;
            }
            a += depth;
            next.next();
        }
        let a1 = a * e;
        b = (b + kd * a) * e;
        a = a1;
    }
    out
}

/// Exact location of the maximum of `B` on `[from, to]` (hours), earliest on
/// ties. Impulses are `(time_hours, depth)` sorted by time.
pub fn continuous_argmax(k: f64, impulses: &[(f64, f64)], from: f64, to: f64) -> (f64, f64) {
    let (mut a, mut b, mut t) = (0.0, 0.0, 0.0);
    let mut idx = 0;
    while idx < impulses.len() && impulses[idx].0 <= from {
        (a, b) = advance(a, b, k, impulses[idx].0 - t);
        t = impulses[idx].0;
        a += impulses[idx].1;
        idx += 1;
    }
    (a, b) = advance(a, b, k, from - t);
    t = from;
    let mut best = (from, b);
    loop {
        let seg_end = if idx < impulses.len() && impulses[idx].0 < to {
            impulses[idx].0
        } else {
            to
        };
        if a > 0.0 {
            let ts = (a - b) / (k * a);
            if ts > 0.0 && ts < seg_end - t {
                let (_, bs) = advance(a, b, k, ts);
                if bs > best.1 {
                    best = (t + ts, bs);
                }
            }
        }
        (a, b) = advance(a, b, k, seg_end - t);
        if b > best.1 {
            best = (seg_end, b);
        }
        t = seg_end;
        if seg_end >= to {
            return best;
        }
        while idx < impulses.len() && impulses[idx].0 == t {
            a += impulses[idx].1;
            idx += 1;
        }
    }
}

pub(crate) fn round_to(x: f64, per_unit: f64) -> f64 {
    (x * per_unit).round() / per_unit
}

pub(crate) fn slot_time(origin: DateTime<Utc>, slot: usize) -> DateTime<Utc> {
    origin + Duration::minutes(15 * slot as i64)
}

/// Idle basin hit by one storm: `rain_mm` falls at slot `offset_slots` of the
/// first day and nothing else for `n_days`.
#[derive(Debug, Clone)]
pub struct ImpulseResponse {
    pub series: StageSeries,
    pub precip: DailyPrecip,
    /// Hours from midnight of the rain day to the continuous peak.
    pub peak_hours: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn impulse_response(
    gauge_id: &str,
    k: f64,
    gain: f64,
    baseflow: f64,
    rain_mm: f64,
    offset_slots: usize,
    origin: DateTime<Utc>,
    n_days: usize,
) -> Result<ImpulseResponse, SynthError> {
    if !(k > 0.0 && gain > 0.0 && baseflow >= 0.0 && rain_mm > 0.0) {
        return Err(SynthError::InvalidParameter("k, gain and rain must be positive".into()));
    }
    if offset_slots >= SLOTS_PER_DAY as usize || n_days < 2 {
        return Err(SynthError::InvalidParameter(
            "impulse must fall on the first of at least two days".into(),
        ));
    }
    let n_slots = n_days * SLOTS_PER_DAY as usize;
    let b = simulate(k, n_slots, &[(offset_slots, rain_mm)]);
    let readings = b
        .iter()
        .enumerate()
        .map(|(n, &v)| Reading::new(slot_time(origin, n), baseflow + gain * v))
        .collect();
    let mut daily = vec![0.0; n_days];
    daily[0] = rain_mm;
    Ok(ImpulseResponse {
        series: StageSeries::new(gauge_id, readings)?,
        precip: DailyPrecip::from_daily(gauge_id, origin.date_naive(), &daily)?,
        peak_hours: offset_slots as f64 * STEP_HOURS + 1.0 / k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recursion_matches_closed_form() {
        let k = 0.37;
        let b = simulate(k, 400, &[(0, 2.0)]);
        for (n, v) in b.iter().enumerate() {
            let t = n as f64 * STEP_HOURS;
            let exact = 2.0 * k * t * (-k * t).exp();
            assert!((v - exact).abs() < 1e-12, "slot {n}");
        }
    }

    #[test]
    fn superposition_of_two_impulses() {
        let k = 0.2;
        let both = simulate(k, 300, &[(4, 1.0), (40, 3.0)]);
        let first = simulate(k, 300, &[(4, 1.0)]);
        let second = simulate(k, 300, &[(40, 3.0)]);
        for i in 0..300 {
            assert!((both[i] - first[i] - second[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn argmax_of_single_impulse_is_one_over_k() {
        let k = 0.125;
        let (t, b) = continuous_argmax(k, &[(3.0, 5.0)], 0.0, 100.0);
        assert!((t - 11.0).abs() < 1e-12);
        assert!((b - 5.0 / std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn argmax_agrees_with_dense_sampling() {
        let k = 0.6;
        let imp = [(1.0, 2.0), (2.5, 1.0), (9.0, 4.0)];
        let (t, b) = continuous_argmax(k, &imp, 0.5, 30.0);
        // brute force on a 0.0001 h grid
        let mut best = (0.0, f64::MIN);
        let mut i = 0;
        while f64::from(i) * 1e-4 <= 29.5 {
            let tt = 0.5 + f64::from(i) * 1e-4;
            let (mut a, mut bb, mut tc) = (0.0, 0.0, 0.0);
            for &(ti, r) in imp.iter().filter(|p| p.0 <= tt) {
                (a, bb) = advance(a, bb, k, ti - tc);
                tc = ti;
                a += r;
            }
            let (_, v) = advance(a, bb, k, tt - tc);
            if v > best.1 {
                best = (tt, v);
            }
            i += 1;
        }
        assert!((t - best.0).abs() < 2e-4);
        assert!((b - best.1).abs() < 1e-9);
    }

    #[test]
    fn decaying_window_peaks_at_start() {
        let (t, _) = continuous_argmax(0.5, &[(0.0, 1.0)], 10.0, 20.0);
        assert_eq!(t, 10.0);
    }
}
