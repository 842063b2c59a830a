use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::types::{BasinAttributes, DailyPrecip, FloodThresholds, StageSeries};
use super::IngestError;

/// Everything known about one gauge.
#[derive(Debug, Clone)]
pub struct GaugeRecord {
    pub gauge_id: String,
    pub series: StageSeries,
    pub thresholds: FloodThresholds,
    pub precip: DailyPrecip,
    pub attributes: BasinAttributes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingComponent {
    Stage,
    Thresholds,
    Precip,
    Attributes,
}

/// Gauges that appear in some input but not all of them.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CoverageReport {
    pub dropped: Vec<(String, Vec<MissingComponent>)>,
}

#[derive(Debug, Clone)]
pub struct JoinResult {
    pub records: Vec<GaugeRecord>,
    pub coverage: CoverageReport,
}

/// Inner join on gauge id; output is sorted by gauge id.
pub fn join_gauges(
    series: Vec<StageSeries>,
    thresholds: Vec<FloodThresholds>,
    precip: Vec<DailyPrecip>,
    attributes: Vec<BasinAttributes>,
) -> Result<JoinResult, IngestError> {
    fn index<T>(items: Vec<T>, key: impl Fn(&T) -> &str) -> Result<BTreeMap<String, T>, IngestError> {
        let mut map = BTreeMap::new();
        for item in items {
            let id = key(&item).to_string();
            if map.contains_key(&id) {
                return Err(IngestError::DuplicateGauge { gauge_id: id });
            }
            map.insert(id, item);
        }
        Ok(map)
    }
    let mut series = index(series, |s| s.gauge_id())?;
    let mut thresholds = index(thresholds, |t| &t.gauge_id)?;
    let mut precip = index(precip, |p| p.gauge_id())?;
    let mut attributes = index(attributes, |a| &a.gauge_id)?;

    let all: BTreeSet<String> = series
        .keys()
        .chain(thresholds.keys())
        .chain(precip.keys())
        .chain(attributes.keys())
        .cloned()
        .collect();

    let mut records = Vec::new();
    let mut coverage = CoverageReport::default();
    for id in all {
        let mut missing = Vec::new();
        if !series.contains_key(&id) {
            missing.push(MissingComponent::Stage);
        }
        if !thresholds.contains_key(&id) {
            missing.push(MissingComponent::Thresholds);
        }
        if !precip.contains_key(&id) {
            missing.push(MissingComponent::Precip);
        }
        if !attributes.contains_key(&id) {
            missing.push(MissingComponent::Attributes);
        }
        if !missing.is_empty() {
            coverage.dropped.push((id, missing));
            continue;
        }
        records.push(GaugeRecord {
            series: series.remove(&id).expect("present"),
            thresholds: thresholds.remove(&id).expect("present"),
            precip: precip.remove(&id).expect("present"),
            attributes: attributes.remove(&id).expect("present"),
            gauge_id: id,
        });
    }
    if records.is_empty() {
        return Err(IngestError::EmptyJoin);
    }
    Ok(JoinResult { records, coverage })
}

#[cfg(test)]
mod tests {
    use chrono::NaiveDate;
    use indexmap::IndexMap;

    use super::*;

    fn attrs(id: &str) -> BasinAttributes {
        let mut v = IndexMap::new();
        v.insert("impervious_pct".into(), 5.0);
        v.insert("elevation_m".into(), 100.0);
        v.insert("characteristic_length".into(), 2.0);
        BasinAttributes::new(id, v).unwrap()
    }

    fn parts(
        ids: &[&str],
    ) -> (
        Vec<StageSeries>,
        Vec<FloodThresholds>,
        Vec<DailyPrecip>,
        Vec<BasinAttributes>,
    ) {
        let d = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();
        (
            ids.iter().map(|id| StageSeries::new(*id, vec![]).unwrap()).collect(),
            ids.iter()
                .map(|id| FloodThresholds::minor_only(*id, 1.0).unwrap())
                .collect(),
            ids.iter()
                .map(|id| DailyPrecip::from_daily(*id, d, &[0.0]).unwrap())
                .collect(),
            ids.iter().map(|id| attrs(id)).collect(),
        )
    }

    #[test]
    fn dropped_gauge_is_reported() {
        let (s, mut t, p, a) = parts(&["a", "b", "c"]);
        t.retain(|t| t.gauge_id != "b");
        let j = join_gauges(s, t, p, a).unwrap();
        let ids: Vec<_> = j.records.iter().map(|r| r.gauge_id.as_str()).collect();
        assert_eq!(ids, ["a", "c"]);
        assert_eq!(
            j.coverage.dropped,
            vec![("b".to_string(), vec![MissingComponent::Thresholds])]
        );
    }

    #[test]
    fn disjoint_ids_are_an_empty_join() {
        let (s, _, _, _) = parts(&["a"]);
        let (_, t, p, a) = parts(&["b"]);
        assert!(matches!(join_gauges(s, t, p, a), Err(IngestError::EmptyJoin)));
    }
}
