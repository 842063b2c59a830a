use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::seed;

pub const MIN_GAUGES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

/// Whole-gauge assignment to train, validation or test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub seed: u64,
    pub assignment: BTreeMap<String, Split>,
}

impl SplitAssignment {
    pub fn get(&self, gauge_id: &str) -> Option<Split> {
        self.assignment.get(gauge_id).copied()
    }

    pub fn gauges(&self, split: Split) -> Vec<&str> {
        self.assignment
            .iter()
            .filter(|(_, &s)| s == split)
            .map(|(g, _)| g.as_str())
            .collect()
    }

    /// (train, val, test) sizes.
    pub fn counts(&self) -> (usize, usize, usize) {
        let c = |s| self.assignment.values().filter(|&&x| x == s).count();
        (c(Split::Train), c(Split::Val), c(Split::Test))
    }
}

/// 60/20/20 split by gauge count: floors first, then one leftover gauge to
/// train and a second to validation.
pub fn split_by_gauge<S: AsRef<str>>(gauge_ids: &[S], seed: u64) -> Result<SplitAssignment, FeatureError> {
    let mut ids: Vec<&str> = gauge_ids.iter().map(AsRef::as_ref).collect();
    ids.sort_unstable();
    ids.dedup();
    let n = ids.len();
    if n < MIN_GAUGES {
        return Err(FeatureError::TooFewGauges(n));
    }
    let (mut train, mut val, test) = (n * 6 / 10, n * 2 / 10, n * 2 / 10);
    let rest = n - train - val - test;
    if rest >= 1 {
        train += 1;
    }
    if rest >= 2 {
        val += 1;
    }
    ids.shuffle(&mut seed::rng(seed));
    let assignment = ids
        .into_iter()
        .enumerate()
        .map(|(i, id)| {
            let s = if i < train {
                Split::Train
            } else if i < train + val {
                Split::Val
            } else {
                Split::Test
            };
            (id.to_string(), s)
        })
        .collect();
    Ok(SplitAssignment { seed, assignment })
}
