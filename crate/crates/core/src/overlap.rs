//! Venn-style decomposition of which faults each metric considers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FaultId;

/// Largest metric list the power-set decomposition accepts.
pub const MAX_METRICS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    /// `members[i]` is true when the region lies inside metric `i`'s set.
    pub members: Vec<bool>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub metrics: Vec<String>,
    pub consideration: Vec<BTreeSet<FaultId>>,
    /// One region per subset of the metric list, indexed by membership bitmask
    /// (bit `i` set = inside metric `i`); index 0 is "considered by none".
    pub regions: Vec<Region>,
    pub total: usize,
}

impl OverlapReport {
    /// Count of the region whose membership bitmask is `mask`.
    pub fn region(&self, mask: usize) -> usize {
        self.regions[mask].count
    }

    pub fn none(&self) -> usize {
        self.regions[0].count
    }

    /// Faults considered by exactly one metric, per metric.
    pub fn unique(&self) -> Vec<usize> {
        (0..self.metrics.len()).map(|i| self.region(1 << i)).collect()
    }

    /// Faults considered by metric `i`: the sum of every region inside it.
    pub fn metric_total(&self, i: usize) -> usize {
        self.regions
            .iter()
            .enumerate()
            .filter(|(mask, _)| mask >> i & 1 == 1)
            .map(|(_, r)| r.count)
            .sum()
    }
}

pub fn overlap_report(
    metrics: &[String],
    consideration: &[BTreeSet<FaultId>],
    all_faults: &BTreeSet<FaultId>,
) -> Result<OverlapReport> {
    if metrics.len() != consideration.len() {
        return Err(Error::input("one consideration set per metric required"));
    }
    if metrics.len() > MAX_METRICS {
        return Err(Error::input(format!(
            "overlap supports at most {MAX_METRICS} metrics, got {}",
            metrics.len()
        )));
    }
    for (name, set) in metrics.iter().zip(consideration) {
        if let Some(stray) = set.iter().find(|f| !all_faults.contains(*f)) {
            return Err(Error::input(format!("{name} considers unknown fault `{stray}`")));
        }
    }
    let k = metrics.len();
    let mut counts = vec![0usize; 1 << k];
    for fault in all_faults {
        let mask = consideration
            .iter()
            .enumerate()
            .filter(|(_, set)| set.contains(fault))
            .fold(0usize, |m, (i, _)| m | 1 << i);
        counts[mask] += 1;
    }
    let regions = counts
        .into_iter()
        .enumerate()
        .map(|(mask, count)| Region {
            members: (0..k).map(|i| mask >> i & 1 == 1).collect(),
            count,
        })
        .collect();
    Ok(OverlapReport {
        metrics: metrics.to_vec(),
        consideration: consideration.to_vec(),
        regions,
        total: all_faults.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn faults(names: &[&str]) -> BTreeSet<FaultId> {
        names.iter().map(|n| FaultId::new(*n).unwrap()).collect()
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_metric() {
        let r = overlap_report(&names(&["m"]), &[faults(&["f1", "f2"])], &faults(&["f1", "f2", "f3"])).unwrap();
        assert_eq!(r.region(0b1), 2);
        assert_eq!(r.none(), 1);
    }

    #[test]
    fn three_sets_match_membership_enumeration() {
        let sets = [faults(&["f1", "f2"]), faults(&["f2"]), faults(&[])];
        let all = faults(&["f1", "f2", "f3"]);
        let r = overlap_report(&names(&["A", "B", "C"]), &sets, &all).unwrap();
        for mask in 0..8usize {
            let expected = all
                .iter()
                .filter(|f| (0..3).all(|i| sets[i].contains(*f) == (mask >> i & 1 == 1)))
                .count();
            assert_eq!(r.region(mask), expected, "mask {mask:03b}");
        }
        assert_eq!((r.region(0b001), r.region(0b011), r.none()), (1, 1, 1));
        assert_eq!(r.unique(), vec![1, 0, 0]);
    }

    #[test]
    fn all_empty() {
        let r = overlap_report(&names(&["A", "B"]), &[faults(&[]), faults(&[])], &faults(&["f1", "f2"])).unwrap();
        assert_eq!(r.none(), 2);
    }

    #[test]
    fn stray_fault_is_rejected() {
        assert!(overlap_report(&names(&["A"]), &[faults(&["zz"])], &faults(&["f1"])).is_err());
    }

    #[test]
    fn group_uniqueness_is_additive() {
        // faults unique to {A,B} as a group = only-A + only-B + (A∩B only)
        let sets = [faults(&["f1", "f2", "f3", "f4"]), faults(&["f3", "f4", "f5"]), faults(&["f4", "f6"])];
        let all = faults(&["f1", "f2", "f3", "f4", "f5", "f6", "f7"]);
        let r = overlap_report(&names(&["A", "B", "C"]), &sets, &all).unwrap();
        let group: BTreeSet<_> = sets[0].union(&sets[1]).filter(|f| !sets[2].contains(*f)).collect();
        assert_eq!(r.region(0b001) + r.region(0b010) + r.region(0b011), group.len());
        assert_eq!((r.region(0b001), r.region(0b010), r.region(0b011)), (2, 1, 1));
    }

    proptest! {
        #[test]
        fn regions_partition_the_faults(
            (n, k, bits) in (0usize..30, 1usize..6)
                .prop_flat_map(|(n, k)| (Just(n), Just(k), proptest::collection::vec(any::<bool>(), n * k)))
        ) {
            let all: BTreeSet<FaultId> = (0..n).map(|i| FaultId::new(format!("f{i}")).unwrap()).collect();
            let ids: Vec<FaultId> = all.iter().cloned().collect();
            let sets: Vec<BTreeSet<FaultId>> = (0..k)
                .map(|m| (0..n).filter(|&f| bits[f * k + m]).map(|f| ids[f].clone()).collect())
                .collect();
            let metric_names: Vec<String> = (0..k).map(|m| format!("M{m}")).collect();
            let r = overlap_report(&metric_names, &sets, &all).unwrap();
            prop_assert_eq!(r.regions.iter().map(|x| x.count).sum::<usize>(), n);
            for (i, set) in sets.iter().enumerate() {
                prop_assert_eq!(r.metric_total(i), set.len());
            }
        }
    }
}
