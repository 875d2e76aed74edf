//! Order preservation: the share of ground-truth pairs whose relation a metric
//! reproduces, averaged over repetitions for stochastic metrics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groundtruth::{Provenance, Relation, SuitePair};
use crate::metrics::{Metric, MetricConfig};
use crate::model::{FaultId, ProjectBundle, Score};
use crate::rng::{derive_index, rng_from_seed};

pub const DEFAULT_REPETITIONS: u32 = 20;

/// Whether a metric holds the pair's relation: strictly greater for
/// MoreEffective (a tie twists the order), exactly equal for AsEffective.
pub fn check(relation: Relation, vx: Score, vy: Score) -> bool {
    match relation {
        Relation::MoreEffective => vx > vy,
        Relation::AsEffective => vx == vy,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub pair_id: String,
    pub provenance: Provenance,
    pub relation: Relation,
    /// Repetitions in which the pair was preserved.
    pub preserved: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpReport {
    pub metric: Metric,
    pub project: String,
    /// Number of pairs.
    pub p: usize,
    pub repetitions: u32,
    /// Sum of |W_r| over all repetitions.
    pub preserved_sum: u64,
    pub per_pair: Vec<PairOutcome>,
    pub config: MetricConfig,
    pub seed: u64,
}

impl OpReport {
    /// Mean number of preserved pairs per repetition.
    pub fn preserved(&self) -> f64 {
        self.preserved_sum as f64 / self.repetitions as f64
    }

    /// OP as an exact fraction `(preserved_sum, repetitions * p)`.
    pub fn op_fraction(&self) -> (u64, u64) {
        (self.preserved_sum, self.repetitions as u64 * self.p as u64)
    }

    pub fn op_value(&self) -> f64 {
        let (num, den) = self.op_fraction();
        num as f64 / den as f64
    }

    /// Per fault: share of repetitions in which its pair was preserved.
    pub fn consideration(&self) -> Result<BTreeMap<FaultId, f64>> {
        self.per_pair
            .iter()
            .map(|o| match &o.provenance {
                Provenance::Fault(id) => Ok((id.clone(), o.preserved as f64 / self.repetitions as f64)),
                Provenance::RandomSubset => Err(Error::input(format!(
                    "pair `{}` has no fault provenance",
                    o.pair_id
                ))),
            })
            .collect()
    }
}

/// OP(m) = |W| / p, with |W| averaged over `repetitions` fresh selections for
/// RMS and CMS. Deterministic metrics always run once.
///
/// Repetition `r` draws its selection from a stream seeded by
/// `(config.selection_seed, r)`; that selection is shared by every pair.
pub fn order_preservation(
    bundle: &ProjectBundle,
    pairs: &[SuitePair],
    metric: Metric,
    config: &MetricConfig,
    repetitions: u32,
) -> Result<OpReport> {
    if pairs.is_empty() {
        return Err(Error::input(format!("project `{}` has no suite pairs", bundle.id())));
    }
    if repetitions == 0 {
        return Err(Error::config("repetitions must be at least 1"));
    }
    config.validate()?;
    let repetitions = if metric.is_stochastic() { repetitions } else { 1 };

    let mut preserved = vec![0u32; pairs.len()];
    for r in 0..repetitions {
        let mut rng = rng_from_seed(derive_index(config.selection_seed, r as u64));
        let prepared = metric.prepare(bundle, config, &mut rng)?;
        for (pair, count) in pairs.iter().zip(preserved.iter_mut()) {
            let vx = prepared.score(bundle, &pair.x)?;
            let vy = prepared.score(bundle, &pair.y)?;
            if check(pair.relation, vx, vy) {
                *count += 1;
            }
        }
    }

    Ok(OpReport {
        metric,
        project: bundle.id().to_string(),
        p: pairs.len(),
        repetitions,
        preserved_sum: preserved.iter().map(|&c| c as u64).sum(),
        per_pair: pairs
            .iter()
            .zip(preserved)
            .map(|(pair, preserved)| PairOutcome {
                pair_id: pair.pair_id.clone(),
                provenance: pair.provenance.clone(),
                relation: pair.relation,
                preserved,
            })
            .collect(),
        config: config.clone(),
        seed: config.selection_seed,
    })
}

/// Fraction of repetitions in which each fault's pair is preserved.
pub fn considered_faults(
    bundle: &ProjectBundle,
    pairs: &[SuitePair],
    metric: Metric,
    config: &MetricConfig,
    repetitions: u32,
) -> Result<BTreeMap<FaultId, f64>> {
    if let Some(stray) = pairs.iter().find(|p| p.provenance.fault().is_none()) {
        return Err(Error::input(format!("pair `{}` has no fault provenance", stray.pair_id)));
    }
    order_preservation(bundle, pairs, metric, config, repetitions)?.consideration()
}

/// Crisp consideration set: faults considered in at least half of the repetitions.
pub fn crisp(consideration: &BTreeMap<FaultId, f64>) -> std::collections::BTreeSet<FaultId> {
    consideration
        .iter()
        .filter(|(_, &f)| f >= 0.5)
        .map(|(id, _)| id.clone())
        .collect()
}
