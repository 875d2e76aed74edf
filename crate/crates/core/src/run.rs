//! Run orchestration: builds the pairs for a protocol, evaluates every metric
//! on every project bundle and assembles the per-project tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agreement::{crisp, order_preservation, OpReport, DEFAULT_REPETITIONS};
use crate::error::{Error, Result};
use crate::groundtruth::{random_subset_suite_pairs, real_fault_pair, SuitePair};
use crate::metrics::{Metric, MetricConfig, DEFAULT_COS_OPERATORS};
use crate::model::{FaultId, ProjectBundle};
use crate::overlap::{overlap_report, OverlapReport};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats::{change_rate, ChangeRate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundTruth {
    Real,
    Mutant,
}

impl fmt::Display for GroundTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroundTruth::Real => "real",
            GroundTruth::Mutant => "mutant",
        })
    }
}

impl FromStr for GroundTruth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(GroundTruth::Real),
            "mutant" => Ok(GroundTruth::Mutant),
            other => Err(Error::config(format!("unknown ground truth `{other}` (expected real|mutant)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairProtocol {
    /// One pair per fault: full pool vs. pool minus the triggering tests.
    PerFault,
    /// `count` random k-vs-(k−1) subset pairs per project.
    Random { count: usize },
}

impl fmt::Display for PairProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairProtocol::PerFault => f.write_str("per-fault"),
            PairProtocol::Random { count } => write!(f, "random:{count}"),
        }
    }
}

impl FromStr for PairProtocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "per-fault" {
            return Ok(PairProtocol::PerFault);
        }
        s.strip_prefix("random:")
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| n > 0)
            .map(|count| PairProtocol::Random { count })
            .ok_or_else(|| Error::config(format!("unknown pair protocol `{s}` (expected per-fault|random:N)")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub metrics: Vec<Metric>,
    pub ground_truth: GroundTruth,
    pub repetitions: u32,
    pub rms_percent: u32,
    pub cos_operators: BTreeSet<String>,
    pub seed: u64,
    pub pairs: PairProtocol,
    pub kmeans_max_iters: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            metrics: Metric::ALL.to_vec(),
            ground_truth: GroundTruth::Real,
            repetitions: DEFAULT_REPETITIONS,
            rms_percent: 30,
            cos_operators: DEFAULT_COS_OPERATORS.iter().map(|s| s.to_string()).collect(),
            seed: 0,
            pairs: PairProtocol::PerFault,
            kmeans_max_iters: 100,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.metrics.is_empty() {
            return Err(Error::config("no metrics selected"));
        }
        let unique: BTreeSet<_> = self.metrics.iter().collect();
        if unique.len() != self.metrics.len() {
            return Err(Error::config("metric list contains duplicates"));
        }
        if self.ground_truth == GroundTruth::Mutant && self.metrics.contains(&Metric::Ms) {
            return Err(Error::config(
                "MS is the mutant-based ground truth itself and cannot be evaluated against it",
            ));
        }
        if self.ground_truth == GroundTruth::Real && self.pairs != PairProtocol::PerFault {
            return Err(Error::config("random-subset pairs have no real-fault relation; use --ground-truth mutant"));
        }
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        self.metric_config("", Metric::Ms).validate()
    }

    /// Metric settings for one (project, metric) cell; its selection seed is
    /// derived from the master seed, so cells are independent of run order.
    pub fn metric_config(&self, project: &str, metric: Metric) -> MetricConfig {
        MetricConfig {
            cos_operators: self.cos_operators.clone(),
            rms_percent: self.rms_percent,
            selection_seed: derive_seed(derive_seed(self.seed, project), metric.name()),
            kmeans_max_iters: self.kmeans_max_iters,
        }
    }

    fn pair_seed(&self, project: &str) -> u64 {
        derive_seed(derive_seed(self.seed, project), "pairs")
    }
}

/// OP as an unreduced fraction of the report, so `16/18` stays `16/18`.
pub fn op_rational(report: &OpReport) -> BigRational {
    let (num, den) = report.op_fraction();
    BigRational::new_raw(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectRow {
    pub project: String,
    /// One report per metric, in the table's metric order.
    pub reports: Vec<OpReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpTable {
    pub ground_truth: GroundTruth,
    pub pairs: PairProtocol,
    pub metrics: Vec<Metric>,
    /// Sorted by project id.
    pub rows: Vec<ProjectRow>,
}

impl OpTable {
    /// Unweighted mean of a metric's OP over the projects; `None` for an empty table.
    pub fn average(&self, column: usize) -> Option<BigRational> {
        if self.rows.is_empty() {
            return None;
        }
        let sum = self
            .rows
            .iter()
            .fold(BigRational::zero(), |acc, row| acc + op_rational(&row.reports[column]));
        Some(sum / BigRational::from_integer(BigInt::from(self.rows.len())))
    }

    pub fn baseline(&self) -> Baseline {
        let mut values = BTreeMap::new();
        for row in &self.rows {
            let cells = self
                .metrics
                .iter()
                .zip(&row.reports)
                .map(|(m, r)| (m.name().to_string(), op_rational(r)))
                .collect();
            values.insert(row.project.clone(), cells);
        }
        Baseline { values }
    }
}

/// Real-fault OP values to compare a mutant-ground-truth run against.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Baseline {
    /// project → metric name → OP.
    pub values: BTreeMap<String, BTreeMap<String, BigRational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChangeRateTable {
    pub metrics: Vec<Metric>,
    /// Per project, per metric: the rate, or `None` where the baseline OP is zero.
    pub rows: Vec<(String, Vec<Option<ChangeRate>>)>,
    /// Rate of the averaged alternative OP against the averaged baseline OP.
    pub average: Vec<Option<ChangeRate>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub config: RunConfig,
    pub table: OpTable,
    pub change_rates: Option<ChangeRateTable>,
}

fn evaluate_bundle(bundle: &ProjectBundle, pairs: &[SuitePair], cfg: &RunConfig) -> Result<ProjectRow> {
    let reports = cfg
        .metrics
        .iter()
        .map(|&m| order_preservation(bundle, pairs, m, &cfg.metric_config(bundle.id(), m), cfg.repetitions))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProjectRow {
        project: bundle.id().to_string(),
        reports,
    })
}

fn fault_pairs(bundle: &ProjectBundle) -> Result<Vec<SuitePair>> {
    bundle.faults().iter().map(|f| real_fault_pair(f, bundle.pool())).collect()
}

fn check_unique_projects(bundles: &[ProjectBundle]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for b in bundles {
        if !seen.insert(b.id()) {
            return Err(Error::input(format!("project `{}` given twice", b.id())));
        }
    }
    Ok(())
}

fn assemble<F>(bundles: &[ProjectBundle], cfg: &RunConfig, pairs_for: F) -> Result<OpTable>
where
    F: Fn(&ProjectBundle) -> Result<Option<Vec<SuitePair>>> + Sync,
{
    cfg.validate()?;
    check_unique_projects(bundles)?;
    let rows: Vec<Option<ProjectRow>> = bundles
        .par_iter()
        .map(|b| match pairs_for(b)? {
            Some(pairs) => evaluate_bundle(b, &pairs, cfg).map(Some),
            None => Ok(None),
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<ProjectRow> = rows.into_iter().flatten().collect();
    rows.sort_by(|a, b| a.project.cmp(&b.project));
    Ok(OpTable {
        ground_truth: cfg.ground_truth,
        pairs: cfg.pairs,
        metrics: cfg.metrics.clone(),
        rows,
    })
}

fn per_fault_or_skip(bundle: &ProjectBundle) -> Result<Option<Vec<SuitePair>>> {
    if bundle.faults().is_empty() {
        log::warn!("project `{}` has no faults; skipped", bundle.id());
        return Ok(None);
    }
    fault_pairs(bundle).map(Some)
}

/// Real-fault ground truth, one pair per fault.
pub fn run_rq1(bundles: &[ProjectBundle], cfg: &RunConfig) -> Result<OpTable> {
    if cfg.ground_truth != GroundTruth::Real || cfg.pairs != PairProtocol::PerFault {
        return Err(Error::config("this protocol needs --ground-truth real --pairs per-fault"));
    }
    assemble(bundles, cfg, per_fault_or_skip)
}

/// The per-fault pairs again, relabelled by the mutant-based ground truth.
pub fn run_rq2(bundles: &[ProjectBundle], cfg: &RunConfig) -> Result<OpTable> {
    if cfg.ground_truth != GroundTruth::Mutant || cfg.pairs != PairProtocol::PerFault {
        return Err(Error::config("this protocol needs --ground-truth mutant --pairs per-fault"));
    }
    assemble(bundles, cfg, |b| {
        per_fault_or_skip(b)?
            .map(|pairs| pairs.iter().map(|p| p.relabeled_alternative(b.kill())).collect::<Result<Vec<_>>>())
            .transpose()
    })
}

/// Random k-vs-(k−1) subset pairs labelled by the mutant-based ground truth.
pub fn run_discussion(bundles: &[ProjectBundle], cfg: &RunConfig) -> Result<OpTable> {
    let PairProtocol::Random { count } = cfg.pairs else {
        return Err(Error::config("this protocol needs --pairs random:N"));
    };
    if cfg.ground_truth != GroundTruth::Mutant {
        return Err(Error::config("random-subset pairs need --ground-truth mutant"));
    }
    assemble(bundles, cfg, |b| {
        let mut rng = rng_from_seed(cfg.pair_seed(b.id()));
        random_subset_suite_pairs(b.kill(), count, &mut rng)
            .map(Some)
            .map_err(|e| Error::input(format!("project `{}`: {e}", b.id())))
    })
}

/// Change rate of every cell of `table` against the real-fault `baseline`.
pub fn change_rates(table: &OpTable, baseline: Option<&Baseline>) -> Result<ChangeRateTable> {
    let baseline = baseline.ok_or_else(|| Error::input("change rates need a real-fault OP table to compare with"))?;
    let lookup = |project: &str, metric: Metric| -> Result<&BigRational> {
        baseline
            .values
            .get(project)
            .and_then(|cells| cells.get(metric.name()))
            .ok_or_else(|| Error::input(format!("comparison table has no {metric} value for project `{project}`")))
    };
    let rate = |alt: &BigRational, real: &BigRational| {
        if real.is_zero() {
            None
        } else {
            change_rate(alt, real).ok()
        }
    };
    let mut rows = Vec::with_capacity(table.rows.len());
    let mut real_sums = vec![BigRational::zero(); table.metrics.len()];
    for row in &table.rows {
        let mut cells = Vec::with_capacity(table.metrics.len());
        for (j, (metric, report)) in table.metrics.iter().zip(&row.reports).enumerate() {
            let real = lookup(&row.project, *metric)?;
            real_sums[j] += real;
            cells.push(rate(&op_rational(report), real));
        }
        rows.push((row.project.clone(), cells));
    }
    let n = BigRational::from_integer(BigInt::from(table.rows.len().max(1)));
    let average = (0..table.metrics.len())
        .map(|j| table.average(j).and_then(|alt| rate(&alt, &(real_sums[j].clone() / n.clone()))))
        .collect();
    Ok(ChangeRateTable {
        metrics: table.metrics.clone(),
        rows,
        average,
    })
}

/// Dispatches on the ground truth and pair protocol of `cfg`.
pub fn evaluate(bundles: &[ProjectBundle], cfg: &RunConfig, baseline: Option<&Baseline>) -> Result<Evaluation> {
    cfg.validate()?;
    let table = match (cfg.ground_truth, cfg.pairs) {
        (GroundTruth::Real, _) => run_rq1(bundles, cfg)?,
        (GroundTruth::Mutant, PairProtocol::PerFault) => run_rq2(bundles, cfg)?,
        (GroundTruth::Mutant, PairProtocol::Random { .. }) => run_discussion(bundles, cfg)?,
    };
    let change_rates = match baseline {
        Some(_) if cfg.ground_truth == GroundTruth::Mutant => Some(change_rates(&table, baseline)?),
        Some(_) => return Err(Error::config("change rates compare a mutant-ground-truth run with a real one")),
        None => None,
    };
    Ok(Evaluation {
        config: cfg.clone(),
        table,
        change_rates,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapOutcome {
    /// Per metric, per fault (qualified `project/fault`): share of repetitions
    /// in which the fault's pair was preserved.
    pub fractions: Vec<BTreeMap<FaultId, f64>>,
    pub report: OverlapReport,
}

/// Which real faults each metric considers, and the region decomposition.
///
/// Stochastic metrics are dropped unless `include_stochastic` is set, in which
/// case a fault counts as considered when preserved in at least half of the
/// repetitions.
pub fn run_overlap(
    bundles: &[ProjectBundle],
    cfg: &RunConfig,
    include_stochastic: bool,
) -> Result<OverlapOutcome> {
    let mut cfg = cfg.clone();
    if !include_stochastic {
        let dropped: Vec<&str> = cfg.metrics.iter().filter(|m| m.is_stochastic()).map(|m| m.name()).collect();
        if !dropped.is_empty() {
            log::warn!("stochastic metrics {} left out of the overlap regions", dropped.join(","));
        }
        cfg.metrics.retain(|m| !m.is_stochastic());
    }
    cfg.ground_truth = GroundTruth::Real;
    cfg.pairs = PairProtocol::PerFault;
    let table = run_rq1(bundles, &cfg)?;

    let qualify = |project: &str, fault: &FaultId| FaultId::new(format!("{project}/{fault}"));
    let mut fractions = vec![BTreeMap::new(); cfg.metrics.len()];
    let mut all = BTreeSet::new();
    for row in &table.rows {
        for (j, report) in row.reports.iter().enumerate() {
            for (fault, f) in report.consideration()? {
                let id = qualify(&row.project, &fault)?;
                all.insert(id.clone());
                fractions[j].insert(id, f);
            }
        }
    }
    let names: Vec<String> = cfg.metrics.iter().map(|m| m.name().to_string()).collect();
    let sets: Vec<BTreeSet<FaultId>> = fractions.iter().map(crisp).collect();
    Ok(OverlapOutcome {
        report: overlap_report(&names, &sets, &all)?,
        fractions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::parse_decimal;
    use crate::synth::{generate, generate_named, SynthSpec};

    fn spec(seed: u64, op: f64) -> SynthSpec {
        SynthSpec {
            seed,
            planted_ms_op: op,
            ..SynthSpec::default()
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig {
            ground_truth: GroundTruth::Mutant,
            ..RunConfig::default()
        };
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 3);
        cfg.metrics.retain(|&m| m != Metric::Ms);
        cfg.validate().unwrap();
        cfg.rms_percent = 0;
        assert!(cfg.validate().is_err());
        assert_eq!("random:100".parse::<PairProtocol>().unwrap(), PairProtocol::Random { count: 100 });
        assert!("random:0".parse::<PairProtocol>().is_err());
        assert_eq!(PairProtocol::Random { count: 7 }.to_string(), "random:7");
    }

    #[test]
    fn rq1_planted_and_ms_equals_sms() {
        let b = generate(&spec(11, 0.75)).unwrap();
        let t = run_rq1(&[b], &RunConfig::default()).unwrap();
        let ms = &t.rows[0].reports[0];
        assert_eq!(ms.metric, Metric::Ms);
        assert_eq!(ms.op_fraction(), (6, 8));
        assert_eq!(op_rational(ms), op_rational(&t.rows[0].reports[3]));
        // single project: average equals the row
        assert_eq!(t.average(0).unwrap(), op_rational(ms));
    }

    #[test]
    fn rq1_skips_faultless_bundles_and_sorts() {
        let g = generate(&spec(2, 0.5)).unwrap();
        let empty = ProjectBundle::new("empty", g.kill().clone(), g.statements().clone(), g.branches().clone(), vec![])
            .unwrap();
        let bundles = vec![
            generate_named(&spec(1, 0.5), "zeta").unwrap(),
            empty,
            generate_named(&spec(3, 0.25), "alpha").unwrap(),
        ];
        let t = run_rq1(&bundles, &RunConfig::default()).unwrap();
        let names: Vec<_> = t.rows.iter().map(|r| r.project.as_str()).collect();
        assert_eq!(names, ["alpha", "zeta"]);
        let avg = t.average(0).unwrap();
        assert_eq!(avg, parse_decimal("0.375").unwrap());
    }

    #[test]
    fn rq2_relabels_the_same_pairs() {
        let b = generate(&spec(5, 0.5)).unwrap();
        let cfg = RunConfig {
            ground_truth: GroundTruth::Mutant,
            metrics: vec![Metric::Sms, Metric::Sc],
            ..RunConfig::default()
        };
        let t = run_rq2(std::slice::from_ref(&b), &cfg).unwrap();
        let sms = &t.rows[0].reports[0];
        assert_eq!(sms.preserved_sum as usize, sms.p);
        let real = fault_pairs(&b).unwrap();
        let ids: Vec<_> = sms.per_pair.iter().map(|o| o.pair_id.clone()).collect();
        assert_eq!(ids, real.iter().map(|p| p.pair_id.clone()).collect::<Vec<_>>());
    }

    #[test]
    fn change_rate_table() {
        let b = generate(&spec(5, 0.5)).unwrap();
        let real = run_rq1(std::slice::from_ref(&b), &RunConfig {
            metrics: vec![Metric::Sms, Metric::Cos],
            ..RunConfig::default()
        })
        .unwrap();
        let cfg = RunConfig {
            ground_truth: GroundTruth::Mutant,
            metrics: vec![Metric::Sms, Metric::Cos],
            ..RunConfig::default()
        };
        let alt = run_rq2(std::slice::from_ref(&b), &cfg).unwrap();
        assert!(change_rates(&alt, None).is_err());
        let rates = change_rates(&alt, Some(&real.baseline())).unwrap();
        // real SMS OP is 4/8, alternative is 1 → +100%
        assert_eq!(rates.rows[0].1[0].unwrap().to_string(), "+100%");
        assert_eq!(rates.average[0], rates.rows[0].1[0]);

        let mut missing = real.baseline();
        missing.values.clear();
        assert!(change_rates(&alt, Some(&missing)).is_err());
    }

    #[test]
    fn discussion_full_rms_is_perfect() {
        let b = generate(&spec(9, 0.5)).unwrap();
        let cfg = RunConfig {
            ground_truth: GroundTruth::Mutant,
            pairs: PairProtocol::Random { count: 100 },
            metrics: vec![Metric::Rms],
            rms_percent: 100,
            repetitions: 3,
            ..RunConfig::default()
        };
        let t = run_discussion(std::slice::from_ref(&b), &cfg).unwrap();
        for r in &t.rows[0].reports {
            assert_eq!(r.p, 100);
            assert_eq!(r.preserved_sum, r.repetitions as u64 * 100, "{}", r.metric);
        }
        assert_eq!(t, run_discussion(&[b], &cfg).unwrap());
    }

    #[test]
    fn discussion_all_ties_matches_direct_comparison() {
        // no killable mutant at all: every pair is AsEffective under the mutant ground truth
        let s = SynthSpec {
            seed: 4,
            base_kill_prob: 0.0,
            planted_ms_op: 0.0,
            ..SynthSpec::default()
        };
        let b = generate(&s).unwrap();
        let cfg = RunConfig {
            ground_truth: GroundTruth::Mutant,
            pairs: PairProtocol::Random { count: 50 },
            metrics: vec![Metric::Sc, Metric::Bc],
            ..RunConfig::default()
        };
        let t = run_discussion(std::slice::from_ref(&b), &cfg).unwrap();
        let mut rng = rng_from_seed(cfg.pair_seed(b.id()));
        let pairs = random_subset_suite_pairs(b.kill(), 50, &mut rng).unwrap();
        for (j, cov) in [b.statements(), b.branches()].into_iter().enumerate() {
            let ties = pairs
                .iter()
                .filter(|p| cov.covered_count(&p.x) == cov.covered_count(&p.y))
                .count();
            assert_eq!(t.rows[0].reports[j].preserved_sum as usize, ties);
        }
    }

    #[test]
    fn overlap_drops_stochastic_by_default() {
        let b = generate(&spec(8, 0.5)).unwrap();
        let cfg = RunConfig {
            metrics: vec![Metric::Ms, Metric::Rms, Metric::Sc],
            ..RunConfig::default()
        };
        let o = run_overlap(std::slice::from_ref(&b), &cfg, false).unwrap();
        assert_eq!(o.report.metrics, ["MS", "SC"]);
        assert_eq!(o.report.total, 8);
        assert_eq!(o.report.metric_total(0), 4);
        let with = run_overlap(&[b], &cfg, true).unwrap();
        assert_eq!(with.report.metrics.len(), 3);
    }
}
