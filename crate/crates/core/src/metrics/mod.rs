//! The seven metrics to evaluate: MS, COS, RMS, SMS, CMS (mutation-score
//! family, over the kill matrix) and SC, BC (coverage family).
//!
//! Every mutation-score metric is "mutation score over a mutant selection".
//! Stochastic metrics draw their selection from a caller-owned RNG; scoring a
//! suite against an already drawn selection is deterministic, which is how
//! pairs share one selection.

mod kmeans;
mod subsumption;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CoverageKind, CoverageMatrix, KillMatrix, MutantId, ProjectBundle, Score, Suite};
use crate::rng::Rng;

pub use kmeans::{kmeans, objective as kmeans_objective, KMeansOutcome};
pub use subsumption::{mutual_groups, subsuming_set};

pub const DEFAULT_COS_OPERATORS: [&str; 5] = ["LVR", "AOR", "ROR", "LOR", "ORU"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub cos_operators: BTreeSet<String>,
    pub rms_percent: u32,
    /// Base seed for the per-repetition selections of RMS and CMS.
    pub selection_seed: u64,
    pub kmeans_max_iters: usize,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            cos_operators: DEFAULT_COS_OPERATORS.iter().map(|s| s.to_string()).collect(),
            rms_percent: 30,
            selection_seed: 0,
            kmeans_max_iters: 100,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rms_percent == 0 || self.rms_percent > 100 {
            return Err(Error::config(format!(
                "RMS percent must be in (0, 100], got {}",
                self.rms_percent
            )));
        }
        if self.cos_operators.is_empty() {
            return Err(Error::config("COS operator allowlist is empty"));
        }
        if self.kmeans_max_iters == 0 {
            return Err(Error::config("k-means iteration cap must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Ms,
    Cos,
    Rms,
    Sms,
    Cms,
    Sc,
    Bc,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Ms,
        Metric::Cos,
        Metric::Rms,
        Metric::Sms,
        Metric::Cms,
        Metric::Sc,
        Metric::Bc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Ms => "MS",
            Metric::Cos => "COS",
            Metric::Rms => "RMS",
            Metric::Sms => "SMS",
            Metric::Cms => "CMS",
            Metric::Sc => "SC",
            Metric::Bc => "BC",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Metric::Rms | Metric::Cms)
    }

    /// Draws whatever the metric needs before suites can be scored.
    pub fn prepare(&self, bundle: &ProjectBundle, config: &MetricConfig, rng: &mut Rng) -> Result<Prepared> {
        let kill = bundle.kill();
        let prepared = match self {
            Metric::Ms => Prepared::Mutants(MutantSelection::all(kill.num_mutants())),
            Metric::Cos => Prepared::Mutants(cos_select(kill, &config.cos_operators)?),
            Metric::Rms => Prepared::Mutants(rms_select(kill, config.rms_percent, rng)?),
            Metric::Sms => Prepared::Mutants(subsuming_set(kill)),
            Metric::Cms => Prepared::Mutants(cms_select(kill, config.kmeans_max_iters, rng)?),
            Metric::Sc => Prepared::Coverage(CoverageKind::Statement),
            Metric::Bc => Prepared::Coverage(CoverageKind::Branch),
        };
        if let Prepared::Mutants(sel) = &prepared {
            if sel.is_empty() {
                return Err(Error::config(format!(
                    "{} selects no mutants in project `{}`",
                    self.name(),
                    bundle.id()
                )));
            }
        }
        Ok(prepared)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::config(format!("unknown metric `{s}`")))
    }
}

/// A set of mutant positions in a kill matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutantSelection(FixedBitSet);

impl MutantSelection {
    pub fn all(num_mutants: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(num_mutants);
        bits.insert_range(..);
        MutantSelection(bits)
    }

    pub fn from_bits(bits: FixedBitSet) -> Self {
        MutantSelection(bits)
    }

    pub fn from_indices(num_mutants: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = FixedBitSet::with_capacity(num_mutants);
        indices.into_iter().for_each(|i| bits.insert(i));
        MutantSelection(bits)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, mutant: usize) -> bool {
        self.0.contains(mutant)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn ids(&self, kill: &KillMatrix) -> BTreeSet<MutantId> {
        self.indices().map(|m| kill.mutants()[m].clone()).collect()
    }

    /// Mutation score of `suite` restricted to this selection.
    pub fn score(&self, kill: &KillMatrix, suite: &Suite) -> Result<Score> {
        let denominator = self.len() as u64;
        if denominator == 0 {
            return Err(Error::config("mutation score over an empty mutant selection"));
        }
        let killed = self.indices().filter(|&m| kill.is_killed_by(m, suite)).count();
        Score::new(killed as u64, denominator)
    }
}

/// Disjoint non-empty clusters of mutant positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutantPartition {
    clusters: Vec<Vec<usize>>,
}

impl MutantPartition {
    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn ids(&self, kill: &KillMatrix) -> Vec<Vec<MutantId>> {
        self.clusters
            .iter()
            .map(|c| c.iter().map(|&m| kill.mutants()[m].clone()).collect())
            .collect()
    }
}

/// A metric with its selection already drawn.
#[derive(Debug, Clone)]
pub enum Prepared {
    Mutants(MutantSelection),
    Coverage(CoverageKind),
}

impl Prepared {
    pub fn score(&self, bundle: &ProjectBundle, suite: &Suite) -> Result<Score> {
        match self {
            Prepared::Mutants(sel) => sel.score(bundle.kill(), suite),
            Prepared::Coverage(kind) => coverage_score(bundle.coverage(*kind), suite),
        }
    }
}

/// `|KM(M,T)| / |M|` over the whole mutant set.
pub fn mutation_score(kill: &KillMatrix, suite: &Suite) -> Result<Score> {
    if kill.num_mutants() == 0 {
        return Err(Error::config("mutation score over an empty mutant set"));
    }
    MutantSelection::all(kill.num_mutants()).score(kill, suite)
}

pub fn cos_select(kill: &KillMatrix, operators: &BTreeSet<String>) -> Result<MutantSelection> {
    let selection = MutantSelection::from_indices(
        kill.num_mutants(),
        (0..kill.num_mutants()).filter(|&m| operators.contains(kill.operator(m))),
    );
    if selection.is_empty() {
        let list: Vec<&str> = operators.iter().map(String::as_str).collect();
        return Err(Error::config(format!(
            "no mutant carries an operator from the COS allowlist {{{}}}",
            list.join(",")
        )));
    }
    Ok(selection)
}

/// Mutation score restricted (numerator and denominator) to mutants whose
/// operator tag is in `operators`.
pub fn cos_score(kill: &KillMatrix, suite: &Suite, operators: &BTreeSet<String>) -> Result<Score> {
    cos_select(kill, operators)?.score(kill, suite)
}

/// Number of mutants RMS keeps: `percent`% of the pool, rounded half up, at least one.
pub fn rms_count(num_mutants: usize, percent: u32) -> usize {
    ((percent as usize * num_mutants + 50) / 100).max(1)
}

/// Uniform sample without replacement of `rms_count` mutants.
pub fn rms_select(kill: &KillMatrix, percent: u32, rng: &mut Rng) -> Result<MutantSelection> {
    if percent == 0 || percent > 100 {
        return Err(Error::config(format!("RMS percent must be in (0, 100], got {percent}")));
    }
    let n = kill.num_mutants();
    if n == 0 {
        return Err(Error::config("RMS over an empty mutant set"));
    }
    let picked = index::sample(rng, n, rms_count(n, percent));
    Ok(MutantSelection::from_indices(n, picked))
}

pub fn rms_score(kill: &KillMatrix, suite: &Suite, percent: u32, rng: &mut Rng) -> Result<Score> {
    rms_select(kill, percent, rng)?.score(kill, suite)
}

pub fn sms_score(kill: &KillMatrix, suite: &Suite) -> Result<Score> {
    let subsuming = subsuming_set(kill);
    if subsuming.is_empty() {
        return Err(Error::config("no killable mutant, subsuming set is empty"));
    }
    subsuming.score(kill, suite)
}

/// k-means over the 0-1 kill vectors of the killable mutants.
pub fn cms_cluster(kill: &KillMatrix, k: usize, max_iters: usize, rng: &mut Rng) -> Result<MutantPartition> {
    let killable: Vec<usize> = (0..kill.num_mutants()).filter(|&m| kill.is_killable(m)).collect();
    if k == 0 || k > killable.len() {
        return Err(Error::input(format!(
            "CMS asked for {k} clusters over {} killable mutants",
            killable.len()
        )));
    }
    let points: Vec<Vec<f64>> = killable
        .iter()
        .map(|&m| {
            (0..kill.num_tests())
                .map(|t| if kill.kills(t, m) { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let outcome = kmeans(&points, k, max_iters, rng)?;
    let mut clusters = vec![Vec::new(); k];
    for (&m, &c) in killable.iter().zip(&outcome.assignment) {
        clusters[c].push(m);
    }
    Ok(MutantPartition { clusters })
}

/// One uniform pick per cluster, with k equal to the subsuming-set size.
pub fn cms_select(kill: &KillMatrix, max_iters: usize, rng: &mut Rng) -> Result<MutantSelection> {
    let k = subsuming_set(kill).len();
    if k == 0 {
        return Err(Error::config("no killable mutant, CMS has no clusters"));
    }
    let partition = cms_cluster(kill, k, max_iters, rng)?;
    let picks: Vec<usize> = partition
        .clusters
        .iter()
        .map(|c| c[rng.gen_range(0..c.len())])
        .collect();
    Ok(MutantSelection::from_indices(kill.num_mutants(), picks))
}

pub fn cms_score(kill: &KillMatrix, suite: &Suite, max_iters: usize, rng: &mut Rng) -> Result<Score> {
    cms_select(kill, max_iters, rng)?.score(kill, suite)
}

/// `|covered requirements| / |requirements|`.
pub fn coverage_score(coverage: &CoverageMatrix, suite: &Suite) -> Result<Score> {
    if coverage.num_requirements() == 0 {
        return Err(Error::config(format!("{} coverage over zero requirements", coverage.kind())));
    }
    Score::new(coverage.covered_count(suite) as u64, coverage.num_requirements() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RequirementId, TestId};
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    fn tids(n: usize) -> Vec<TestId> {
        (1..=n).map(|i| TestId::new(format!("t{i}")).unwrap()).collect()
    }

    fn mids(n: usize) -> Vec<MutantId> {
        (1..=n).map(|i| MutantId::new(format!("m{i}")).unwrap()).collect()
    }

    fn km(kills: &[Vec<bool>], ops: &[&str]) -> KillMatrix {
        KillMatrix::new(
            tids(kills.len()),
            mids(ops.len()),
            ops.iter().map(|s| s.to_string()).collect(),
            kills,
        )
        .unwrap()
    }

    fn s(n: u64, d: u64) -> Score {
        Score::new(n, d).unwrap()
    }

    fn ops(tags: &[&str]) -> BTreeSet<String> {
        tags.iter().map(|s| s.to_string()).collect()
    }

    /// t1 kills {m1,m2}, t2 kills {m2,m3}, m4 unkilled.
    fn four() -> KillMatrix {
        km(
            &[vec![true, true, false, false], vec![false, true, true, false]],
            &["ROR", "AOR", "STD", "ROR"],
        )
    }

    #[test]
    fn mutation_score_examples() {
        let k = four();
        assert_eq!(mutation_score(&k, &k.suite(["t1"]).unwrap()).unwrap(), s(2, 4));
        let empty = k.suite(Vec::<&str>::new()).unwrap();
        let ms = mutation_score(&k, &empty).unwrap();
        assert_eq!((ms.numerator(), ms.denominator()), (0, 4));
        assert_eq!(mutation_score(&k, &k.pool().full()).unwrap(), s(3, 4));

        let none = KillMatrix::new(tids(1), vec![], vec![], &[vec![]]).unwrap();
        assert!(matches!(mutation_score(&none, &none.pool().full()), Err(Error::Config(_))));
    }

    #[test]
    fn cos_examples() {
        // m1:ROR killed, m2:STD unkilled, m3:ROR unkilled
        let k = km(&[vec![true, false, false]], &["ROR", "STD", "ROR"]);
        let t = k.pool().full();
        assert_eq!(cos_score(&k, &t, &ops(&["ROR"])).unwrap(), s(1, 2));
        assert_eq!(
            cos_score(&k, &t, &ops(&["ROR", "STD"])).unwrap(),
            mutation_score(&k, &t).unwrap()
        );
        let c = cos_score(&k, &t, &ops(&["STD"])).unwrap();
        assert_eq!((c.numerator(), c.denominator()), (0, 1));
        let err = cos_score(&k, &t, &ops(&["LVR", "ORU"])).unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("LVR,ORU")));
        // tags are case-sensitive
        assert!(cos_score(&k, &t, &ops(&["ror"])).is_err());
    }

    #[test]
    fn rms_sizes() {
        let k = km(&[vec![true; 10]], &["A"; 10]);
        let mut rng = rng_from_seed(3);
        assert_eq!(rms_select(&k, 30, &mut rng).unwrap().len(), 3);
        assert_eq!(rms_select(&k, 100, &mut rng).unwrap().len(), 10);
        assert_eq!(rms_count(10, 1), 1);
        assert_eq!(rms_count(10, 25), 3); // 2.5 rounds up
        assert_eq!(rms_count(10, 24), 2);
        assert!(rms_select(&k, 0, &mut rng).is_err());
        assert!(rms_select(&k, 101, &mut rng).is_err());
    }

    #[test]
    fn rms_inclusion_frequency_is_uniform() {
        // Each mutant of a uniform 3-of-10 sample is included with probability 0.3.
        let k = km(&[vec![true; 10]], &["A"; 10]);
        let mut rng = rng_from_seed(2024);
        let mut hits = [0u32; 10];
        let trials = 10_000;
        for _ in 0..trials {
            for m in rms_select(&k, 30, &mut rng).unwrap().indices() {
                hits[m] += 1;
            }
        }
        for (m, &h) in hits.iter().enumerate() {
            let freq = h as f64 / trials as f64;
            assert!((freq - 0.3).abs() <= 0.02, "mutant {m}: {freq}");
        }
    }

    #[test]
    fn rms_score_examples() {
        let k = four();
        let t = k.suite(["t1"]).unwrap();
        assert_eq!(
            rms_score(&k, &t, 100, &mut rng_from_seed(1)).unwrap(),
            mutation_score(&k, &t).unwrap()
        );
        // selection {m1, m3}: t1 kills m1 only
        let sel = MutantSelection::from_indices(4, [0, 2]);
        assert_eq!(sel.score(&k, &t).unwrap(), s(1, 2));
        let a = rms_score(&k, &t, 50, &mut rng_from_seed(77)).unwrap();
        let b = rms_score(&k, &t, 50, &mut rng_from_seed(77)).unwrap();
        assert_eq!((a.numerator(), a.denominator()), (b.numerator(), b.denominator()));
    }

    fn subsumption_example() -> KillMatrix {
        // Kset(m1)={t1}, Kset(m2)={t1,t2}, Kset(m3)={t2}, Kset(m4)=∅
        km(
            &[vec![true, true, false, false], vec![false, true, true, false]],
            &["A"; 4],
        )
    }

    #[test]
    fn sms_examples() {
        let k = subsumption_example();
        assert_eq!(sms_score(&k, &k.suite(["t1"]).unwrap()).unwrap(), s(1, 2));
        assert!(sms_score(&k, &k.pool().full()).unwrap().is_one());
        let zero = sms_score(&k, &k.pool().empty_suite()).unwrap();
        assert_eq!((zero.numerator(), zero.denominator()), (0, 2));

        let dead = km(&[vec![false, false]], &["A"; 2]);
        assert!(matches!(sms_score(&dead, &dead.pool().full()), Err(Error::Config(_))));
    }

    #[test]
    fn sms_can_disagree_with_ms_when_the_larger_suite_is_partial() {
        // Kset(m1)={t1,t2}, Kset(m2)={t2}: m2 is the only subsuming mutant.
        let k = km(&[vec![true, false], vec![true, true]], &["A"; 2]);
        let t1 = k.suite(["t1"]).unwrap();
        let t2 = k.pool().empty_suite();
        assert!(mutation_score(&k, &t1).unwrap() > mutation_score(&k, &t2).unwrap());
        assert_eq!(sms_score(&k, &t1).unwrap(), sms_score(&k, &t2).unwrap());
    }

    #[test]
    fn cms_examples() {
        // two identical kill vectors, k=1
        let k = km(&[vec![true, true]], &["A"; 2]);
        let p = cms_cluster(&k, 1, 100, &mut rng_from_seed(0)).unwrap();
        assert_eq!(p.clusters(), &[vec![0, 1]]);

        // [1,0],[1,0],[0,1] with k=2
        let k = km(&[vec![true, true, false], vec![false, false, true]], &["A"; 3]);
        let mut p = cms_cluster(&k, 2, 100, &mut rng_from_seed(5)).unwrap().clusters().to_vec();
        p.sort();
        assert_eq!(p, vec![vec![0, 1], vec![2]]);

        assert!(matches!(cms_cluster(&k, 4, 100, &mut rng_from_seed(0)), Err(Error::Input(_))));

        // k = killable count: singletons; CMS then scores over every killable mutant
        let k = subsumption_example();
        let p = cms_cluster(&k, 3, 100, &mut rng_from_seed(1)).unwrap();
        assert!(p.clusters().iter().all(|c| c.len() == 1));
        let t = k.suite(["t1"]).unwrap();
        let a = cms_score(&k, &t, 100, &mut rng_from_seed(8)).unwrap();
        let b = cms_score(&k, &t, 100, &mut rng_from_seed(8)).unwrap();
        assert_eq!((a.numerator(), a.denominator()), (b.numerator(), b.denominator()));
        assert!(cms_score(&k, &k.pool().full(), 100, &mut rng_from_seed(2)).unwrap().is_one());
    }

    #[test]
    fn cms_singleton_clusters_are_not_random() {
        // Every killable mutant has a distinct killer set and all are subsuming.
        let k = km(
            &[vec![true, false, false, false], vec![false, true, false, false], vec![false, false, true, false]],
            &["A"; 4],
        );
        let t = k.suite(["t1", "t3"]).unwrap();
        for seed in 0..10 {
            assert_eq!(cms_score(&k, &t, 100, &mut rng_from_seed(seed)).unwrap(), s(2, 3));
        }
    }

    #[test]
    fn coverage_examples() {
        let c = CoverageMatrix::new(
            tids(2),
            (1..=3).map(|i| RequirementId::new(format!("s{i}")).unwrap()).collect(),
            CoverageKind::Statement,
            &[vec![true, false, false], vec![false, true, true]],
        )
        .unwrap();
        assert_eq!(coverage_score(&c, &c.suite(["t1", "t2"]).unwrap()).unwrap(), s(1, 1));
        assert_eq!(coverage_score(&c, &c.pool().empty_suite()).unwrap(), s(0, 3));
        let partial = CoverageMatrix::new(
            tids(1),
            (1..=3).map(|i| RequirementId::new(format!("s{i}")).unwrap()).collect(),
            CoverageKind::Statement,
            &[vec![true, true, false]],
        )
        .unwrap();
        assert_eq!(coverage_score(&partial, &partial.pool().full()).unwrap(), s(2, 3));
    }

    #[test]
    fn metric_names_parse() {
        for m in Metric::ALL {
            assert_eq!(m.name().to_lowercase().parse::<Metric>().unwrap(), m);
        }
        assert!("xyz".parse::<Metric>().is_err());
    }

    proptest! {
        #[test]
        fn identity_reductions(
            (tests, mutants, cells, suite_bits, seed) in (1usize..8, 1usize..15)
                .prop_flat_map(|(t, m)| (Just(t), Just(m),
                    proptest::collection::vec(any::<bool>(), t * m),
                    proptest::collection::vec(any::<bool>(), t), any::<u64>()))
        ) {
            let kills: Vec<Vec<bool>> = cells.chunks(mutants).map(|c| c.to_vec()).collect();
            let tags = ["ROR", "AOR", "STD"];
            let op_tags: Vec<&str> = (0..mutants).map(|m| tags[m % 3]).collect();
            let k = km(&kills, &op_tags);
            let t = Suite::from_indices(tests, (0..tests).filter(|&i| suite_bits[i]));
            let ms = mutation_score(&k, &t).unwrap();
            prop_assert_eq!(rms_score(&k, &t, 100, &mut rng_from_seed(seed)).unwrap(), ms);
            let all: BTreeSet<String> = op_tags.iter().map(|s| s.to_string()).collect();
            prop_assert_eq!(cos_score(&k, &t, &all).unwrap(), ms);
        }
    }
}
