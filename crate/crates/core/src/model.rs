//! Validated data substrate: identifiers, exact scores, test pools and
//! suites, kill and coverage matrices, fault manifests.
//!
//! Everything here is immutable once constructed. Matrices are stored
//! column-wise as bitsets over the test pool, so "does suite T kill mutant m"
//! is a single bitset intersection test.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident, $what:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Result<Self> {
                let id = id.into();
                if id.is_empty() {
                    return Err(Error::input(concat!("empty ", $what, " id")));
                }
                Ok(Self(id))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = Error;
            fn try_from(s: String) -> Result<Self> {
                Self::new(s)
            }
        }

        impl TryFrom<&str> for $name {
            type Error = Error;
            fn try_from(s: &str) -> Result<Self> {
                Self::new(s)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

string_id!(
    /// Identifier of one test case in a project's test pool.
    TestId,
    "test"
);
string_id!(
    /// Identifier of one mutant.
    MutantId,
    "mutant"
);
string_id!(
    /// Identifier of one coverage requirement (statement or branch).
    RequirementId,
    "requirement"
);
string_id!(
    /// Identifier of one real fault.
    FaultId,
    "fault"
);

/// An exact fraction `numerator / denominator` with `0 <= numerator <= denominator`.
///
/// Equality and ordering are decided by cross-multiplication, so `2/4 == 1/2`
/// and no floating-point rounding ever creates or destroys a tie.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Score {
    numerator: u64,
    denominator: u64,
}

impl Score {
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::config("score with zero denominator"));
        }
        if numerator > denominator {
            return Err(Error::input(format!(
                "score numerator {numerator} exceeds denominator {denominator}"
            )));
        }
        Ok(Score {
            numerator,
            denominator,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    pub fn is_one(&self) -> bool {
        self.numerator == self.denominator
    }
}

impl PartialEq for Score {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Score {}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        // u64 * u64 always fits in u128.
        let lhs = self.numerator as u128 * other.denominator as u128;
        let rhs = other.numerator as u128 * self.denominator as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// The ordered test universe of one project.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestPool {
    ids: Vec<TestId>,
    index: HashMap<TestId, usize>,
}

impl TestPool {
    pub fn new(ids: Vec<TestId>) -> Result<Self> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate test id `{id}`")));
            }
        }
        Ok(TestPool { ids, index })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[TestId] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Resolves test ids into a suite; unknown ids are an input error.
    pub fn suite<I, S>(&self, ids: I) -> Result<Suite>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut suite = Suite::empty(self.len());
        for id in ids {
            let id = id.as_ref();
            let i = self
                .index_of(id)
                .ok_or_else(|| Error::input(format!("unknown test id `{id}`")))?;
            suite.insert(i);
        }
        Ok(suite)
    }

    pub fn full(&self) -> Suite {
        Suite::full(self.len())
    }

    pub fn empty_suite(&self) -> Suite {
        Suite::empty(self.len())
    }

    /// Test ids of a suite, in pool order.
    pub fn ids_of<'a>(&'a self, suite: &'a Suite) -> impl Iterator<Item = &'a TestId> + 'a {
        suite.indices().map(move |i| &self.ids[i])
    }
}

/// A subset of a project's test pool, stored as a bitset over pool positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Suite(FixedBitSet);

impl Suite {
    pub fn empty(pool_size: usize) -> Self {
        Suite(FixedBitSet::with_capacity(pool_size))
    }

    pub fn full(pool_size: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(pool_size);
        bits.insert_range(..);
        Suite(bits)
    }

    pub fn from_indices(pool_size: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut suite = Self::empty(pool_size);
        for i in indices {
            suite.insert(i);
        }
        suite
    }

    pub fn insert(&mut self, test: usize) {
        self.0.insert(test);
    }

    pub fn remove(&mut self, test: usize) {
        self.0.set(test, false);
    }

    pub fn contains(&self, test: usize) -> bool {
        self.0.contains(test)
    }

    /// Size of the underlying pool.
    pub fn pool_size(&self) -> usize {
        self.0.len()
    }

    /// Number of tests in the suite.
    pub fn size(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn is_subset(&self, other: &Suite) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn difference(&self, other: &Suite) -> Suite {
        let mut bits = self.0.clone();
        bits.difference_with(&other.0);
        Suite(bits)
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.0
    }
}

fn check_unique<T: Borrow<str> + fmt::Display>(ids: &[T], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.borrow()) {
            return Err(Error::input(format!("duplicate {what} id `{id}`")));
        }
    }
    Ok(())
}

/// Which tests kill which mutants, plus the operator tag of every mutant.
#[derive(Debug, Clone)]
pub struct KillMatrix {
    pool: TestPool,
    mutants: Vec<MutantId>,
    operators: Vec<String>,
    /// One bitset of killing tests per mutant.
    killers: Vec<FixedBitSet>,
}

impl KillMatrix {
    /// `kills[t][m]` is true when test `t` kills mutant `m`.
    pub fn new(
        tests: Vec<TestId>,
        mutants: Vec<MutantId>,
        operators: Vec<String>,
        kills: &[Vec<bool>],
    ) -> Result<Self> {
        let pool = TestPool::new(tests)?;
        check_unique(&mutants, "mutant")?;
        if operators.len() != mutants.len() {
            return Err(Error::input(format!(
                "{} operator tags for {} mutants",
                operators.len(),
                mutants.len()
            )));
        }
        if let Some(i) = operators.iter().position(|op| op.is_empty()) {
            return Err(Error::input(format!("mutant `{}` has an empty operator tag", mutants[i])));
        }
        if kills.len() != pool.len() {
            return Err(Error::input(format!(
                "kill matrix has {} rows for {} tests",
                kills.len(),
                pool.len()
            )));
        }
        let mut killers = vec![FixedBitSet::with_capacity(pool.len()); mutants.len()];
        for (t, row) in kills.iter().enumerate() {
            if row.len() != mutants.len() {
                return Err(Error::input(format!(
                    "kill row for test `{}` has {} cells, expected {}",
                    pool.ids()[t],
                    row.len(),
                    mutants.len()
                )));
            }
            for (m, &killed) in row.iter().enumerate() {
                if killed {
                    killers[m].insert(t);
                }
            }
        }
        Ok(KillMatrix {
            pool,
            mutants,
            operators,
            killers,
        })
    }

    pub fn pool(&self) -> &TestPool {
        &self.pool
    }

    pub fn tests(&self) -> &[TestId] {
        self.pool.ids()
    }

    pub fn mutants(&self) -> &[MutantId] {
        &self.mutants
    }

    pub fn num_tests(&self) -> usize {
        self.pool.len()
    }

    pub fn num_mutants(&self) -> usize {
        self.mutants.len()
    }

    pub fn operator(&self, mutant: usize) -> &str {
        &self.operators[mutant]
    }

    pub fn operators(&self) -> &[String] {
        &self.operators
    }

    pub fn mutant_index(&self, id: &str) -> Option<usize> {
        self.mutants.iter().position(|m| m.as_str() == id)
    }

    pub fn kills(&self, test: usize, mutant: usize) -> bool {
        self.killers[mutant].contains(test)
    }

    /// Tests that kill `mutant`, over the whole pool.
    pub fn killers(&self, mutant: usize) -> &FixedBitSet {
        &self.killers[mutant]
    }

    pub fn is_killable(&self, mutant: usize) -> bool {
        !self.killers[mutant].is_clear()
    }

    pub fn is_killed_by(&self, mutant: usize, suite: &Suite) -> bool {
        assert_eq!(suite.pool_size(), self.num_tests(), "suite built for another pool");
        !self.killers[mutant].is_disjoint(suite.bits())
    }

    /// Mutant positions killed by `suite`, in matrix order.
    pub fn killed_indices<'a>(&'a self, suite: &'a Suite) -> impl Iterator<Item = usize> + 'a {
        (0..self.num_mutants()).filter(move |&m| self.is_killed_by(m, suite))
    }

    /// `{ m | some t in suite kills m }`.
    pub fn killed_set(&self, suite: &Suite) -> BTreeSet<MutantId> {
        self.killed_indices(suite)
            .map(|m| self.mutants[m].clone())
            .collect()
    }

    /// Resolves test ids against this matrix's pool.
    pub fn suite<I, S>(&self, ids: I) -> Result<Suite>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.pool.suite(ids)
    }

    /// Row view `[test][mutant]`, used by writers.
    pub fn rows(&self) -> Vec<Vec<bool>> {
        (0..self.num_tests())
            .map(|t| (0..self.num_mutants()).map(|m| self.kills(t, m)).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverageKind {
    Statement,
    Branch,
}

impl fmt::Display for CoverageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverageKind::Statement => f.write_str("statement"),
            CoverageKind::Branch => f.write_str("branch"),
        }
    }
}

/// Which tests cover which requirements (statements or branches).
#[derive(Debug, Clone)]
pub struct CoverageMatrix {
    pool: TestPool,
    requirements: Vec<RequirementId>,
    kind: CoverageKind,
    /// One bitset of covering tests per requirement.
    coverers: Vec<FixedBitSet>,
}

impl CoverageMatrix {
    /// `covered[t][r]` is true when test `t` covers requirement `r`.
    pub fn new(
        tests: Vec<TestId>,
        requirements: Vec<RequirementId>,
        kind: CoverageKind,
        covered: &[Vec<bool>],
    ) -> Result<Self> {
        let pool = TestPool::new(tests)?;
        check_unique(&requirements, "requirement")?;
        if covered.len() != pool.len() {
            return Err(Error::input(format!(
                "{kind} coverage matrix has {} rows for {} tests",
                covered.len(),
                pool.len()
            )));
        }
        let mut coverers = vec![FixedBitSet::with_capacity(pool.len()); requirements.len()];
        for (t, row) in covered.iter().enumerate() {
            if row.len() != requirements.len() {
                return Err(Error::input(format!(
                    "{kind} coverage row for test `{}` has {} cells, expected {}",
                    pool.ids()[t],
                    row.len(),
                    requirements.len()
                )));
            }
            for (r, &hit) in row.iter().enumerate() {
                if hit {
                    coverers[r].insert(t);
                }
            }
        }
        Ok(CoverageMatrix {
            pool,
            requirements,
            kind,
            coverers,
        })
    }

    pub fn pool(&self) -> &TestPool {
        &self.pool
    }

    pub fn tests(&self) -> &[TestId] {
        self.pool.ids()
    }

    pub fn requirements(&self) -> &[RequirementId] {
        &self.requirements
    }

    pub fn kind(&self) -> CoverageKind {
        self.kind
    }

    pub fn num_requirements(&self) -> usize {
        self.requirements.len()
    }

    pub fn covers(&self, test: usize, requirement: usize) -> bool {
        self.coverers[requirement].contains(test)
    }

    pub fn is_covered_by(&self, requirement: usize, suite: &Suite) -> bool {
        assert_eq!(suite.pool_size(), self.pool.len(), "suite built for another pool");
        !self.coverers[requirement].is_disjoint(suite.bits())
    }

    pub fn covered_count(&self, suite: &Suite) -> usize {
        (0..self.num_requirements())
            .filter(|&r| self.is_covered_by(r, suite))
            .count()
    }

    /// Union of the requirements covered by each test of `suite`.
    pub fn covered_set(&self, suite: &Suite) -> BTreeSet<RequirementId> {
        (0..self.num_requirements())
            .filter(|&r| self.is_covered_by(r, suite))
            .map(|r| self.requirements[r].clone())
            .collect()
    }

    pub fn suite<I, S>(&self, ids: I) -> Result<Suite>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.pool.suite(ids)
    }

    /// Reorders the rows to follow `pool`. The two test id sets must be identical.
    pub fn aligned_to(&self, pool: &TestPool) -> Result<CoverageMatrix> {
        if let Some(missing) = pool.ids().iter().find(|id| !self.pool.contains(id.as_str())) {
            return Err(Error::input(format!(
                "test `{missing}` is absent from the {} coverage matrix",
                self.kind
            )));
        }
        if let Some(extra) = self.pool.ids().iter().find(|id| !pool.contains(id.as_str())) {
            return Err(Error::input(format!(
                "{} coverage matrix references unknown test `{extra}`",
                self.kind
            )));
        }
        let rows: Vec<Vec<bool>> = pool
            .ids()
            .iter()
            .map(|id| {
                let t = self.pool.index_of(id.as_str()).expect("checked above");
                (0..self.num_requirements()).map(|r| self.covers(t, r)).collect()
            })
            .collect();
        CoverageMatrix::new(pool.ids().to_vec(), self.requirements.clone(), self.kind, &rows)
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        (0..self.pool.len())
            .map(|t| (0..self.num_requirements()).map(|r| self.covers(t, r)).collect())
            .collect()
    }
}

/// One real fault and the tests that expose it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultCase {
    fault_id: FaultId,
    triggering: BTreeSet<TestId>,
}

impl FaultCase {
    pub fn new(fault_id: FaultId, triggering: BTreeSet<TestId>) -> Result<Self> {
        if triggering.is_empty() {
            return Err(Error::input(format!("fault `{fault_id}` has no triggering test")));
        }
        Ok(FaultCase {
            fault_id,
            triggering,
        })
    }

    pub fn fault_id(&self) -> &FaultId {
        &self.fault_id
    }

    pub fn triggering(&self) -> &BTreeSet<TestId> {
        &self.triggering
    }
}

/// Everything known about one project, over one shared test universe.
#[derive(Debug, Clone)]
pub struct ProjectBundle {
    id: String,
    kill: KillMatrix,
    statements: CoverageMatrix,
    branches: CoverageMatrix,
    faults: Vec<FaultCase>,
}

impl ProjectBundle {
    /// Validates cross-references and aligns the coverage matrices to the
    /// kill matrix's test order.
    pub fn new(
        id: impl Into<String>,
        kill: KillMatrix,
        statements: CoverageMatrix,
        branches: CoverageMatrix,
        faults: Vec<FaultCase>,
    ) -> Result<Self> {
        if statements.kind() != CoverageKind::Statement {
            return Err(Error::input("statement coverage matrix has branch kind"));
        }
        if branches.kind() != CoverageKind::Branch {
            return Err(Error::input("branch coverage matrix has statement kind"));
        }
        let statements = statements.aligned_to(kill.pool())?;
        let branches = branches.aligned_to(kill.pool())?;
        let mut seen = HashSet::new();
        for fault in &faults {
            if !seen.insert(fault.fault_id().clone()) {
                return Err(Error::input(format!("duplicate fault id `{}`", fault.fault_id())));
            }
            if let Some(t) = fault.triggering().iter().find(|t| !kill.pool().contains(t.as_str())) {
                return Err(Error::input(format!(
                    "fault `{}` names unknown triggering test `{t}`",
                    fault.fault_id()
                )));
            }
        }
        Ok(ProjectBundle {
            id: id.into(),
            kill,
            statements,
            branches,
            faults,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kill(&self) -> &KillMatrix {
        &self.kill
    }

    pub fn statements(&self) -> &CoverageMatrix {
        &self.statements
    }

    pub fn branches(&self) -> &CoverageMatrix {
        &self.branches
    }

    pub fn coverage(&self, kind: CoverageKind) -> &CoverageMatrix {
        match kind {
            CoverageKind::Statement => &self.statements,
            CoverageKind::Branch => &self.branches,
        }
    }

    pub fn faults(&self) -> &[FaultCase] {
        &self.faults
    }

    pub fn pool(&self) -> &TestPool {
        self.kill.pool()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids<T: TryFrom<&'static str, Error = Error>>(names: &[&'static str]) -> Vec<T> {
        names.iter().map(|n| T::try_from(*n).unwrap()).collect()
    }

    /// t1 kills {m1,m2}, t2 kills {m2,m3}, m4 unkilled.
    fn sample_kill() -> KillMatrix {
        KillMatrix::new(
            ids(&["t1", "t2"]),
            ids(&["m1", "m2", "m3", "m4"]),
            vec!["ROR".into(); 4],
            &[vec![true, true, false, false], vec![false, true, true, false]],
        )
        .unwrap()
    }

    fn names(set: &BTreeSet<MutantId>) -> Vec<&str> {
        set.iter().map(|m| m.as_str()).collect()
    }

    #[test]
    fn killed_set_reads_rows() {
        let k = sample_kill();
        assert_eq!(names(&k.killed_set(&k.suite(["t1"]).unwrap())), ["m1", "m2"]);
        assert!(k.killed_set(&k.suite(Vec::<&str>::new()).unwrap()).is_empty());
        assert_eq!(
            names(&k.killed_set(&k.suite(["t1", "t2"]).unwrap())),
            ["m1", "m2", "m3"]
        );
    }

    #[test]
    fn unknown_test_is_named() {
        let k = sample_kill();
        let err = k.suite(["t9"]).unwrap_err();
        assert!(matches!(err, Error::Input(ref m) if m.contains("t9")));
    }

    #[test]
    fn covered_set_is_union() {
        let c = CoverageMatrix::new(
            ids(&["t1", "t2"]),
            ids(&["s1", "s2", "s3"]),
            CoverageKind::Statement,
            &[vec![true, true, false], vec![false, true, true]],
        )
        .unwrap();
        let got: Vec<_> = c.covered_set(&c.suite(["t1", "t2"]).unwrap()).into_iter().collect();
        assert_eq!(got, ids::<RequirementId>(&["s1", "s2", "s3"]));
        assert!(c.covered_set(&c.suite(Vec::<&str>::new()).unwrap()).is_empty());
        let got: Vec<_> = c.covered_set(&c.suite(["t2"]).unwrap()).into_iter().collect();
        assert_eq!(got, ids::<RequirementId>(&["s2", "s3"]));
    }

    #[test]
    fn score_ordering_is_exact() {
        let half = Score::new(1, 2).unwrap();
        assert_eq!(half, Score::new(2, 4).unwrap());
        assert!(Score::new(1, 3).unwrap() < half);
        // Products that overflow u64 but not u128.
        let a = Score::new(u64::MAX - 1, u64::MAX).unwrap();
        let b = Score::new(u64::MAX - 2, u64::MAX - 1).unwrap();
        assert!(a > b);
        assert!(Score::new(3, 2).is_err());
        assert!(Score::new(0, 0).is_err());
    }

    #[test]
    fn rejects_corrupted_matrices() {
        // duplicate test
        assert!(KillMatrix::new(ids(&["t1", "t1"]), ids(&["m1"]), vec!["A".into()], &[vec![true], vec![false]]).is_err());
        // duplicate mutant
        assert!(KillMatrix::new(ids(&["t1"]), ids(&["m1", "m1"]), vec!["A".into(); 2], &[vec![true, false]]).is_err());
        // short row
        assert!(KillMatrix::new(ids(&["t1"]), ids(&["m1", "m2"]), vec!["A".into(); 2], &[vec![true]]).is_err());
        // missing row
        assert!(KillMatrix::new(ids(&["t1", "t2"]), ids(&["m1"]), vec!["A".into()], &[vec![true]]).is_err());
        // operator count
        assert!(KillMatrix::new(ids(&["t1"]), ids(&["m1"]), vec![], &[vec![true]]).is_err());
        assert!(TestId::new("").is_err());
    }

    #[test]
    fn fault_requires_trigger() {
        assert!(FaultCase::new(FaultId::new("f1").unwrap(), BTreeSet::new()).is_err());
    }

    #[test]
    fn bundle_aligns_coverage_and_rejects_strays() {
        let k = sample_kill();
        let stmts = CoverageMatrix::new(
            ids(&["t2", "t1"]),
            ids(&["s1"]),
            CoverageKind::Statement,
            &[vec![true], vec![false]],
        )
        .unwrap();
        let br = CoverageMatrix::new(ids(&["t1", "t2"]), ids(&["b1"]), CoverageKind::Branch, &[vec![false], vec![true]]).unwrap();
        let b = ProjectBundle::new("p", k.clone(), stmts.clone(), br.clone(), vec![]).unwrap();
        // row for t2 (index 1 in the kill pool) covers s1
        assert!(b.statements().covers(1, 0));
        assert!(!b.statements().covers(0, 0));

        let fault = FaultCase::new(FaultId::new("f1").unwrap(), ids::<TestId>(&["t7"]).into_iter().collect()).unwrap();
        let err = ProjectBundle::new("p", k.clone(), stmts.clone(), br.clone(), vec![fault]).unwrap_err();
        assert!(err.to_string().contains("t7"));

        let short = CoverageMatrix::new(ids(&["t1"]), ids(&["s1"]), CoverageKind::Statement, &[vec![true]]).unwrap();
        let err = ProjectBundle::new("p", k, short, br, vec![]).unwrap_err();
        assert!(err.to_string().contains("t2"));
    }

    #[test]
    fn empty_suite_is_legal() {
        let k = sample_kill();
        let s = k.pool().empty_suite();
        assert!(s.is_empty());
        assert_eq!(k.killed_indices(&s).count(), 0);
    }
}
