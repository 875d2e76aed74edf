//! Benchmark suite pairs and their ground-truth relations.
//!
//! Real-fault pairs compare the full pool A with B = A minus the fault's
//! triggering tests. The mutant-based alternative labels a subset pair by
//! comparing whole-mutant-set mutation scores. Random-subset pairs draw a
//! k-test suite and drop one test from it.

use std::fmt;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::mutation_score;
use crate::model::{FaultCase, FaultId, KillMatrix, Suite, TestPool};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    MoreEffective,
    AsEffective,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::MoreEffective => f.write_str("more-effective"),
            Relation::AsEffective => f.write_str("as-effective"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Fault(FaultId),
    RandomSubset,
}

impl Provenance {
    pub fn fault(&self) -> Option<&FaultId> {
        match self {
            Provenance::Fault(id) => Some(id),
            Provenance::RandomSubset => None,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Fault(id) => write!(f, "fault:{id}"),
            Provenance::RandomSubset => f.write_str("random-subset"),
        }
    }
}

/// Two suites with `y ⊆ x` and the relation the ground truth assigns to them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuitePair {
    pub pair_id: String,
    pub x: Suite,
    pub y: Suite,
    pub relation: Relation,
    pub provenance: Provenance,
}

impl SuitePair {
    /// Same suites, relation recomputed by the mutant-based ground truth.
    pub fn relabeled_alternative(&self, kill: &KillMatrix) -> Result<SuitePair> {
        Ok(SuitePair {
            relation: label_alternative(&self.x, &self.y, kill)?,
            ..self.clone()
        })
    }
}

/// A = the whole pool, B = pool without the fault's triggering tests.
/// A detects the fault and B cannot, so A is more effective.
pub fn real_fault_pair(fault: &FaultCase, pool: &TestPool) -> Result<SuitePair> {
    if fault.triggering().is_empty() {
        return Err(Error::input(format!("fault `{}` has no triggering test", fault.fault_id())));
    }
    let triggering = pool.suite(fault.triggering().iter()).map_err(|e| {
        Error::input(format!("fault `{}`: triggering tests not in pool: {e}", fault.fault_id()))
    })?;
    let x = pool.full();
    let y = x.difference(&triggering);
    Ok(SuitePair {
        pair_id: fault.fault_id().to_string(),
        x,
        y,
        relation: Relation::MoreEffective,
        provenance: Provenance::Fault(fault.fault_id().clone()),
    })
}

/// MoreEffective iff `MS(M, y) < MS(M, x)` over the whole mutant set.
pub fn label_alternative(x: &Suite, y: &Suite, kill: &KillMatrix) -> Result<Relation> {
    if !y.is_subset(x) {
        return Err(Error::input("alternative ground truth needs y ⊆ x"));
    }
    if mutation_score(kill, y)? < mutation_score(kill, x)? {
        Ok(Relation::MoreEffective)
    } else {
        Ok(Relation::AsEffective)
    }
}

/// `count` pairs: k uniform in [2, |pool|], x a uniform k-subset, y = x minus
/// one uniformly chosen test.
pub fn random_subset_pairs(pool: &TestPool, count: usize, rng: &mut Rng) -> Result<Vec<(Suite, Suite)>> {
    let n = pool.len();
    if n < 2 {
        return Err(Error::input(format!("random-subset pairs need at least 2 tests, pool has {n}")));
    }
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.gen_range(2..=n);
        let members = index::sample(rng, n, k).into_vec();
        let dropped = members[rng.gen_range(0..k)];
        let x = Suite::from_indices(n, members.iter().copied());
        let mut y = x.clone();
        y.remove(dropped);
        pairs.push((x, y));
    }
    Ok(pairs)
}

/// Random-subset pairs labelled by the alternative ground truth.
pub fn random_subset_suite_pairs(kill: &KillMatrix, count: usize, rng: &mut Rng) -> Result<Vec<SuitePair>> {
    random_subset_pairs(kill.pool(), count, rng)?
        .into_iter()
        .enumerate()
        .map(|(i, (x, y))| {
            Ok(SuitePair {
                pair_id: format!("r{:03}", i + 1),
                relation: label_alternative(&x, &y, kill)?,
                x,
                y,
                provenance: Provenance::RandomSubset,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MutantId, TestId};
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    fn pool(n: usize) -> TestPool {
        TestPool::new((1..=n).map(|i| TestId::new(format!("t{i}")).unwrap()).collect()).unwrap()
    }

    fn fault(id: &str, tests: &[&str]) -> FaultCase {
        FaultCase::new(
            FaultId::new(id).unwrap(),
            tests.iter().map(|t| TestId::new(*t).unwrap()).collect(),
        )
        .unwrap()
    }

    fn names(pool: &TestPool, s: &Suite) -> Vec<String> {
        pool.ids_of(s).map(|t| t.to_string()).collect()
    }

    #[test]
    fn real_fault_pair_examples() {
        let p = pool(5);
        let pair = real_fault_pair(&fault("f1", &["t3"]), &p).unwrap();
        assert_eq!(names(&p, &pair.x), ["t1", "t2", "t3", "t4", "t5"]);
        assert_eq!(names(&p, &pair.y), ["t1", "t2", "t4", "t5"]);
        assert_eq!(pair.relation, Relation::MoreEffective);
        assert_eq!(pair.provenance, Provenance::Fault(FaultId::new("f1").unwrap()));

        let all = real_fault_pair(&fault("f2", &["t1", "t2", "t3", "t4", "t5"]), &p).unwrap();
        assert!(all.y.is_empty());
        assert_eq!(all.relation, Relation::MoreEffective);

        assert!(real_fault_pair(&fault("f3", &["t9"]), &p).is_err());
    }

    fn kill4() -> KillMatrix {
        // t1 kills m1, t2 kills m2, t3 kills m1
        KillMatrix::new(
            pool(3).ids().to_vec(),
            (1..=4).map(|i| MutantId::new(format!("m{i}")).unwrap()).collect(),
            vec!["A".into(); 4],
            &[
                vec![true, false, false, false],
                vec![false, true, false, false],
                vec![true, false, false, false],
            ],
        )
        .unwrap()
    }

    #[test]
    fn alternative_labels() {
        let k = kill4();
        let x = k.suite(["t1", "t2"]).unwrap();
        let y = k.suite(["t1"]).unwrap();
        assert_eq!(label_alternative(&x, &y, &k).unwrap(), Relation::MoreEffective);
        let x2 = k.suite(["t1", "t3"]).unwrap();
        assert_eq!(label_alternative(&x2, &y, &k).unwrap(), Relation::AsEffective);
        assert_eq!(
            label_alternative(&y, &k.pool().empty_suite(), &k).unwrap(),
            Relation::MoreEffective
        );
        assert!(matches!(label_alternative(&y, &x, &k), Err(Error::Input(_))));
    }

    #[test]
    fn random_pairs_shapes() {
        let p2 = pool(2);
        for (x, y) in random_subset_pairs(&p2, 20, &mut rng_from_seed(1)).unwrap() {
            assert_eq!(x.size(), 2);
            assert_eq!(y.size(), 1);
        }
        let p = pool(9);
        let pairs = random_subset_pairs(&p, 100, &mut rng_from_seed(4)).unwrap();
        assert_eq!(pairs.len(), 100);
        for (x, y) in &pairs {
            assert!(y.is_subset(x));
            assert_eq!(x.size() - y.size(), 1);
        }
        assert_eq!(pairs, random_subset_pairs(&p, 100, &mut rng_from_seed(4)).unwrap());
        assert!(random_subset_pairs(&pool(1), 1, &mut rng_from_seed(0)).is_err());
    }

    proptest! {
        #[test]
        fn alternative_matches_direct_scores_and_is_superset_monotone(
            (tests, mutants, cells, xbits, ybits, extra) in (1usize..8, 1usize..12)
                .prop_flat_map(|(t, m)| (Just(t), Just(m),
                    proptest::collection::vec(any::<bool>(), t * m),
                    proptest::collection::vec(any::<bool>(), t),
                    proptest::collection::vec(any::<bool>(), t),
                    proptest::collection::vec(any::<bool>(), t)))
        ) {
            let kills: Vec<Vec<bool>> = cells.chunks(mutants).map(|c| c.to_vec()).collect();
            let k = KillMatrix::new(
                pool(tests).ids().to_vec(),
                (0..mutants).map(|i| MutantId::new(format!("m{i}")).unwrap()).collect(),
                vec!["A".into(); mutants],
                &kills,
            ).unwrap();
            let x = Suite::from_indices(tests, (0..tests).filter(|&i| xbits[i]));
            let y = Suite::from_indices(tests, (0..tests).filter(|&i| xbits[i] && ybits[i]));

            // direct oracle: count killed mutants by plain loops
            let killed = |s: &Suite| -> usize {
                (0..mutants).filter(|&m| (0..tests).any(|t| s.contains(t) && kills[t][m])).count()
            };
            let expected = if killed(&y) < killed(&x) { Relation::MoreEffective } else { Relation::AsEffective };
            let got = label_alternative(&x, &y, &k).unwrap();
            prop_assert_eq!(got, expected);

            let bigger = Suite::from_indices(tests, (0..tests).filter(|&i| xbits[i] || extra[i]));
            if got == Relation::MoreEffective {
                prop_assert_eq!(label_alternative(&bigger, &y, &k).unwrap(), Relation::MoreEffective);
            }
        }
    }
}
