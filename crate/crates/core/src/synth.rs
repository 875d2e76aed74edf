//! Seeded synthetic projects with planted, construction-forced OP values.
//!
//! Every fault owns `triggering_per_fault` tests of its own. For a "planted"
//! fault those tests are the only killers of a dedicated mutant (or the only
//! coverers of a dedicated statement/branch), so the full pool strictly beats
//! the pool without them. For every other fault the triggering tests' rows are
//! copies of some non-triggering test's row, so removing them changes nothing
//! and the metric ties. OP(MS), OP(SC) and OP(BC) on the per-fault pairs
//! therefore equal the planted fractions exactly.

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    CoverageKind, CoverageMatrix, FaultCase, FaultId, KillMatrix, MutantId, ProjectBundle, RequirementId, TestId,
};
use crate::rng::{rng_from_seed, Rng};

pub const DEFAULT_OPERATORS: [&str; 9] = ["AOR", "COR", "EVR", "LOR", "LVR", "ORU", "ROR", "SOR", "STD"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub num_tests: usize,
    pub num_mutants: usize,
    pub num_statements: usize,
    pub num_branches: usize,
    pub num_faults: usize,
    pub operator_alphabet: Vec<String>,
    pub base_kill_prob: f64,
    pub unkillable_fraction: f64,
    /// Fraction of faults whose triggering tests uniquely kill a mutant.
    pub planted_ms_op: f64,
    pub triggering_per_fault: usize,
    /// Fraction of faults whose triggering tests uniquely cover a statement.
    pub planted_sc_op: f64,
    /// Fraction of faults whose triggering tests uniquely cover a branch.
    pub planted_bc_op: f64,
    pub base_cover_prob: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 0,
            num_tests: 40,
            num_mutants: 200,
            num_statements: 120,
            num_branches: 60,
            num_faults: 8,
            operator_alphabet: DEFAULT_OPERATORS.iter().map(|s| s.to_string()).collect(),
            base_kill_prob: 0.05,
            unkillable_fraction: 0.1,
            planted_ms_op: 0.75,
            triggering_per_fault: 1,
            planted_sc_op: 0.5,
            planted_bc_op: 0.5,
            base_cover_prob: 0.3,
        }
    }
}

fn planted_count(fraction: f64, faults: usize, what: &str) -> Result<usize> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::config(format!("{what} must be in [0, 1], got {fraction}")));
    }
    let exact = fraction * faults as f64;
    let count = exact.round();
    if (exact - count).abs() > 1e-9 {
        return Err(Error::config(format!(
            "{what} = {fraction} over {faults} faults is not a whole number of faults"
        )));
    }
    Ok(count as usize)
}

/// Resolved plant sizes of a valid spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlantCounts {
    pub ms: usize,
    pub sc: usize,
    pub bc: usize,
    pub unkillable: usize,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<PlantCounts> {
        for (name, v) in [
            ("num_tests", self.num_tests),
            ("num_mutants", self.num_mutants),
            ("num_statements", self.num_statements),
            ("num_branches", self.num_branches),
            ("num_faults", self.num_faults),
            ("triggering_per_fault", self.triggering_per_fault),
        ] {
            if v == 0 {
                return Err(Error::config(format!("{name} must be positive")));
            }
        }
        if self.operator_alphabet.is_empty() || self.operator_alphabet.iter().any(String::is_empty) {
            return Err(Error::config("operator alphabet must be non-empty strings"));
        }
        for (name, p) in [("base_kill_prob", self.base_kill_prob), ("base_cover_prob", self.base_cover_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        if !(0.0..1.0).contains(&self.unkillable_fraction) {
            return Err(Error::config(format!(
                "unkillable_fraction must be in [0, 1), got {}",
                self.unkillable_fraction
            )));
        }
        let triggering = self.num_faults * self.triggering_per_fault;
        if triggering > self.num_tests {
            return Err(Error::config(format!(
                "{} faults x {} triggering tests exceed the {} tests",
                self.num_faults, self.triggering_per_fault, self.num_tests
            )));
        }
        let counts = PlantCounts {
            ms: planted_count(self.planted_ms_op, self.num_faults, "planted_ms_op")?,
            sc: planted_count(self.planted_sc_op, self.num_faults, "planted_sc_op")?,
            bc: planted_count(self.planted_bc_op, self.num_faults, "planted_bc_op")?,
            unkillable: (self.unkillable_fraction * self.num_mutants as f64).round() as usize,
        };
        if counts.ms + counts.unkillable > self.num_mutants {
            return Err(Error::config(format!(
                "{} dedicated plus {} unkillable mutants do not fit in {} mutants",
                counts.ms, counts.unkillable, self.num_mutants
            )));
        }
        if counts.sc > self.num_statements {
            return Err(Error::config(format!(
                "{} planted statements do not fit in {} statements",
                counts.sc, self.num_statements
            )));
        }
        if counts.bc > self.num_branches {
            return Err(Error::config(format!(
                "{} planted branches do not fit in {} branches",
                counts.bc, self.num_branches
            )));
        }
        let needs_copy_source =
            counts.ms < self.num_faults || counts.sc < self.num_faults || counts.bc < self.num_faults;
        if needs_copy_source && triggering == self.num_tests {
            return Err(Error::config(
                "unplanted faults need at least one non-triggering test to copy rows from",
            ));
        }
        Ok(counts)
    }
}

fn padded(prefix: &str, i: usize, n: usize) -> String {
    let width = n.to_string().len().max(2);
    format!("{prefix}{:0width$}", i + 1)
}

/// Builds one boolean `[test][column]` table with planted uniqueness.
///
/// `dedicated[f]` is the column owned by planted fault `f` (if any); `dead`
/// columns are never set; all other columns are background.
struct Planter<'a> {
    triggering: &'a [Vec<usize>],
    is_triggering: &'a [bool],
    non_triggering: &'a [usize],
}

impl Planter<'_> {
    fn plant(&self, rng: &mut Rng, columns: usize, planted: &[bool], dead: usize, prob: f64) -> Vec<Vec<bool>> {
        let tests = self.is_triggering.len();
        let faults = self.triggering.len();
        let planted_faults: Vec<usize> = (0..faults).filter(|&f| planted[f]).collect();

        let mut positions: Vec<usize> = (0..columns).collect();
        positions.shuffle(rng);
        let dedicated = &positions[..planted_faults.len()];
        let dead_cols = &positions[planted_faults.len()..planted_faults.len() + dead];
        let mut background = vec![true; columns];
        for &c in dedicated.iter().chain(dead_cols) {
            background[c] = false;
        }

        let mut rows = vec![vec![false; columns]; tests];
        let draw = |rng: &mut Rng, row: &mut Vec<bool>| {
            for (c, cell) in row.iter_mut().enumerate() {
                if background[c] {
                    *cell = rng.gen_bool(prob);
                }
            }
        };
        for &t in self.non_triggering {
            draw(rng, &mut rows[t]);
        }
        for (triggering, &is_planted) in self.triggering.iter().zip(planted) {
            for &t in triggering {
                if is_planted {
                    draw(rng, &mut rows[t]);
                } else {
                    let source = self.non_triggering[rng.gen_range(0..self.non_triggering.len())];
                    rows[t] = rows[source].clone();
                }
            }
        }
        for (&f, &c) in planted_faults.iter().zip(dedicated) {
            for &t in &self.triggering[f] {
                rows[t][c] = true;
            }
        }
        rows
    }
}

fn plant_mask(rng: &mut Rng, faults: usize, count: usize) -> Vec<bool> {
    let mut mask = vec![false; faults];
    for f in index::sample(rng, faults, count) {
        mask[f] = true;
    }
    mask
}

/// Generates a project bundle whose id is `synth-<seed>`.
pub fn generate(spec: &SynthSpec) -> Result<ProjectBundle> {
    generate_named(spec, &format!("synth-{}", spec.seed))
}

pub fn generate_named(spec: &SynthSpec, project_id: &str) -> Result<ProjectBundle> {
    let counts = spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);

    let tests: Vec<TestId> = (0..spec.num_tests)
        .map(|i| TestId::new(padded("t", i, spec.num_tests)))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..spec.num_tests).collect();
    order.shuffle(&mut rng);
    let tpf = spec.triggering_per_fault;
    let triggering: Vec<Vec<usize>> = (0..spec.num_faults)
        .map(|f| {
            let mut t = order[f * tpf..(f + 1) * tpf].to_vec();
            t.sort_unstable();
            t
        })
        .collect();
    let mut is_triggering = vec![false; spec.num_tests];
    triggering.iter().flatten().for_each(|&t| is_triggering[t] = true);
    let non_triggering: Vec<usize> = (0..spec.num_tests).filter(|&t| !is_triggering[t]).collect();
    let planter = Planter {
        triggering: &triggering,
        is_triggering: &is_triggering,
        non_triggering: &non_triggering,
    };

    let ms_mask = plant_mask(&mut rng, spec.num_faults, counts.ms);
    let kills = planter.plant(&mut rng, spec.num_mutants, &ms_mask, counts.unkillable, spec.base_kill_prob);
    let operators: Vec<String> = (0..spec.num_mutants)
        .map(|_| spec.operator_alphabet[rng.gen_range(0..spec.operator_alphabet.len())].clone())
        .collect();
    let mutants: Vec<MutantId> = (0..spec.num_mutants)
        .map(|i| MutantId::new(padded("m", i, spec.num_mutants)))
        .collect::<Result<_>>()?;
    let kill = KillMatrix::new(tests.clone(), mutants, operators, &kills)?;

    let sc_mask = plant_mask(&mut rng, spec.num_faults, counts.sc);
    let covered = planter.plant(&mut rng, spec.num_statements, &sc_mask, 0, spec.base_cover_prob);
    let statements = CoverageMatrix::new(
        tests.clone(),
        (0..spec.num_statements)
            .map(|i| RequirementId::new(padded("s", i, spec.num_statements)))
            .collect::<Result<_>>()?,
        CoverageKind::Statement,
        &covered,
    )?;

    let bc_mask = plant_mask(&mut rng, spec.num_faults, counts.bc);
    let covered = planter.plant(&mut rng, spec.num_branches, &bc_mask, 0, spec.base_cover_prob);
    let branches = CoverageMatrix::new(
        tests.clone(),
        (0..spec.num_branches)
            .map(|i| RequirementId::new(padded("b", i, spec.num_branches)))
            .collect::<Result<_>>()?,
        CoverageKind::Branch,
        &covered,
    )?;

    let faults: Vec<FaultCase> = triggering
        .iter()
        .enumerate()
        .map(|(f, ts)| {
            FaultCase::new(
                FaultId::new(padded("f", f, spec.num_faults))?,
                ts.iter().map(|&t| tests[t].clone()).collect(),
            )
        })
        .collect::<Result<_>>()?;

    ProjectBundle::new(project_id, kill, statements, branches, faults)
}
