use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::MutantSelection;
use crate::model::KillMatrix;

/// Killable mutants grouped by identical killer sets. Each group is listed by
/// its member positions in matrix order; groups are ordered by first member.
pub fn mutual_groups(kill: &KillMatrix) -> Vec<Vec<usize>> {
    let mut by_killers: HashMap<&FixedBitSet, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for m in (0..kill.num_mutants()).filter(|&m| kill.is_killable(m)) {
        match by_killers.get(kill.killers(m)) {
            Some(&g) => groups[g].push(m),
            None => {
                by_killers.insert(kill.killers(m), groups.len());
                groups.push(vec![m]);
            }
        }
    }
    groups
}

/// Subsuming mutants: one representative (the first in matrix order) of every
/// mutual-subsumption group whose killer set does not strictly contain the
/// killer set of another killable mutant. Never-killed mutants are excluded.
pub fn subsuming_set(kill: &KillMatrix) -> MutantSelection {
    let groups = mutual_groups(kill);
    let mut selected = FixedBitSet::with_capacity(kill.num_mutants());
    for (g, members) in groups.iter().enumerate() {
        let killers = kill.killers(members[0]);
        // Distinct groups have distinct killer sets, so subset means strict subset.
        let strictly_subsumed = groups
            .iter()
            .enumerate()
            .any(|(h, other)| h != g && kill.killers(other[0]).is_subset(killers));
        if !strictly_subsumed {
            selected.insert(members[0]);
        }
    }
    MutantSelection::from_bits(selected)
}
