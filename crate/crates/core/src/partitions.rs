//! Strictly activating, unstable activating and strictly terminal facts.

use fixedbitset::FixedBitSet;

use crate::task::{FactId, GroundTask, State};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactPartitions {
    pub strictly_activating: FixedBitSet,
    pub unstable_activating: FixedBitSet,
    pub strictly_terminal: FixedBitSet,
}

impl FactPartitions {
    pub fn is_strictly_activating(&self, f: FactId) -> bool {
        self.strictly_activating.contains(f)
    }

    pub fn is_unstable_activating(&self, f: FactId) -> bool {
        self.unstable_activating.contains(f)
    }

    pub fn is_strictly_terminal(&self, f: FactId) -> bool {
        self.strictly_terminal.contains(f)
    }

    pub fn is_empty(&self) -> bool {
        self.strictly_activating.is_clear()
            && self.unstable_activating.is_clear()
            && self.strictly_terminal.is_clear()
    }
}

/// Classifies every interned fact in one pass over the actions.
///
/// With `require_initial`, activating facts must also hold in `initial`.
pub fn partition_facts(task: &GroundTask, initial: &State, require_initial: bool) -> FactPartitions {
    let n = task.num_facts();
    let mut in_pre = FixedBitSet::with_capacity(n);
    let mut in_add = FixedBitSet::with_capacity(n);
    let mut in_del = FixedBitSet::with_capacity(n);
    for a in task.actions() {
        a.pre.iter().for_each(|&f| in_pre.insert(f));
        a.add.iter().for_each(|&f| in_add.insert(f));
        a.del.iter().for_each(|&f| in_del.insert(f));
    }
    let mut p = FactPartitions {
        strictly_activating: FixedBitSet::with_capacity(n),
        unstable_activating: FixedBitSet::with_capacity(n),
        strictly_terminal: FixedBitSet::with_capacity(n),
    };
    for f in 0..n {
        let initially = !require_initial || initial.holds(f);
        let (pre, add, del) = (in_pre.contains(f), in_add.contains(f), in_del.contains(f));
        if initially && pre && !add && !del {
            p.strictly_activating.insert(f);
        } else if initially && pre && !add && del {
            p.unstable_activating.insert(f);
        } else if add && !pre && !del {
            p.strictly_terminal.insert(f);
        }
    }
    p
}
