//! Delete-relaxed reachability levels.

use fixedbitset::FixedBitSet;

use crate::task::{ActionId, FactId, GroundTask, State};

/// Level of a fact or action that the relaxation never reaches.
pub const UNREACHABLE: u32 = u32::MAX;

/// First levels of facts and actions in the relaxed planning graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedPlanningGraph {
    pub fact_level: Vec<u32>,
    pub action_level: Vec<u32>,
    pub num_levels: u32,
}

impl RelaxedPlanningGraph {
    pub fn fact_reachable(&self, fact: FactId) -> bool {
        self.fact_level.get(fact).is_some_and(|&l| l != UNREACHABLE)
    }

    pub fn action_reachable(&self, action: ActionId) -> bool {
        self.action_level[action] != UNREACHABLE
    }

    pub fn all_reachable(&self, facts: &[FactId]) -> bool {
        facts.iter().all(|&f| self.fact_reachable(f))
    }

    /// Maximum first level over `facts`; [`UNREACHABLE`] if any is unreachable.
    pub fn max_level(&self, facts: &[FactId]) -> u32 {
        facts
            .iter()
            .map(|&f| self.fact_level.get(f).copied().unwrap_or(UNREACHABLE))
            .max()
            .unwrap_or(0)
    }
}

struct Fixpoint<'a> {
    task: &'a GroundTask,
    excluded: &'a FixedBitSet,
    fact_level: Vec<u32>,
    action_level: Vec<u32>,
    remaining: Vec<usize>,
}

impl<'a> Fixpoint<'a> {
    fn new(task: &'a GroundTask, excluded: &'a FixedBitSet) -> Self {
        Fixpoint {
            task,
            excluded,
            fact_level: vec![UNREACHABLE; task.num_facts()],
            action_level: vec![UNREACHABLE; task.actions().len()],
            remaining: task.actions().iter().map(|a| a.pre.len()).collect(),
        }
    }

    /// Runs level by level; `stop` is checked after each new fact and ends
    /// the expansion early when it returns true.
    fn run(&mut self, initial: &State, mut stop: impl FnMut(FactId) -> bool) -> u32 {
        let mut frontier: Vec<FactId> = Vec::new();
        let n = self.fact_level.len();
        for f in initial.facts().filter(|&f| f < n) {
            self.fact_level[f] = 0;
            frontier.push(f);
            if stop(f) {
                return 1;
            }
        }
        let mut ready: Vec<ActionId> = self
            .task
            .actions()
            .iter()
            .filter(|a| a.pre.is_empty())
            .map(|a| a.id)
            .collect();
        let mut level = 0u32;
        loop {
            for &f in &frontier {
                for &a in self.task.consumers(f) {
                    self.remaining[a] -= 1;
                    if self.remaining[a] == 0 {
                        ready.push(a);
                    }
                }
            }
            let mut next = Vec::new();
            for &a in &ready {
                if self.excluded.contains(a) {
                    continue;
                }
                self.action_level[a] = level;
                for &f in &self.task.action(a).add {
                    if self.fact_level[f] == UNREACHABLE {
                        self.fact_level[f] = level + 1;
                        next.push(f);
                        if stop(f) {
                            return level + 2;
                        }
                    }
                }
            }
            ready.clear();
            if next.is_empty() {
                return level + 1;
            }
            frontier = next;
            level += 1;
        }
    }
}

/// Builds the relaxed planning graph from `initial`, never applying
/// actions in `excluded`.
pub fn build_rpg(task: &GroundTask, initial: &State, excluded: &FixedBitSet) -> RelaxedPlanningGraph {
    let mut fp = Fixpoint::new(task, excluded);
    let num_levels = fp.run(initial, |_| false);
    RelaxedPlanningGraph {
        fact_level: fp.fact_level,
        action_level: fp.action_level,
        num_levels,
    }
}

/// True iff every goal fact is relaxed-reachable. Stops as soon as the
/// last goal fact appears.
pub fn relaxed_solvable(
    task: &GroundTask,
    initial: &State,
    goal: &[FactId],
    excluded: &FixedBitSet,
) -> bool {
    let n = task.num_facts();
    if goal.iter().any(|&g| g >= n) {
        return goal.iter().all(|&g| initial.holds(g));
    }
    let mut pending = FixedBitSet::with_capacity(n);
    for &g in goal {
        pending.insert(g);
    }
    let mut left = pending.count_ones(..);
    if left == 0 {
        return true;
    }
    let mut fp = Fixpoint::new(task, excluded);
    fp.run(initial, |f| {
        if pending.contains(f) {
            pending.set(f, false);
            left -= 1;
        }
        left == 0
    });
    left == 0
}

/// Bitset over actions for use as an `excluded` argument.
pub fn action_set(task: &GroundTask, actions: impl IntoIterator<Item = ActionId>) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(task.actions().len());
    for a in actions {
        set.insert(a);
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem, GroundFact};
    use crate::task::ground_instance;

    const BLOCKS: &str = include_str!("../tests/fixtures/blocks-domain.pddl");
    const FIG3: &str = include_str!("../tests/fixtures/words-problem.pddl");

    fn words() -> GroundTask {
        let d = parse_domain(BLOCKS).unwrap();
        ground_instance(&parse_problem(FIG3, &d).unwrap())
    }

    fn ids(task: &GroundTask, facts: &[&str]) -> Vec<FactId> {
        facts
            .iter()
            .map(|s| task.fact_id(&GroundFact::parse(s).unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn goal_facts_reachable_from_words() {
        let t = words();
        let rpg = build_rpg(&t, t.initial(), &FixedBitSet::new());
        let red = ids(&t, &["(clear r)", "(on r e)", "(on e d)", "(ontable d)"]);
        assert!(rpg.all_reachable(&red));
        assert_eq!(rpg.fact_level[red[0]], 0);
        assert_eq!(rpg.fact_level[ids(&t, &["(holding d)"])[0]], 1);
        assert_eq!(rpg.fact_level[red[2]], 2);
        for a in t.actions() {
            if rpg.action_reachable(a.id) {
                assert_eq!(rpg.action_level[a.id], rpg.max_level(&a.pre));
            }
        }
        assert!(relaxed_solvable(&t, t.initial(), &red, &FixedBitSet::new()));
    }

    #[test]
    fn removing_achievers_of_holding_e_blocks_on_e_d() {
        let t = words();
        let holding_e = ids(&t, &["(holding e)"])[0];
        let excluded = action_set(&t, t.achievers(holding_e).iter().copied());
        let rpg = build_rpg(&t, t.initial(), &excluded);
        let on_e_d = ids(&t, &["(on e d)"])[0];
        assert!(!rpg.fact_reachable(on_e_d));
        assert!(!relaxed_solvable(&t, t.initial(), &[on_e_d], &excluded));
    }

    #[test]
    fn excluding_stack_e_d_makes_goal_unsolvable() {
        let t = words();
        let stack = t.action_by_signature("(stack e d)").unwrap();
        let on_e_d = ids(&t, &["(on e d)"]);
        assert!(!relaxed_solvable(&t, t.initial(), &on_e_d, &action_set(&t, [stack])));
    }

    #[test]
    fn initial_goals_survive_excluding_everything() {
        let t = words();
        let all = action_set(&t, 0..t.actions().len());
        let goal = ids(&t, &["(on d b)", "(handempty)"]);
        assert!(relaxed_solvable(&t, t.initial(), &goal, &all));
        let rpg = build_rpg(&t, t.initial(), &all);
        assert!(goal.iter().all(|&g| rpg.fact_level[g] == 0));
        assert!(relaxed_solvable(&t, t.initial(), &[], &all));
    }
}
