//! Plans and the full, missing and noisy observation sequences derived
//! from them.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use fixedbitset::FixedBitSet;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rpg::relaxed_solvable;
use crate::task::{apply, successor, ActionId, FactId, GroundTask, State};

pub const DEFAULT_NODE_BUDGET: usize = 500_000;

const MISSING_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;

/// Additive relaxed cost of reaching `goal` from `state`; `None` if unreachable.
pub fn h_add(task: &GroundTask, state: &State, goal: &[FactId]) -> Option<u64> {
    let n = task.num_facts();
    let mut cost = vec![u64::MAX; n];
    let mut remaining: Vec<usize> = task.actions().iter().map(|a| a.pre.len()).collect();
    let mut pre_sum = vec![0u64; task.actions().len()];
    let mut heap = BinaryHeap::new();
    for f in state.facts().filter(|&f| f < n) {
        cost[f] = 0;
        heap.push(Reverse((0u64, f)));
    }
    let settle = |a: ActionId, heap: &mut BinaryHeap<Reverse<(u64, FactId)>>, cost: &mut Vec<u64>, sum: u64| {
        let c = sum + task.action(a).cost() as u64;
        for &f in &task.action(a).add {
            if c < cost[f] {
                cost[f] = c;
                heap.push(Reverse((c, f)));
            }
        }
    };
    for a in task.actions().iter().filter(|a| a.pre.is_empty()) {
        settle(a.id, &mut heap, &mut cost, 0);
    }
    let mut done = FixedBitSet::with_capacity(n);
    while let Some(Reverse((c, f))) = heap.pop() {
        if done.contains(f) || c > cost[f] {
            continue;
        }
        done.insert(f);
        for &a in task.consumers(f) {
            pre_sum[a] += c;
            remaining[a] -= 1;
            if remaining[a] == 0 {
                settle(a, &mut heap, &mut cost, pre_sum[a]);
            }
        }
    }
    goal.iter().try_fold(0u64, |acc, &g| {
        let c = *cost.get(g)?;
        (c != u64::MAX).then(|| acc + c)
    })
}

/// Greedy best-first search on [`h_add`] with first-in-first-out ties and
/// successors generated in action-id order.
pub fn find_plan(task: &GroundTask, initial: &State, goal: &[FactId]) -> Result<Vec<ActionId>> {
    find_plan_with_budget(task, initial, goal, DEFAULT_NODE_BUDGET)
}

pub fn find_plan_with_budget(
    task: &GroundTask,
    initial: &State,
    goal: &[FactId],
    node_budget: usize,
) -> Result<Vec<ActionId>> {
    if !relaxed_solvable(task, initial, goal, &FixedBitSet::new()) {
        return Err(Error::UnsolvableGoal(task.format_facts(goal)));
    }
    let start = State::from_facts(task.num_facts(), initial.facts());
    // node: (state, parent, action that led here)
    let mut nodes: Vec<(State, usize, ActionId)> = vec![(start.clone(), usize::MAX, usize::MAX)];
    let mut seen: HashSet<State> = HashSet::from([start.clone()]);
    let mut open = BinaryHeap::new();
    let h0 = h_add(task, &start, goal).expect("relaxed-solvable");
    open.push(Reverse((h0, 0usize)));
    let mut expanded = 0usize;
    while let Some(Reverse((_, idx))) = open.pop() {
        if nodes[idx].0.holds_all(goal) {
            let mut plan = Vec::new();
            let mut i = idx;
            while nodes[i].1 != usize::MAX {
                plan.push(nodes[i].2);
                i = nodes[i].1;
            }
            plan.reverse();
            return Ok(plan);
        }
        expanded += 1;
        if expanded > node_budget {
            return Err(Error::NodeBudgetExceeded(node_budget));
        }
        let state = nodes[idx].0.clone();
        for a in task.actions() {
            if !state.holds_all(&a.pre) {
                continue;
            }
            let next = successor(&state, a);
            if seen.contains(&next) {
                continue;
            }
            seen.insert(next.clone());
            if let Some(h) = h_add(task, &next, goal) {
                nodes.push((next, idx, a.id));
                open.push(Reverse((h, nodes.len() - 1)));
            }
        }
    }
    Err(Error::SearchExhausted)
}

/// Replays `plan` from `initial`, failing on the first inapplicable action.
pub fn replay(task: &GroundTask, initial: &State, plan: &[ActionId]) -> Result<State> {
    plan.iter()
        .try_fold(initial.clone(), |s, &a| apply(task, &s, task.action(a)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationSpec {
    /// Fraction of plan actions kept, in `(0, 1]`.
    pub observability: f64,
    pub noise_count: usize,
    pub seed: u64,
}

impl ObservationSpec {
    pub fn new(observability: f64, noise_count: usize, seed: u64) -> Result<Self> {
        let spec = ObservationSpec {
            observability,
            noise_count,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn full(seed: u64) -> Self {
        ObservationSpec {
            observability: 1.0,
            noise_count: 0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.observability > 0.0 && self.observability <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "observability {} outside (0, 1]",
                self.observability
            )))
        }
    }

    /// Number of actions kept from a plan of length `n`, rounded up.
    pub fn kept(&self, n: usize) -> usize {
        // absorbs products like 0.7 * 10 = 7.000000000000001
        let k = (self.observability * n as f64 - 1e-9).ceil().max(0.0) as usize;
        k.min(n)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Keeps a uniformly sampled, order-preserving subsequence of `plan`.
///
/// The sample is a prefix of one seeded permutation, so under a fixed seed
/// lower observability keeps a subset of what higher observability keeps.
pub fn project_missing<T: Clone>(plan: &[T], spec: &ObservationSpec) -> Vec<T> {
    let mut order: Vec<usize> = (0..plan.len()).collect();
    order.shuffle(&mut spec.rng(MISSING_STREAM));
    let mut keep = order[..spec.kept(plan.len())].to_vec();
    keep.sort_unstable();
    keep.into_iter().map(|i| plan[i].clone()).collect()
}

/// Inserts `spec.noise_count` distinct actions from outside `plan` at
/// uniformly random positions.
pub fn inject_noise(
    observations: &[ActionId],
    spec: &ObservationSpec,
    task: &GroundTask,
    plan: &[ActionId],
) -> Result<Vec<ActionId>> {
    if spec.noise_count == 0 {
        return Ok(observations.to_vec());
    }
    let in_plan: HashSet<ActionId> = plan.iter().copied().collect();
    let pool: Vec<ActionId> = (0..task.actions().len()).filter(|a| !in_plan.contains(a)).collect();
    if pool.len() < spec.noise_count {
        return Err(Error::InsufficientNoise {
            requested: spec.noise_count,
            available: pool.len(),
        });
    }
    let mut rng = spec.rng(NOISE_STREAM);
    let picks = sample(&mut rng, pool.len(), spec.noise_count);
    let mut out = observations.to_vec();
    for i in picks {
        let pos = rng.gen_range(0..=out.len());
        out.insert(pos, pool[i]);
    }
    Ok(out)
}

/// Missing-then-noisy observations of `plan`.
pub fn observe_plan(task: &GroundTask, plan: &[ActionId], spec: &ObservationSpec) -> Result<Vec<ActionId>> {
    spec.validate()?;
    inject_noise(&project_missing(plan, spec), spec, task, plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem, GroundFact};
    use crate::task::ground_instance;

    fn words() -> (GroundTask, Vec<FactId>) {
        let d = parse_domain(include_str!("../tests/fixtures/blocks-domain.pddl")).unwrap();
        let p = parse_problem(include_str!("../tests/fixtures/words-problem.pddl"), &d).unwrap();
        let mut t = ground_instance(&p);
        let goal = t.intern_all(&p.goal);
        (t, goal)
    }

    #[test]
    fn plan_reaches_goal() {
        let (t, goal) = words();
        let plan = find_plan(&t, t.initial(), &goal).unwrap();
        assert!(plan.len() >= 6);
        assert!(replay(&t, t.initial(), &plan).unwrap().holds_all(&goal));
        assert_eq!(plan, find_plan(&t, t.initial(), &goal).unwrap());
    }

    #[test]
    fn satisfied_goal_needs_no_plan() {
        let (t, _) = words();
        let goal = t.lookup_all(&[GroundFact::parse("(on e a)").unwrap()]).unwrap();
        assert!(find_plan(&t, t.initial(), &goal).unwrap().is_empty());
        assert_eq!(h_add(&t, t.initial(), &goal), Some(0));
    }

    #[test]
    fn unreachable_goal_and_budget() {
        let (mut t, goal) = words();
        let bad = t.intern_all(&[GroundFact::parse("(on r r)").unwrap()]);
        assert!(matches!(find_plan(&t, t.initial(), &bad), Err(Error::UnsolvableGoal(_))));
        assert!(matches!(
            find_plan_with_budget(&t, t.initial(), &goal, 2),
            Err(Error::NodeBudgetExceeded(2))
        ));
    }

    #[test]
    fn kept_rounds_up() {
        let spec = |o| ObservationSpec::new(o, 0, 0).unwrap();
        assert_eq!(spec(0.1).kept(6), 1);
        assert_eq!(spec(0.7).kept(10), 7);
        assert_eq!(spec(0.3).kept(10), 3);
        assert_eq!(spec(1.0).kept(9), 9);
        assert!(ObservationSpec::new(0.0, 0, 0).is_err());
        assert!(ObservationSpec::new(1.5, 0, 0).is_err());
    }

    #[test]
    fn missing_preserves_order() {
        let plan: Vec<usize> = (0..20).collect();
        for seed in 0..20 {
            let spec = ObservationSpec::new(0.3, 0, seed).unwrap();
            let kept = project_missing(&plan, &spec);
            assert_eq!(kept.len(), 6);
            assert!(kept.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(kept, project_missing(&plan, &spec));
        }
        assert_eq!(project_missing(&plan, &ObservationSpec::full(3)), plan);
        let low = project_missing(&plan, &ObservationSpec::new(0.1, 0, 5).unwrap());
        let high = project_missing(&plan, &ObservationSpec::new(0.5, 0, 5).unwrap());
        assert!(low.iter().all(|a| high.contains(a)));
    }

    #[test]
    fn noise_comes_from_outside_the_plan() {
        let (t, goal) = words();
        let plan = find_plan(&t, t.initial(), &goal).unwrap();
        let spec = ObservationSpec::new(0.75, 2, 11).unwrap();
        let obs = observe_plan(&t, &plan, &spec).unwrap();
        assert_eq!(obs.len(), spec.kept(plan.len()) + 2);
        let genuine: Vec<_> = obs.iter().filter(|a| plan.contains(a)).copied().collect();
        assert_eq!(genuine, project_missing(&plan, &spec));
        assert_eq!(obs, observe_plan(&t, &plan, &spec).unwrap());

        let too_many = ObservationSpec::new(1.0, t.actions().len(), 0).unwrap();
        assert!(matches!(
            inject_noise(&plan, &too_many, &t, &plan),
            Err(Error::InsufficientNoise { .. })
        ));
        let none = ObservationSpec::new(1.0, 0, 0).unwrap();
        assert_eq!(inject_noise(&plan, &none, &t, &plan).unwrap(), plan);
    }
}
