use goalrec_core::landmarks::extract_landmarks;
use goalrec_core::obsgen::{find_plan, observe_plan, project_missing, replay, ObservationSpec};
use goalrec_core::recognition::{
    compute_achieved_landmarks, h_gc, recognize_gc, GoalRecognitionProblem, Observation,
};
use goalrec_core::task::successor;
use goalrec_core::{applicable, ground_instance, parse_domain, parse_problem, GroundFact, GroundTask};
use proptest::prelude::*;

const DOMAIN: &str = include_str!("fixtures/blocks-domain.pddl");
const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];

/// Blocks stacked in towers: `order` is a permutation, `cuts[i]` starts a new tower.
fn blocks_problem(order: &[usize], cuts: &[bool]) -> String {
    let mut init = vec!["(handempty)".to_string()];
    for (i, &b) in order.iter().enumerate() {
        let name = NAMES[b];
        if i == 0 || cuts[i] {
            init.push(format!("(ontable {name})"));
        } else {
            init.push(format!("(on {name} {})", NAMES[order[i - 1]]));
        }
        if i + 1 == order.len() || cuts[i + 1] {
            init.push(format!("(clear {name})"));
        }
    }
    let objects: Vec<&str> = order.iter().map(|&b| NAMES[b]).collect();
    format!(
        "(define (problem p) (:domain blocks) (:objects {}) (:init {}) (:goal (and)))",
        objects.join(" "),
        init.join(" ")
    )
}

fn task_for(order: &[usize], cuts: &[bool]) -> GroundTask {
    let domain = parse_domain(DOMAIN).unwrap();
    ground_instance(&parse_problem(&blocks_problem(order, cuts), &domain).unwrap())
}

/// Follows `choices` through applicable actions; returns the action ids.
fn walk(task: &GroundTask, choices: &[usize]) -> Vec<usize> {
    let mut state = task.initial().clone();
    let mut plan = Vec::new();
    for &c in choices {
        let options: Vec<usize> = task
            .actions()
            .iter()
            .filter(|a| applicable(&state, a))
            .map(|a| a.id)
            .collect();
        let a = options[c % options.len()];
        state = successor(&state, task.action(a));
        plan.push(a);
    }
    plan
}

fn instance() -> impl Strategy<Value = (Vec<usize>, Vec<bool>, Vec<usize>)> {
    (3usize..=5).prop_flat_map(|n| {
        (
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(0usize..64, 1..12),
        )
    })
}

/// Goal: the tower facts of the walk's end state that differ from the start.
fn walk_goal(task: &GroundTask, plan: &[usize]) -> Vec<GroundFact> {
    let end = replay(task, task.initial(), plan).unwrap();
    end.facts()
        .filter(|&f| !task.initial().holds(f))
        .map(|f| task.fact(f).clone())
        .filter(|f| f.predicate == "on" || f.predicate == "ontable")
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn achieved_sets_grow_and_stay_closed((order, cuts, choices) in instance()) {
        let task = task_for(&order, &cuts);
        let plan = walk(&task, &choices);
        let goal = walk_goal(&task, &plan);
        prop_assume!(!goal.is_empty());
        let mut task = task;
        let ids = task.intern_all(&goal);
        let graph = extract_landmarks(&task, task.initial(), &ids).unwrap();
        let obs: Vec<Observation> = plan.iter().map(|&a| Observation::Action(a)).collect();
        let mut previous = None;
        for k in 0..=obs.len() {
            let al = compute_achieved_landmarks(&task, task.initial(), [&graph], &obs[..k]);
            let achieved = &al.per_goal[0];
            for i in achieved.ones() {
                for &p in graph.predecessors(i) {
                    prop_assert!(achieved.contains(p));
                }
            }
            if let Some(prev) = &previous {
                prop_assert!(achieved.is_superset(prev));
            }
            previous = Some(achieved.clone());
        }
        // a full plan evidences every landmark
        let all = previous.unwrap();
        prop_assert_eq!(all.count_ones(..), graph.len());
        prop_assert!((h_gc(&graph, &all, false) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_plan_ranks_its_goal_first((order, cuts, choices) in instance()) {
        let task = task_for(&order, &cuts);
        let plan = walk(&task, &choices);
        let goal = walk_goal(&task, &plan);
        prop_assume!(!goal.is_empty());
        let decoy: Vec<GroundFact> = task
            .initial()
            .facts()
            .map(|f| task.fact(f).clone())
            .filter(|f| f.predicate == "on" || f.predicate == "ontable")
            .collect();
        let obs: Vec<String> = plan.iter().map(|&a| task.action(a).to_string()).collect();
        let p = GoalRecognitionProblem::new(task, &[goal, decoy], &obs, false).unwrap();
        let r = recognize_gc(&p, 0.0).unwrap();
        prop_assert!(r.is_returned(0));
        prop_assert!((r.scores[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn found_plans_replay_to_the_goal((order, cuts, choices) in instance()) {
        let mut task = task_for(&order, &cuts);
        let plan = walk(&task, &choices);
        let goal = walk_goal(&task, &plan);
        let ids = task.intern_all(&goal);
        let found = find_plan(&task, task.initial(), &ids).unwrap();
        let end = replay(&task, task.initial(), &found).unwrap();
        prop_assert!(end.holds_all(&ids));
    }

    #[test]
    fn projections_are_nested_subsequences(
        n in 1usize..40,
        seed in any::<u64>(),
        low in 0.05f64..=1.0,
        high in 0.05f64..=1.0,
    ) {
        let (low, high) = if low <= high { (low, high) } else { (high, low) };
        let plan: Vec<usize> = (0..n).collect();
        let small = project_missing(&plan, &ObservationSpec::new(low, 0, seed).unwrap());
        let large = project_missing(&plan, &ObservationSpec::new(high, 0, seed).unwrap());
        prop_assert_eq!(small.len(), ObservationSpec::new(low, 0, seed).unwrap().kept(n));
        prop_assert!(small.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(large.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(small.iter().all(|x| large.contains(x)));
    }

    #[test]
    fn noise_keeps_genuine_order((order, cuts, choices) in instance(), seed in any::<u64>()) {
        let task = task_for(&order, &cuts);
        let plan = walk(&task, &choices);
        let spec = ObservationSpec::new(0.75, 2, seed).unwrap();
        let observed = observe_plan(&task, &plan, &spec).unwrap();
        prop_assert_eq!(observed.len(), spec.kept(plan.len()) + 2);
        let genuine: Vec<usize> = observed.iter().copied().filter(|a| plan.contains(a)).collect();
        prop_assert_eq!(genuine, project_missing(&plan, &spec));
    }
}
