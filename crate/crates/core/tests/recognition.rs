use goalrec_core::landmarks::LandmarkGraph;
use goalrec_core::recognition::{
    compute_achieved_landmarks, recognize, recognize_with_graphs, GoalRecognitionProblem, Method,
    RecognizerConfig,
};
use goalrec_core::{ground_instance, parse_domain, parse_problem, GroundFact};

const DOMAIN: &str = include_str!("fixtures/blocks-domain.pddl");
const PROBLEM: &str = include_str!("fixtures/words-problem.pddl");
const GRAPHS: [&str; 3] = [
    include_str!("fixtures/words-red-graph.json"),
    include_str!("fixtures/words-bed-graph.json"),
    include_str!("fixtures/words-sad-graph.json"),
];
const GOALS: [&str; 3] = [
    "(clear r) (on r e) (on e d) (ontable d)",
    "(clear b) (on b e) (on e d) (ontable d)",
    "(clear s) (on s a) (on a d) (ontable d)",
];

fn problem(observations: &[&str]) -> GoalRecognitionProblem {
    let domain = parse_domain(DOMAIN).unwrap();
    let instance = parse_problem(PROBLEM, &domain).unwrap();
    let goals: Vec<Vec<GroundFact>> = GOALS.iter().map(|g| GroundFact::parse_list(g).unwrap()).collect();
    let obs: Vec<String> = observations.iter().map(|s| s.to_string()).collect();
    GoalRecognitionProblem::new(ground_instance(&instance), &goals, &obs, false).unwrap()
}

fn fixture_graphs(p: &GoalRecognitionProblem) -> Vec<LandmarkGraph> {
    GRAPHS.iter().map(|g| LandmarkGraph::from_json(g, &p.task).unwrap()).collect()
}

fn run(method: Method, theta: f64) -> Vec<f64> {
    let p = problem(&["(unstack e a)", "(stack e d)"]);
    let graphs = fixture_graphs(&p);
    let r = recognize_with_graphs(&p, &graphs, method, &RecognizerConfig::with_theta(theta)).unwrap();
    assert_eq!(r.returned, vec![0], "{method} at theta {theta}");
    r.scores
}

fn assert_close(actual: &[f64], expected: &[f64], tol: f64) {
    for (a, e) in actual.iter().zip(expected) {
        assert!((a - e).abs() <= tol, "{actual:?} vs {expected:?}");
    }
}

#[test]
fn fixture_graphs_have_expected_sizes() {
    let p = problem(&[]);
    let sizes: Vec<usize> = fixture_graphs(&p).iter().map(LandmarkGraph::len).collect();
    assert_eq!(sizes, vec![10, 10, 11]);
}

#[test]
fn achieved_landmarks_on_two_observations() {
    let p = problem(&["(unstack e a)", "(stack e d)"]);
    let graphs = fixture_graphs(&p);
    let al = compute_achieved_landmarks(&p.task, p.task.initial(), &graphs, &p.observations);
    assert_eq!(al.indices(0), vec![0, 2, 5, 6, 7, 9]);
    assert_eq!(al.indices(1), vec![2, 5, 6, 7, 9]);
    assert_eq!(al.indices(2), vec![0, 5, 6, 7, 10]);
}

#[test]
fn goal_completion_scores() {
    assert_close(&run(Method::Gc, 0.0), &[2.0 / 3.0, 6.5 / 12.0, 7.0 / 12.0], 1e-9);
}

#[test]
fn uniqueness_scores() {
    let s = run(Method::Uniq, 0.0);
    assert_close(&s, &[11.0 / 19.0, 8.0 / 19.0, 11.0 / 25.0], 1e-9);
}

#[test]
fn filter_ratios() {
    assert_close(&run(Method::Filter, 0.0), &[0.6, 0.5, 5.0 / 11.0], 1e-9);
}

#[test]
fn threshold_admits_close_runner_up() {
    let p = problem(&["(unstack e a)", "(stack e d)"]);
    let graphs = fixture_graphs(&p);
    let r = recognize_with_graphs(&p, &graphs, Method::Gc, &RecognizerConfig::with_theta(0.12)).unwrap();
    assert_eq!(r.returned, vec![0, 2]);
    assert_eq!(r.ranking(), vec![0, 2, 1]);
}

#[test]
fn full_plan_scores_true_goal_one() {
    let plan = [
        "(unstack d b)",
        "(putdown d)",
        "(unstack e a)",
        "(stack e d)",
        "(pickup r)",
        "(stack r e)",
    ];
    let p = problem(&plan);
    for method in Method::ALL {
        let r = recognize(&p, method, &RecognizerConfig::default()).unwrap();
        assert!((r.scores[0] - 1.0).abs() < 1e-9, "{method}: {:?}", r.scores);
        assert_eq!(r.returned, vec![0], "{method}");
    }
}

#[test]
fn extracted_graphs_rank_true_goal_first() {
    let p = problem(&["(unstack e a)", "(stack e d)"]);
    for method in Method::ALL {
        let r = recognize(&p, method, &RecognizerConfig::default()).unwrap();
        assert_eq!(r.returned, vec![0], "{method}: {:?}", r.scores);
        assert_eq!(r.landmark_counts, vec![10, 10, 11]);
    }
}

#[test]
fn unknown_observations_are_reported() {
    let p = problem(&["(Unstack E A)", "(fly e a)"]);
    assert_eq!(p.observations.len(), 1);
    assert_eq!(p.unresolved, vec!["(fly e a)".to_string()]);
    let r = recognize(&p, Method::Gc, &RecognizerConfig::default()).unwrap();
    assert_eq!(r.unresolved_observations, p.unresolved);
}

#[test]
fn unreachable_goal_is_eliminated() {
    let domain = parse_domain(DOMAIN).unwrap();
    let instance = parse_problem(PROBLEM, &domain).unwrap();
    let goals = vec![
        GroundFact::parse_list(GOALS[0]).unwrap(),
        GroundFact::parse_list("(on r r)").unwrap(),
    ];
    let p = GoalRecognitionProblem::new(ground_instance(&instance), &goals, &[], false).unwrap();
    for method in Method::ALL {
        let r = recognize(&p, method, &RecognizerConfig::with_theta(1.0)).unwrap();
        assert_eq!(r.scores[1], 0.0);
        assert_eq!(r.returned, vec![0]);
        assert!(r.eliminated.contains(&1));
    }
}

#[test]
fn result_serializes() {
    let p = problem(&["(unstack e a)"]);
    let r = recognize(&p, Method::Filter, &RecognizerConfig::default()).unwrap();
    let back: goalrec_core::recognition::RecognitionResult = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
}
