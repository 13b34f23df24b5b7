//! Landmark-based goal recognition: achieved landmarks, candidate
//! filtering, and the goal-completion and uniqueness heuristics.

mod achieved;
mod filter;
mod heuristics;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use achieved::{compute_achieved_landmarks, AchievedLandmarks, AchievedTracker};
pub use filter::{filter_candidate_goals, FilterOutcome, PartitionTest};
pub use heuristics::{h_gc, h_uniq, landmark_uniqueness, UniquenessTable};

use crate::error::{Error, Result};
use crate::landmarks::{extract_landmarks, LandmarkGraph};
use crate::partitions::partition_facts;
use crate::pddl::GroundFact;
use crate::task::{ActionId, FactId, GroundTask};

/// Slack for floating-point threshold comparisons.
pub const SCORE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observation {
    Action(ActionId),
    /// A sorted set of facts seen to hold.
    Facts(Vec<FactId>),
}

/// Grounded domain and initial state, candidate goals and observations.
#[derive(Debug, Clone)]
pub struct GoalRecognitionProblem {
    pub task: GroundTask,
    pub candidate_goals: Vec<Vec<FactId>>,
    pub observations: Vec<Observation>,
    /// Observation lines that matched no grounded action.
    pub unresolved: Vec<String>,
}

impl GoalRecognitionProblem {
    /// Interns the goals and resolves each observation line. With
    /// `facts_mode`, every line is a fact set rather than an action.
    pub fn new(
        mut task: GroundTask,
        goals: &[Vec<GroundFact>],
        observations: &[String],
        facts_mode: bool,
    ) -> Result<Self> {
        if goals.is_empty() {
            return Err(Error::InvalidSpec("no candidate goals".into()));
        }
        let candidate_goals = goals.iter().map(|g| task.intern_all(g)).collect();
        let mut resolved = Vec::with_capacity(observations.len());
        let mut unresolved = Vec::new();
        for line in observations {
            if facts_mode {
                let facts = GroundFact::parse_list(line)?;
                resolved.push(Observation::Facts(task.intern_all(&facts)));
            } else {
                match task.action_by_signature(line) {
                    Some(a) => resolved.push(Observation::Action(a)),
                    None => {
                        log::warn!("unresolved observation {line}");
                        unresolved.push(line.clone());
                    }
                }
            }
        }
        Ok(GoalRecognitionProblem {
            task,
            candidate_goals,
            observations: resolved,
            unresolved,
        })
    }

    pub fn goal_label(&self, i: usize) -> String {
        self.candidate_goals[i]
            .iter()
            .map(|&f| self.task.fact(f).to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Same problem with only the first `n` observations.
    pub fn with_prefix(&self, n: usize) -> Self {
        let mut p = self.clone();
        p.observations.truncate(n);
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gc,
    Uniq,
    Filter,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Gc, Method::Uniq, Method::Filter];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Gc => "gc",
            Method::Uniq => "uniq",
            Method::Filter => "filter",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gc" => Ok(Method::Gc),
            "uniq" => Ok(Method::Uniq),
            "filter" => Ok(Method::Filter),
            other => Err(Error::InvalidSpec(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecognizerConfig {
    pub theta: f64,
    /// Count disjunctive landmarks in the heuristics.
    pub include_disjunctive: bool,
    pub partition_test: PartitionTest,
    /// Condition activating partitions on the initial state.
    pub require_initial: bool,
    pub deadline: Option<Instant>,
}

impl Default for RecognizerConfig {
    fn default() -> Self {
        RecognizerConfig {
            theta: 0.0,
            include_disjunctive: false,
            partition_test: PartitionTest::default(),
            require_initial: true,
            deadline: None,
        }
    }
}

impl RecognizerConfig {
    pub fn with_theta(theta: f64) -> Self {
        RecognizerConfig {
            theta,
            ..RecognizerConfig::default()
        }
    }

    fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::DeadlineExceeded),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub extraction_s: f64,
    pub recognition_s: f64,
}

impl Timing {
    pub fn total_s(&self) -> f64 {
        self.extraction_s + self.recognition_s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognitionResult {
    pub method: Method,
    pub theta: f64,
    pub goals: Vec<String>,
    pub scores: Vec<f64>,
    /// Indices into `goals`, ascending.
    pub returned: Vec<usize>,
    /// Unsolvable goals, plus partition-pruned goals for the filter.
    pub eliminated: Vec<usize>,
    /// The filter pruned every goal and fell back to plain ratios.
    pub anomaly: bool,
    pub landmark_counts: Vec<usize>,
    pub achieved_counts: Vec<usize>,
    pub unresolved_observations: Vec<String>,
    pub timing: Timing,
}

impl RecognitionResult {
    /// Goal indices by descending score, ties in input order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]));
        order
    }

    pub fn is_returned(&self, goal: usize) -> bool {
        self.returned.contains(&goal)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("results serialize")
    }
}

/// Indices `i` with `eligible[i]` and `scores[i] >= max - theta`, the
/// maximum taken over eligible goals.
pub(crate) fn select_within(scores: &[f64], eligible: &[bool], theta: f64) -> Vec<usize> {
    let max = scores
        .iter()
        .zip(eligible)
        .filter(|(_, &e)| e)
        .map(|(&s, _)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    (0..scores.len())
        .filter(|&i| eligible[i] && scores[i] >= max - theta - SCORE_EPSILON)
        .collect()
}

/// One landmark graph per candidate goal, extracted online. Identical
/// goals share one extraction.
pub fn extract_graphs(problem: &GoalRecognitionProblem, config: &RecognizerConfig) -> Result<Vec<LandmarkGraph>> {
    let task = &problem.task;
    let mut cache: HashMap<&[FactId], LandmarkGraph> = HashMap::new();
    let mut graphs = Vec::with_capacity(problem.candidate_goals.len());
    for goal in &problem.candidate_goals {
        config.check_deadline()?;
        let graph = match cache.get(goal.as_slice()) {
            Some(g) => g.clone(),
            None => {
                let g = match extract_landmarks(task, task.initial(), goal) {
                    Ok(g) => g,
                    Err(Error::UnsolvableGoal(_)) => LandmarkGraph::unsolvable(goal.clone()),
                    Err(e) => return Err(e),
                };
                cache.insert(goal, g.clone());
                g
            }
        };
        graphs.push(graph);
    }
    Ok(graphs)
}

/// Extracts landmarks and runs `method`; timing covers both phases.
pub fn recognize(
    problem: &GoalRecognitionProblem,
    method: Method,
    config: &RecognizerConfig,
) -> Result<RecognitionResult> {
    let start = Instant::now();
    let graphs = extract_graphs(problem, config)?;
    let extraction_s = start.elapsed().as_secs_f64();
    let mut result = recognize_with_graphs(problem, &graphs, method, config)?;
    result.timing.extraction_s = extraction_s;
    Ok(result)
}

/// Runs `method` over precomputed graphs, one per candidate goal.
pub fn recognize_with_graphs(
    problem: &GoalRecognitionProblem,
    graphs: &[LandmarkGraph],
    method: Method,
    config: &RecognizerConfig,
) -> Result<RecognitionResult> {
    assert_eq!(graphs.len(), problem.candidate_goals.len(), "one graph per goal");
    config.check_deadline()?;
    let start = Instant::now();
    let task = &problem.task;
    let unsolvable: Vec<usize> = (0..graphs.len()).filter(|&i| !graphs[i].is_solvable()).collect();

    let (scores, achieved, eliminated, returned, anomaly) = match method {
        Method::Filter => {
            let partitions = partition_facts(task, task.initial(), config.require_initial);
            let out = filter_candidate_goals(problem, graphs, &partitions, config.theta, config.partition_test);
            let eliminated = (0..graphs.len())
                .filter(|&i| out.unsolvable[i] || out.discarded[i])
                .collect();
            (out.ratios, out.achieved, eliminated, out.returned, out.anomaly)
        }
        Method::Gc | Method::Uniq => {
            let achieved = compute_achieved_landmarks(task, task.initial(), graphs, &problem.observations).per_goal;
            let scores: Vec<f64> = if method == Method::Gc {
                graphs
                    .iter()
                    .zip(&achieved)
                    .map(|(g, a)| h_gc(g, a, config.include_disjunctive))
                    .collect()
            } else {
                let table = UniquenessTable::build(graphs.iter().filter(|g| g.is_solvable()));
                graphs
                    .iter()
                    .zip(&achieved)
                    .map(|(g, a)| h_uniq(g, a, &table, config.include_disjunctive))
                    .collect()
            };
            let eligible: Vec<bool> = graphs.iter().map(LandmarkGraph::is_solvable).collect();
            let returned = select_within(&scores, &eligible, config.theta);
            (scores, achieved, unsolvable, returned, false)
        }
    };

    Ok(RecognitionResult {
        method,
        theta: config.theta,
        goals: (0..graphs.len()).map(|i| problem.goal_label(i)).collect(),
        scores,
        returned,
        eliminated,
        anomaly,
        landmark_counts: graphs.iter().map(LandmarkGraph::len).collect(),
        achieved_counts: achieved.iter().map(|a| a.count_ones(..)).collect(),
        unresolved_observations: problem.unresolved.clone(),
        timing: Timing {
            extraction_s: 0.0,
            recognition_s: start.elapsed().as_secs_f64(),
        },
    })
}

pub fn recognize_gc(problem: &GoalRecognitionProblem, theta: f64) -> Result<RecognitionResult> {
    recognize(problem, Method::Gc, &RecognizerConfig::with_theta(theta))
}

pub fn recognize_uniq(problem: &GoalRecognitionProblem, theta: f64) -> Result<RecognitionResult> {
    recognize(problem, Method::Uniq, &RecognizerConfig::with_theta(theta))
}

pub fn recognize_filter(problem: &GoalRecognitionProblem, theta: f64) -> Result<RecognitionResult> {
    recognize(problem, Method::Filter, &RecognizerConfig::with_theta(theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_within_uses_eligible_max() {
        let scores = [0.9, 0.6, 0.55, 0.2];
        let eligible = [false, true, true, true];
        assert_eq!(select_within(&scores, &eligible, 0.0), vec![1]);
        assert_eq!(select_within(&scores, &eligible, 0.05), vec![1, 2]);
        assert_eq!(select_within(&scores, &eligible, 1.0), vec![1, 2, 3]);
        assert!(select_within(&scores, &[false; 4], 1.0).is_empty());
    }

    #[test]
    fn method_parses_and_prints() {
        for m in Method::ALL {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("lama".parse::<Method>().is_err());
    }
}
