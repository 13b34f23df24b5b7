use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::landmarks::LandmarkGraph;
use crate::partitions::FactPartitions;
use crate::task::{GroundTask, State};

use super::achieved::AchievedTracker;
use super::{select_within, GoalRecognitionProblem, Observation};

/// How observed actions touching partitioned facts prune goals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionTest {
    /// Prune on deleted, still-needed unstable activating landmark facts
    /// and on added strictly terminal facts foreign to the goal.
    #[default]
    LandmarkAware,
    /// Prune when all unstable activating and strictly terminal facts
    /// appear in one observed action.
    Literal,
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub ratios: Vec<f64>,
    pub achieved: Vec<FixedBitSet>,
    /// Pruned by the partition tests.
    pub discarded: Vec<bool>,
    pub unsolvable: Vec<bool>,
    pub returned: Vec<usize>,
    /// Every solvable goal was pruned; `returned` ignores the pruning.
    pub anomaly: bool,
}

struct GoalFilter {
    achieved: FixedBitSet,
    ratio: f64,
    discarded: bool,
}

fn unreachable_landmark(task: &GroundTask, initial: &State, graph: &LandmarkGraph) -> bool {
    let dead = |f: usize| task.achievers(f).is_empty() && !initial.holds(f);
    graph.landmarks().iter().any(|l| {
        if l.is_conjunctive() {
            l.facts.iter().any(|&f| dead(f))
        } else {
            l.facts.iter().all(|&f| dead(f))
        }
    })
}

fn filter_goal(
    task: &GroundTask,
    initial: &State,
    graph: &LandmarkGraph,
    observations: &[Observation],
    partitions: &FactPartitions,
    test: PartitionTest,
) -> GoalFilter {
    let mut tracker = AchievedTracker::new(graph, initial);
    let mut discarded = test != PartitionTest::Off && unreachable_landmark(task, initial, graph);
    let n = graph.len();
    let mut used_in_pre = FixedBitSet::with_capacity(n);
    let literal_set: Vec<usize> = partitions
        .unstable_activating
        .union(&partitions.strictly_terminal)
        .collect();

    for o in observations {
        let a = match o {
            Observation::Action(a) => task.action(*a),
            Observation::Facts(_) => {
                tracker.observe(task, o);
                continue;
            }
        };
        let in_pre = |f: usize| a.pre.binary_search(&f).is_ok();
        for i in 0..n {
            if !used_in_pre.contains(i) && graph.landmark(i).satisfied_by(in_pre) {
                used_in_pre.insert(i);
            }
        }
        let consumed = |tracker: &AchievedTracker, i: usize| {
            used_in_pre.contains(i) || graph.successors(i).iter().any(|&s| tracker.is_achieved(s))
        };

        if !discarded {
            discarded = match test {
                PartitionTest::Off => false,
                PartitionTest::Literal => {
                    !literal_set.is_empty()
                        && literal_set.iter().all(|f| {
                            in_pre(*f) || a.add.binary_search(f).is_ok() || a.del.binary_search(f).is_ok()
                        })
                }
                PartitionTest::LandmarkAware => {
                    let ua = a.del.iter().filter(|&&f| partitions.is_unstable_activating(f)).any(|&f| {
                        (0..n).any(|i| {
                            let l = graph.landmark(i);
                            l.is_conjunctive()
                                && l.facts.binary_search(&f).is_ok()
                                && (graph.is_goal_landmark(i) || !consumed(&tracker, i))
                        })
                    });
                    let st = a.add.iter().filter(|&&f| partitions.is_strictly_terminal(f)).any(|&f| {
                        !graph.landmarks().iter().any(|l| l.facts.binary_search(&f).is_ok())
                    });
                    ua || st
                }
            };
        }

        // a deleted landmark loses its evidence unless it already served its purpose
        for i in 0..n {
            if tracker.is_achieved(i)
                && !tracker.holds_initially(i)
                && graph.landmark(i).facts.iter().any(|f| a.del.binary_search(f).is_ok())
                && !consumed(&tracker, i)
            {
                tracker.unmark(i);
            }
        }
        tracker.observe(task, o);
    }
    let ratio = if graph.goal().is_empty() {
        1.0
    } else {
        tracker.count() as f64 / n as f64
    };
    GoalFilter {
        achieved: tracker.achieved().clone(),
        ratio,
        discarded,
    }
}

/// Ranks goals by the share of their landmarks evidenced in the
/// observations and keeps those within `theta` of the best.
pub fn filter_candidate_goals(
    problem: &GoalRecognitionProblem,
    graphs: &[LandmarkGraph],
    partitions: &FactPartitions,
    theta: f64,
    test: PartitionTest,
) -> FilterOutcome {
    let task = &problem.task;
    let initial = task.initial();
    let mut out = FilterOutcome {
        ratios: Vec::with_capacity(graphs.len()),
        achieved: Vec::with_capacity(graphs.len()),
        discarded: Vec::with_capacity(graphs.len()),
        unsolvable: Vec::with_capacity(graphs.len()),
        returned: Vec::new(),
        anomaly: false,
    };
    for g in graphs {
        if !g.is_solvable() {
            out.ratios.push(0.0);
            out.achieved.push(FixedBitSet::new());
            out.discarded.push(false);
            out.unsolvable.push(true);
            continue;
        }
        let r = filter_goal(task, initial, g, &problem.observations, partitions, test);
        out.ratios.push(r.ratio);
        out.achieved.push(r.achieved);
        out.discarded.push(r.discarded);
        out.unsolvable.push(false);
    }
    let mut eligible: Vec<bool> = (0..graphs.len())
        .map(|i| !out.unsolvable[i] && !out.discarded[i])
        .collect();
    if !eligible.iter().any(|&e| e) {
        out.anomaly = true;
        eligible = out.unsolvable.iter().map(|u| !u).collect();
    }
    out.returned = select_within(&out.ratios, &eligible, theta);
    out
}
