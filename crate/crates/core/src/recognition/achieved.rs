use fixedbitset::FixedBitSet;

use crate::landmarks::LandmarkGraph;
use crate::task::{FactId, GroundTask, State};

use super::Observation;

/// Evidence of landmarks seen so far for one goal. Marks only grow.
#[derive(Debug, Clone)]
pub struct AchievedTracker<'g> {
    graph: &'g LandmarkGraph,
    achieved: FixedBitSet,
    initial: FixedBitSet,
}

impl<'g> AchievedTracker<'g> {
    /// Starts from the landmarks that hold in `initial` and their predecessors.
    pub fn new(graph: &'g LandmarkGraph, initial: &State) -> Self {
        let mut t = AchievedTracker {
            graph,
            achieved: FixedBitSet::with_capacity(graph.len()),
            initial: FixedBitSet::with_capacity(graph.len()),
        };
        for (i, l) in graph.landmarks().iter().enumerate() {
            if l.holds_in(initial) {
                t.initial.insert(i);
                t.mark(i);
            }
        }
        t
    }

    /// Marks `i` and, transitively, its ordering predecessors.
    pub(crate) fn mark(&mut self, i: usize) {
        if self.achieved.contains(i) {
            return;
        }
        let mut stack = vec![i];
        self.achieved.insert(i);
        while let Some(u) = stack.pop() {
            for &p in self.graph.predecessors(u) {
                if !self.achieved.contains(p) {
                    self.achieved.insert(p);
                    stack.push(p);
                }
            }
        }
    }

    pub(crate) fn unmark(&mut self, i: usize) {
        self.achieved.set(i, false);
    }

    /// Marks every landmark satisfied by the fact set `contains`.
    pub fn observe_with(&mut self, contains: impl Fn(FactId) -> bool) {
        for i in 0..self.graph.len() {
            if !self.achieved.contains(i) && self.graph.landmark(i).satisfied_by(&contains) {
                self.mark(i);
            }
        }
    }

    pub fn observe(&mut self, task: &GroundTask, observation: &Observation) {
        match observation {
            Observation::Action(a) => {
                let a = task.action(*a);
                self.observe_with(|f| a.pre.binary_search(&f).is_ok() || a.add.binary_search(&f).is_ok());
            }
            Observation::Facts(facts) => self.observe_with(|f| facts.binary_search(&f).is_ok()),
        }
    }

    pub fn achieved(&self) -> &FixedBitSet {
        &self.achieved
    }

    pub fn is_achieved(&self, i: usize) -> bool {
        self.achieved.contains(i)
    }

    pub fn holds_initially(&self, i: usize) -> bool {
        self.initial.contains(i)
    }

    pub fn count(&self) -> usize {
        self.achieved.count_ones(..)
    }

    pub fn graph(&self) -> &'g LandmarkGraph {
        self.graph
    }
}

/// Achieved landmark indices per goal, aligned with the input graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AchievedLandmarks {
    pub per_goal: Vec<FixedBitSet>,
}

impl AchievedLandmarks {
    pub fn indices(&self, goal: usize) -> Vec<usize> {
        self.per_goal[goal].ones().collect()
    }
}

/// Landmarks of each goal evidenced by the initial state and the
/// preconditions and add effects of the observations, closed under
/// ordering predecessors.
pub fn compute_achieved_landmarks<'g>(
    task: &GroundTask,
    initial: &State,
    graphs: impl IntoIterator<Item = &'g LandmarkGraph>,
    observations: &[Observation],
) -> AchievedLandmarks {
    let per_goal = graphs
        .into_iter()
        .map(|g| {
            let mut t = AchievedTracker::new(g, initial);
            for o in observations {
                t.observe(task, o);
            }
            t.achieved
        })
        .collect();
    AchievedLandmarks { per_goal }
}
