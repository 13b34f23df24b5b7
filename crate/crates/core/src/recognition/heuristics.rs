use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::landmarks::{Landmark, LandmarkGraph, LandmarkKind};
use crate::task::FactId;

fn counted(l: &Landmark, include_disjunctive: bool) -> bool {
    include_disjunctive || l.is_conjunctive()
}

/// Goal completion: the mean over sub-goals of the achieved fraction of
/// the landmarks supporting that sub-goal.
pub fn h_gc(graph: &LandmarkGraph, achieved: &FixedBitSet, include_disjunctive: bool) -> f64 {
    if !graph.is_solvable() {
        return 0.0;
    }
    let k = graph.goal().len();
    if k == 0 {
        return 1.0;
    }
    let mut total = vec![0usize; k];
    let mut hit = vec![0usize; k];
    for (i, l) in graph.landmarks().iter().enumerate() {
        if !counted(l, include_disjunctive) {
            continue;
        }
        for &g in &l.supports {
            total[g] += 1;
            if achieved.contains(i) {
                hit[g] += 1;
            }
        }
    }
    let sum: f64 = total
        .iter()
        .zip(&hit)
        .map(|(&t, &h)| {
            assert!(t > 0, "every sub-goal is its own landmark");
            h as f64 / t as f64
        })
        .sum();
    sum / k as f64
}

/// Inverse frequency of each landmark (by kind and facts) across goals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UniquenessTable {
    counts: HashMap<(LandmarkKind, Vec<FactId>), usize>,
}

impl UniquenessTable {
    pub fn build<'g>(graphs: impl IntoIterator<Item = &'g LandmarkGraph>) -> Self {
        let mut counts: HashMap<(LandmarkKind, Vec<FactId>), usize> = HashMap::new();
        for g in graphs {
            // graph landmarks are duplicate-free, so each goal counts once
            for l in g.landmarks() {
                *counts.entry((l.kind, l.facts.clone())).or_default() += 1;
            }
        }
        UniquenessTable { counts }
    }

    /// `1 / number of goals containing the landmark`, or `None` if no goal does.
    pub fn get(&self, kind: LandmarkKind, facts: &[FactId]) -> Option<f64> {
        self.counts
            .get(&(kind, facts.to_vec()))
            .map(|&c| 1.0 / c as f64)
    }

    pub fn value(&self, landmark: &Landmark) -> f64 {
        self.get(landmark.kind, &landmark.facts)
            .expect("uniqueness table covers every landmark of its graphs")
    }

    /// Sum of uniqueness over the counted landmarks of `graph`.
    pub fn total(&self, graph: &LandmarkGraph, include_disjunctive: bool) -> f64 {
        graph
            .landmarks()
            .iter()
            .filter(|l| counted(l, include_disjunctive))
            .map(|l| self.value(l))
            .sum()
    }
}

/// Uniqueness of a single landmark across `graphs`.
pub fn landmark_uniqueness<'g>(
    landmark: &Landmark,
    graphs: impl IntoIterator<Item = &'g LandmarkGraph>,
) -> f64 {
    let count = graphs
        .into_iter()
        .filter(|g| g.find(landmark.kind, &landmark.facts).is_some())
        .count();
    assert!(count > 0, "landmark occurs in no graph");
    1.0 / count as f64
}

/// Uniqueness-weighted share of achieved landmarks.
pub fn h_uniq(
    graph: &LandmarkGraph,
    achieved: &FixedBitSet,
    table: &UniquenessTable,
    include_disjunctive: bool,
) -> f64 {
    if !graph.is_solvable() {
        return 0.0;
    }
    if graph.goal().is_empty() {
        return 1.0;
    }
    let mut total = 0.0;
    let mut hit = 0.0;
    for (i, l) in graph.landmarks().iter().enumerate() {
        if !counted(l, include_disjunctive) {
            continue;
        }
        let u = table.value(l);
        total += u;
        if achieved.contains(i) {
            hit += u;
        }
    }
    assert!(total > 0.0, "goal landmarks make the total positive");
    hit / total
}
