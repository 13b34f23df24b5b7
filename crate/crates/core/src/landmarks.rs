//! Ordered fact landmarks by back-chaining over the relaxed planning graph.
//!
//! Each goal fact is a singleton conjunctive landmark. For every landmark
//! fact `p` not in the initial state, the achievers of `p` that could fire
//! before `p` first holds are collected; their shared preconditions form a
//! conjunctive candidate, and same-predicate groups of the remaining
//! preconditions form disjunctive candidates. Candidates are kept only if
//! removing their achievers makes the goal relaxed-unsolvable. Edges point
//! from a prerequisite to the landmark it was derived from.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pddl::GroundFact;
use crate::rpg::{build_rpg, relaxed_solvable, RelaxedPlanningGraph};
use crate::task::{ActionId, FactId, GroundTask, State};

/// Upper bound on the size of a disjunctive landmark.
pub const MAX_DISJUNCTION: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LandmarkKind {
    Conjunctive,
    Disjunctive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Landmark {
    pub kind: LandmarkKind,
    /// Sorted, duplicate-free.
    pub facts: Vec<FactId>,
    /// Indices into the graph's goal of the sub-goals this landmark serves.
    pub supports: BTreeSet<usize>,
}

impl Landmark {
    pub fn is_conjunctive(&self) -> bool {
        self.kind == LandmarkKind::Conjunctive
    }

    /// Whether `state` satisfies the landmark.
    pub fn holds_in(&self, state: &State) -> bool {
        match self.kind {
            LandmarkKind::Conjunctive => state.holds_all(&self.facts),
            LandmarkKind::Disjunctive => self.facts.iter().any(|&f| state.holds(f)),
        }
    }

    /// Whether the landmark is satisfied by a set of facts given as a
    /// membership predicate.
    pub fn satisfied_by(&self, contains: impl Fn(FactId) -> bool) -> bool {
        match self.kind {
            LandmarkKind::Conjunctive => self.facts.iter().all(|&f| contains(f)),
            LandmarkKind::Disjunctive => self.facts.iter().any(|&f| contains(f)),
        }
    }

    pub fn render(&self, task: &GroundTask) -> String {
        let op = match self.kind {
            LandmarkKind::Conjunctive => "and",
            LandmarkKind::Disjunctive => "or",
        };
        let mut s = format!("({op}");
        for &f in &self.facts {
            let _ = write!(s, " {}", task.fact(f));
        }
        s.push(')');
        s
    }
}

/// A necessary action. Extraction of action landmarks is not implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionLandmark {
    pub action: ActionId,
}

/// Landmarks of one goal with their ordering DAG.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LandmarkGraph {
    goal: Vec<FactId>,
    landmarks: Vec<Landmark>,
    edges: Vec<(usize, usize)>,
    predecessors: Vec<Vec<usize>>,
    successors: Vec<Vec<usize>>,
    solvable: bool,
}

impl LandmarkGraph {
    /// Builds a graph from nodes and `(prerequisite, dependent)` edges,
    /// checking the structural invariants. Each landmark supports the
    /// sub-goals it is a singleton of plus everything its successors support.
    pub fn new(
        goal: Vec<FactId>,
        nodes: Vec<(LandmarkKind, Vec<FactId>)>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let mut graph = LandmarkGraph::skeleton(goal, nodes, edges)?;
        let order = graph
            .topological_order()
            .ok_or_else(|| Error::InvalidGraph("ordering edges contain a cycle".into()))?;
        for i in 0..graph.goal.len() {
            let idx = graph.goal_landmark(graph.goal[i]).expect("checked by skeleton");
            graph.landmarks[idx].supports.insert(i);
        }
        // successors come later in topological order; walk it backwards
        for &u in order.iter().rev() {
            let inherited: BTreeSet<usize> = graph.successors[u]
                .iter()
                .flat_map(|&v| graph.landmarks[v].supports.iter().copied())
                .collect();
            graph.landmarks[u].supports.extend(inherited);
        }
        graph.check_supports()?;
        Ok(graph)
    }

    /// Like [`LandmarkGraph::new`] but with caller-provided `supports`,
    /// one set per node. Edges then only carry ordering.
    pub fn with_supports(
        goal: Vec<FactId>,
        nodes: Vec<(LandmarkKind, Vec<FactId>)>,
        edges: Vec<(usize, usize)>,
        supports: Vec<BTreeSet<usize>>,
    ) -> Result<Self> {
        if supports.len() != nodes.len() {
            return Err(Error::InvalidGraph(format!(
                "{} supports for {} landmarks",
                supports.len(),
                nodes.len()
            )));
        }
        let mut graph = LandmarkGraph::skeleton(goal, nodes, edges)?;
        if graph.topological_order().is_none() {
            return Err(Error::InvalidGraph("ordering edges contain a cycle".into()));
        }
        for (l, s) in graph.landmarks.iter_mut().zip(supports) {
            l.supports = s;
        }
        for (i, &g) in graph.goal.iter().enumerate() {
            let idx = graph.goal_landmark(g).expect("checked by skeleton");
            if !graph.landmarks[idx].supports.contains(&i) {
                return Err(Error::InvalidGraph(format!(
                    "goal landmark {idx} does not support its own sub-goal {i}"
                )));
            }
        }
        graph.check_supports()?;
        Ok(graph)
    }

    fn skeleton(
        goal: Vec<FactId>,
        nodes: Vec<(LandmarkKind, Vec<FactId>)>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let mut goal = goal;
        goal.sort_unstable();
        goal.dedup();
        let n = nodes.len();
        let mut seen = HashMap::new();
        let mut landmarks = Vec::with_capacity(n);
        for (i, (kind, mut facts)) in nodes.into_iter().enumerate() {
            facts.sort_unstable();
            facts.dedup();
            if facts.is_empty() {
                return Err(Error::InvalidGraph(format!("landmark {i} has no facts")));
            }
            if let Some(j) = seen.insert((kind, facts.clone()), i) {
                return Err(Error::InvalidGraph(format!("landmarks {j} and {i} are identical")));
            }
            landmarks.push(Landmark {
                kind,
                facts,
                supports: BTreeSet::new(),
            });
        }
        let mut edges = edges;
        edges.sort_unstable();
        edges.dedup();
        let mut predecessors = vec![Vec::new(); n];
        let mut successors = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidGraph(format!("bad edge {u} -> {v}")));
            }
            successors[u].push(v);
            predecessors[v].push(u);
        }
        let graph = LandmarkGraph {
            goal,
            landmarks,
            edges,
            predecessors,
            successors,
            solvable: true,
        };
        if let Some(&g) = graph.goal.iter().find(|&&g| graph.goal_landmark(g).is_none()) {
            return Err(Error::InvalidGraph(format!(
                "goal fact #{g} is not a singleton landmark"
            )));
        }
        Ok(graph)
    }

    fn check_supports(&self) -> Result<()> {
        for (i, l) in self.landmarks.iter().enumerate() {
            if l.supports.is_empty() {
                return Err(Error::InvalidGraph(format!(
                    "landmark {i} does not lead to any goal fact"
                )));
            }
            if let Some(&s) = l.supports.iter().find(|&&s| s >= self.goal.len()) {
                return Err(Error::InvalidGraph(format!(
                    "landmark {i} supports sub-goal {s}, goal has {}",
                    self.goal.len()
                )));
            }
        }
        Ok(())
    }

    /// Marker for a goal that is not relaxed-solvable.
    pub fn unsolvable(goal: Vec<FactId>) -> Self {
        let mut goal = goal;
        goal.sort_unstable();
        goal.dedup();
        LandmarkGraph {
            goal,
            landmarks: Vec::new(),
            edges: Vec::new(),
            predecessors: Vec::new(),
            successors: Vec::new(),
            solvable: false,
        }
    }

    pub fn is_solvable(&self) -> bool {
        self.solvable
    }

    pub fn goal(&self) -> &[FactId] {
        &self.goal
    }

    pub fn landmarks(&self) -> &[Landmark] {
        &self.landmarks
    }

    pub fn landmark(&self, i: usize) -> &Landmark {
        &self.landmarks[i]
    }

    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.predecessors[i]
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    /// Index of the singleton conjunctive landmark `{fact}`.
    pub fn goal_landmark(&self, fact: FactId) -> Option<usize> {
        self.find(LandmarkKind::Conjunctive, &[fact])
    }

    pub fn find(&self, kind: LandmarkKind, facts: &[FactId]) -> Option<usize> {
        self.landmarks
            .iter()
            .position(|l| l.kind == kind && l.facts == facts)
    }

    /// True for singleton landmarks holding a goal fact.
    pub fn is_goal_landmark(&self, i: usize) -> bool {
        let l = &self.landmarks[i];
        l.is_conjunctive() && l.facts.len() == 1 && self.goal.binary_search(&l.facts[0]).is_ok()
    }

    /// Kahn order; `None` if the edges contain a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.landmarks.len();
        let mut indegree: Vec<usize> = self.predecessors.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &self.successors[u] {
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Listing in the `Fact Landmarks:` / `(and ...)` / `(or ...)` style.
    pub fn to_text(&self, task: &GroundTask) -> String {
        let mut out = String::from("Fact Landmarks:\n");
        for l in &self.landmarks {
            out.push_str(&l.render(task));
            out.push('\n');
        }
        out
    }

    pub fn to_document(&self, task: &GroundTask) -> GraphDocument {
        let names = |facts: &[FactId]| -> Vec<String> {
            facts.iter().map(|&f| task.fact(f).to_string()).collect()
        };
        GraphDocument {
            goal: names(&self.goal),
            solvable: self.solvable,
            landmarks: self
                .landmarks
                .iter()
                .map(|l| LandmarkDocument {
                    kind: l.kind,
                    facts: names(&l.facts),
                    supports: Some(
                        l.supports
                            .iter()
                            .map(|&i| task.fact(self.goal[i]).to_string())
                            .collect(),
                    ),
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }

    pub fn to_json(&self, task: &GroundTask) -> String {
        serde_json::to_string_pretty(&self.to_document(task)).expect("graph documents serialize")
    }

    /// Resolves a document against `task`. Every fact must already be
    /// known. Supports are taken from the document when every landmark
    /// lists them (as sub-goal facts) and derived from the edges when none do.
    pub fn from_document(doc: &GraphDocument, task: &GroundTask) -> Result<Self> {
        let resolve = |names: &[String]| -> Result<Vec<FactId>> {
            names
                .iter()
                .map(|n| {
                    let fact = GroundFact::parse(n)?;
                    task.fact_id(&fact)
                        .ok_or_else(|| Error::InvalidGraph(format!("unknown fact {fact}")))
                })
                .collect()
        };
        let mut goal = resolve(&doc.goal)?;
        goal.sort_unstable();
        goal.dedup();
        if !doc.solvable {
            return Ok(LandmarkGraph::unsolvable(goal));
        }
        let nodes = doc
            .landmarks
            .iter()
            .map(|l| Ok((l.kind, resolve(&l.facts)?)))
            .collect::<Result<Vec<_>>>()?;
        let given = doc.landmarks.iter().filter(|l| l.supports.is_some()).count();
        if given == 0 {
            return LandmarkGraph::new(goal, nodes, doc.edges.clone());
        }
        if given != doc.landmarks.len() {
            return Err(Error::InvalidGraph(
                "supports must be given for every landmark or for none".into(),
            ));
        }
        let mut supports = Vec::with_capacity(nodes.len());
        for l in &doc.landmarks {
            let mut set = BTreeSet::new();
            for fact in resolve(l.supports.as_deref().unwrap_or_default())? {
                let i = goal.binary_search(&fact).map_err(|_| {
                    Error::InvalidGraph(format!("{} is not a goal fact", task.fact(fact)))
                })?;
                set.insert(i);
            }
            supports.push(set);
        }
        LandmarkGraph::with_supports(goal, nodes, doc.edges.clone(), supports)
    }

    pub fn from_json(text: &str, task: &GroundTask) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text)?;
        LandmarkGraph::from_document(&doc, task)
    }
}

/// Serialized form of a [`LandmarkGraph`] with facts spelled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub goal: Vec<String>,
    #[serde(default = "default_true")]
    pub solvable: bool,
    #[serde(default)]
    pub landmarks: Vec<LandmarkDocument>,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkDocument {
    pub kind: LandmarkKind,
    pub facts: Vec<String>,
    /// Sub-goal facts this landmark serves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supports: Option<Vec<String>>,
}

/// Relaxed reachability with one fact retracted from the initial state and
/// all of its achievers removed.
struct FactProbe {
    rpg: RelaxedPlanningGraph,
    goal_reachable: bool,
}

struct Extractor<'a> {
    task: &'a GroundTask,
    initial: &'a State,
    goal: &'a [FactId],
    probes: HashMap<FactId, FactProbe>,
}

impl<'a> Extractor<'a> {
    fn new(task: &'a GroundTask, initial: &'a State, goal: &'a [FactId]) -> Self {
        Extractor {
            task,
            initial,
            goal,
            probes: HashMap::new(),
        }
    }

    fn excluded_achievers(&self, facts: &[FactId]) -> FixedBitSet {
        let mut excluded = FixedBitSet::with_capacity(self.task.actions().len());
        for &f in facts {
            for &a in self.task.achievers(f) {
                excluded.insert(a);
            }
        }
        excluded
    }

    fn retracted(&self, facts: &[FactId]) -> State {
        let mut s = self.initial.clone();
        for &f in facts {
            s.remove(f);
        }
        s
    }

    fn probe(&mut self, fact: FactId) -> &FactProbe {
        if !self.probes.contains_key(&fact) {
            let excluded = self.excluded_achievers(&[fact]);
            let rpg = build_rpg(self.task, &self.retracted(&[fact]), &excluded);
            let goal_reachable = rpg.all_reachable(self.goal);
            self.probes.insert(fact, FactProbe { rpg, goal_reachable });
        }
        &self.probes[&fact]
    }

    fn joint_removal_blocks_goal(&self, facts: &[FactId]) -> bool {
        let excluded = self.excluded_achievers(facts);
        !relaxed_solvable(self.task, &self.retracted(facts), self.goal, &excluded)
    }

    fn verify(&mut self, kind: LandmarkKind, facts: &[FactId]) -> bool {
        match kind {
            LandmarkKind::Conjunctive => {
                if facts.iter().all(|f| self.goal.contains(f)) {
                    return true;
                }
                let individually = facts.iter().all(|&f| !self.probe(f).goal_reachable);
                individually || self.joint_removal_blocks_goal(facts)
            }
            LandmarkKind::Disjunctive => self.joint_removal_blocks_goal(facts),
        }
    }

    /// Achievers of `fact` that are applicable before `fact` first holds.
    fn first_achievers(&mut self, fact: FactId) -> Vec<ActionId> {
        let task = self.task;
        let probe = self.probe(fact);
        task.achievers(fact)
            .iter()
            .copied()
            .filter(|&a| probe.rpg.all_reachable(&task.action(a).pre))
            .collect()
    }

    /// Conjunctive and disjunctive candidates derived from `fact`.
    fn candidates(&mut self, fact: FactId) -> Vec<(LandmarkKind, Vec<FactId>)> {
        let achievers = self.first_achievers(fact);
        let Some((&first, rest)) = achievers.split_first() else {
            return Vec::new();
        };
        let task = self.task;
        let mut shared: Vec<FactId> = task.action(first).pre.clone();
        for &a in rest {
            let pre = &task.action(a).pre;
            shared.retain(|f| pre.binary_search(f).is_ok());
        }
        let mut out = Vec::new();
        if !shared.is_empty() {
            out.push((LandmarkKind::Conjunctive, shared.clone()));
        }
        if achievers.len() < 2 {
            return out;
        }
        let mut groups: BTreeMap<&str, BTreeSet<FactId>> = BTreeMap::new();
        for &a in &achievers {
            for &f in &task.action(a).pre {
                if shared.binary_search(&f).is_err() {
                    groups.entry(task.fact(f).predicate.as_str()).or_default().insert(f);
                }
            }
        }
        for group in groups.into_values() {
            if group.len() < 2 || group.len() > MAX_DISJUNCTION {
                continue;
            }
            let covers = achievers
                .iter()
                .all(|&a| task.action(a).pre.iter().any(|f| group.contains(f)));
            let all_initial = group.iter().all(|&f| self.initial.holds(f));
            if covers && !all_initial {
                out.push((LandmarkKind::Disjunctive, group.into_iter().collect()));
            }
        }
        out
    }

    fn run(mut self) -> Result<LandmarkGraph> {
        let mut nodes: Vec<(LandmarkKind, Vec<FactId>)> = Vec::new();
        let mut index: HashMap<(LandmarkKind, Vec<FactId>), Option<usize>> = HashMap::new();
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut queue = VecDeque::new();
        for &g in self.goal {
            let key = (LandmarkKind::Conjunctive, vec![g]);
            if index.contains_key(&key) {
                continue;
            }
            index.insert(key.clone(), Some(nodes.len()));
            queue.push_back(nodes.len());
            nodes.push(key);
        }
        while let Some(node) = queue.pop_front() {
            if nodes[node].0 == LandmarkKind::Disjunctive {
                continue;
            }
            let facts = nodes[node].1.clone();
            for p in facts {
                if self.initial.holds(p) {
                    continue;
                }
                for candidate in self.candidates(p) {
                    let child = match index.get(&candidate) {
                        Some(known) => *known,
                        None => {
                            let accepted = self.verify(candidate.0, &candidate.1);
                            let slot = accepted.then_some(nodes.len());
                            index.insert(candidate.clone(), slot);
                            if accepted {
                                queue.push_back(nodes.len());
                                nodes.push(candidate);
                            }
                            slot
                        }
                    };
                    if let Some(child) = child {
                        if child != node {
                            edges.insert((child, node));
                        }
                    }
                }
            }
        }
        LandmarkGraph::new(self.goal.to_vec(), nodes, edges.into_iter().collect())
    }
}

/// Extracts the landmark graph of `goal`; fails if the goal is not
/// relaxed-solvable from `initial`.
pub fn extract_landmarks(task: &GroundTask, initial: &State, goal: &[FactId]) -> Result<LandmarkGraph> {
    let mut goal = goal.to_vec();
    goal.sort_unstable();
    goal.dedup();
    if !relaxed_solvable(task, initial, &goal, &FixedBitSet::new()) {
        return Err(Error::UnsolvableGoal(task.format_facts(&goal)));
    }
    Extractor::new(task, initial, &goal).run()
}

/// Whether removing the candidate's achievers (and retracting its facts
/// from `initial`) makes `goal` relaxed-unsolvable. Conjunctions pass if
/// every member passes on its own or the whole conjunction does; a
/// conjunction of goal facts always passes.
pub fn verify_candidate(
    kind: LandmarkKind,
    facts: &[FactId],
    task: &GroundTask,
    initial: &State,
    goal: &[FactId],
) -> bool {
    Extractor::new(task, initial, goal).verify(kind, facts)
}

/// Extracts one graph per distinct goal. Unsolvable goals map to
/// [`LandmarkGraph::unsolvable`].
pub fn extract_for_goals(
    task: &GroundTask,
    initial: &State,
    goals: &[Vec<FactId>],
) -> BTreeMap<Vec<FactId>, LandmarkGraph> {
    let mut out = BTreeMap::new();
    for goal in goals {
        let mut key = goal.clone();
        key.sort_unstable();
        key.dedup();
        if out.contains_key(&key) {
            continue;
        }
        let graph = match extract_landmarks(task, initial, &key) {
            Ok(g) => g,
            Err(_) => LandmarkGraph::unsolvable(key.clone()),
        };
        out.insert(key, graph);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem};
    use crate::task::ground_instance;

    const BLOCKS: &str = include_str!("../tests/fixtures/blocks-domain.pddl");
    const FIG3: &str = include_str!("../tests/fixtures/words-problem.pddl");

    fn words() -> GroundTask {
        let d = parse_domain(BLOCKS).unwrap();
        ground_instance(&parse_problem(FIG3, &d).unwrap())
    }

    fn ids(task: &GroundTask, text: &str) -> Vec<FactId> {
        task.lookup_all(&GroundFact::parse_list(text).unwrap()).unwrap()
    }

    const RED: &str = "(clear r)(on r e)(on e d)(ontable d)";
    const BED: &str = "(clear b)(on b e)(on e d)(ontable d)";
    const SAD: &str = "(clear s)(on s a)(on a d)(ontable d)";

    #[test]
    fn worked_example_totals() {
        let t = words();
        for (goal, total) in [(RED, 10), (BED, 10), (SAD, 11)] {
            let g = extract_landmarks(&t, t.initial(), &ids(&t, goal)).unwrap();
            assert_eq!(g.len(), total, "{}", g.to_text(&t));
            assert!(g.landmarks().iter().all(Landmark::is_conjunctive));
        }
    }

    #[test]
    fn red_chain_structure() {
        let t = words();
        let g = extract_landmarks(&t, t.initial(), &ids(&t, RED)).unwrap();
        let node = |s: &str| g.find(LandmarkKind::Conjunctive, &ids(&t, s)).unwrap();
        let holding_e = node("(clear d)(holding e)");
        let unstack_pre = node("(on e a)(clear e)(handempty)");
        assert!(g.successors(unstack_pre).contains(&holding_e));
        assert!(g.successors(holding_e).contains(&node("(on e d)")));
        let on_e_d = ids(&t, "(on e d)")[0];
        let sub = g.goal().iter().position(|&f| f == on_e_d).unwrap();
        assert_eq!(g.landmark(unstack_pre).supports, BTreeSet::from([sub]));
    }

    #[test]
    fn goal_in_initial_state_yields_only_goal_landmarks() {
        let t = words();
        let goal = ids(&t, "(on d b)(clear s)");
        let g = extract_landmarks(&t, t.initial(), &goal).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn verify_candidate_cases() {
        let t = words();
        let red = ids(&t, RED);
        let c = LandmarkKind::Conjunctive;
        assert!(verify_candidate(c, &ids(&t, "(holding e)"), &t, t.initial(), &red));
        assert!(verify_candidate(c, &ids(&t, "(on r e)"), &t, t.initial(), &red));
        assert!(!verify_candidate(c, &ids(&t, "(ontable a)"), &t, t.initial(), &red));
    }

    #[test]
    fn unsolvable_goal_is_an_error_and_a_marker() {
        let mut t = words();
        let goal = t.intern_all(&GroundFact::parse_list("(on a a)").unwrap());
        assert!(matches!(
            extract_landmarks(&t, t.initial(), &goal),
            Err(Error::UnsolvableGoal(_))
        ));
        let map = extract_for_goals(&t, t.initial(), &[goal.clone(), goal.clone()]);
        assert_eq!(map.len(), 1);
        assert!(!map[&goal].is_solvable());
        assert!(extract_for_goals(&t, t.initial(), &[]).is_empty());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let t = words();
        let g = extract_landmarks(&t, t.initial(), &ids(&t, SAD)).unwrap();
        let back = LandmarkGraph::from_json(&g.to_json(&t), &t).unwrap();
        assert_eq!(back, g);

        let mut doc = g.to_document(&t);
        let (u, v) = doc.edges[0];
        doc.edges.push((v, u));
        assert!(matches!(
            LandmarkGraph::from_document(&doc, &t),
            Err(Error::InvalidGraph(_))
        ));
    }

    #[test]
    fn text_listing_shape() {
        let t = words();
        let g = extract_landmarks(&t, t.initial(), &ids(&t, RED)).unwrap();
        let text = g.to_text(&t);
        assert!(text.starts_with("Fact Landmarks:\n(and (clear r))\n"));
        assert!(text.contains("\n(and (clear e) (handempty) (on e a))\n"), "{text}");
    }
}
