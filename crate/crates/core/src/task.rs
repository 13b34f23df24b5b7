//! Grounded planning tasks: interned facts, actions and STRIPS transitions.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::pddl::{GroundFact, PlanningDomain, PlanningInstance, Term, TypedName};

pub type FactId = usize;
pub type ActionId = usize;

/// Bidirectional map between ground facts and dense ids.
#[derive(Debug, Clone, Default)]
pub struct FactTable {
    facts: Vec<GroundFact>,
    index: HashMap<GroundFact, FactId>,
}

impl FactTable {
    pub fn intern(&mut self, fact: GroundFact) -> FactId {
        if let Some(&id) = self.index.get(&fact) {
            return id;
        }
        let id = self.facts.len();
        self.index.insert(fact.clone(), id);
        self.facts.push(fact);
        id
    }

    pub fn get(&self, fact: &GroundFact) -> Option<FactId> {
        self.index.get(fact).copied()
    }

    pub fn fact(&self, id: FactId) -> &GroundFact {
        &self.facts[id]
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FactId, &GroundFact)> {
        self.facts.iter().enumerate()
    }
}

/// Closed-world state over interned facts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State {
    bits: FixedBitSet,
}

impl State {
    pub fn empty(num_facts: usize) -> Self {
        State {
            bits: FixedBitSet::with_capacity(num_facts),
        }
    }

    pub fn from_facts(num_facts: usize, facts: impl IntoIterator<Item = FactId>) -> Self {
        let mut s = State::empty(num_facts);
        for f in facts {
            s.insert(f);
        }
        s
    }

    pub fn holds(&self, fact: FactId) -> bool {
        self.bits.contains(fact)
    }

    pub fn holds_all(&self, facts: &[FactId]) -> bool {
        facts.iter().all(|&f| self.holds(f))
    }

    pub fn insert(&mut self, fact: FactId) {
        self.bits.grow(fact + 1);
        self.bits.insert(fact);
    }

    pub fn remove(&mut self, fact: FactId) {
        if fact < self.bits.len() {
            self.bits.set(fact, false);
        }
    }

    pub fn facts(&self) -> impl Iterator<Item = FactId> + '_ {
        self.bits.ones()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }
}

/// A ground operator. Fact lists are sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub id: ActionId,
    pub name: String,
    pub args: Vec<String>,
    pub pre: Vec<FactId>,
    pub add: Vec<FactId>,
    pub del: Vec<FactId>,
}

impl Action {
    pub fn cost(&self) -> u32 {
        1
    }

    /// `(name arg1 arg2 ...)`, the form used in observation files.
    pub fn signature(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundingOptions {
    /// Skip instantiations that bind one object to two parameters.
    pub distinct_args: bool,
    /// Drop instantiations whose static preconditions fail in the initial state.
    pub prune_static: bool,
}

impl Default for GroundingOptions {
    fn default() -> Self {
        GroundingOptions {
            distinct_args: true,
            prune_static: true,
        }
    }
}

/// Grounded actions over an interned fact universe, with achiever and
/// consumer indices.
#[derive(Debug, Clone)]
pub struct GroundTask {
    facts: FactTable,
    actions: Vec<Action>,
    initial: State,
    achievers: Vec<Vec<ActionId>>,
    consumers: Vec<Vec<ActionId>>,
    by_signature: HashMap<String, ActionId>,
}

impl GroundTask {
    fn new(facts: FactTable, actions: Vec<Action>, initial: State) -> Self {
        let mut achievers = vec![Vec::new(); facts.len()];
        let mut consumers = vec![Vec::new(); facts.len()];
        let mut by_signature = HashMap::with_capacity(actions.len());
        for a in &actions {
            for &f in &a.add {
                achievers[f].push(a.id);
            }
            for &f in &a.pre {
                consumers[f].push(a.id);
            }
            by_signature.insert(a.signature(), a.id);
        }
        GroundTask {
            facts,
            actions,
            initial,
            achievers,
            consumers,
            by_signature,
        }
    }

    pub fn facts(&self) -> &FactTable {
        &self.facts
    }

    pub fn num_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn fact(&self, id: FactId) -> &GroundFact {
        self.facts.fact(id)
    }

    pub fn fact_id(&self, fact: &GroundFact) -> Option<FactId> {
        self.facts.get(fact)
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, id: ActionId) -> &Action {
        &self.actions[id]
    }

    pub fn initial(&self) -> &State {
        &self.initial
    }

    /// Actions whose add list contains `fact`.
    pub fn achievers(&self, fact: FactId) -> &[ActionId] {
        &self.achievers[fact]
    }

    /// Actions whose precondition contains `fact`.
    pub fn consumers(&self, fact: FactId) -> &[ActionId] {
        &self.consumers[fact]
    }

    /// Case-insensitive lookup of `(name arg ...)`.
    pub fn action_by_signature(&self, signature: &str) -> Option<ActionId> {
        if let Some(&id) = self.by_signature.get(signature) {
            return Some(id);
        }
        let normalized = GroundFact::parse(signature.trim()).ok()?.to_string();
        self.by_signature.get(&normalized).copied()
    }

    /// Adds a fact to the universe (e.g. a goal fact no action mentions).
    /// Such a fact has no achievers and is unreachable unless initial.
    pub fn intern(&mut self, fact: GroundFact) -> FactId {
        let id = self.facts.intern(fact);
        if id == self.achievers.len() {
            self.achievers.push(Vec::new());
            self.consumers.push(Vec::new());
        }
        id
    }

    /// Interns every fact and returns the sorted, duplicate-free id list.
    pub fn intern_all<'a>(&mut self, facts: impl IntoIterator<Item = &'a GroundFact>) -> Vec<FactId> {
        let mut ids: Vec<FactId> = facts.into_iter().map(|f| self.intern(f.clone())).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Looks up facts without interning; `None` if any is unknown.
    pub fn lookup_all<'a>(&self, facts: impl IntoIterator<Item = &'a GroundFact>) -> Option<Vec<FactId>> {
        let mut ids = facts
            .into_iter()
            .map(|f| self.fact_id(f))
            .collect::<Option<Vec<_>>>()?;
        ids.sort_unstable();
        ids.dedup();
        Some(ids)
    }

    pub fn state_from_facts<'a>(&mut self, facts: impl IntoIterator<Item = &'a GroundFact>) -> State {
        let ids = self.intern_all(facts);
        State::from_facts(self.num_facts(), ids)
    }

    pub fn format_facts(&self, facts: &[FactId]) -> String {
        facts
            .iter()
            .map(|&f| self.fact(f).to_string())
            .collect::<Vec<_>>()
            .join("")
    }
}

pub fn applicable(state: &State, action: &Action) -> bool {
    state.holds_all(&action.pre)
}

/// Standard STRIPS successor: delete the del list, then add the add list.
pub fn apply(task: &GroundTask, state: &State, action: &Action) -> Result<State> {
    if let Some(&missing) = action.pre.iter().find(|&&f| !state.holds(f)) {
        return Err(Error::PreconditionViolation {
            action: action.signature(),
            missing: task.fact(missing).to_string(),
        });
    }
    Ok(successor(state, action))
}

/// `apply` without the precondition check.
pub fn successor(state: &State, action: &Action) -> State {
    let mut next = state.clone();
    for &f in &action.del {
        next.remove(f);
    }
    for &f in &action.add {
        next.insert(f);
    }
    next
}

#[derive(Debug, Clone)]
enum ArgRef {
    Param(usize),
    Const(String),
}

struct AtomTemplate {
    predicate: String,
    args: Vec<ArgRef>,
}

impl AtomTemplate {
    fn new(atom: &crate::pddl::AtomSchema, params: &[TypedName]) -> Self {
        let args = atom
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => ArgRef::Param(
                    params
                        .iter()
                        .position(|p| &p.name == v)
                        .expect("parser validates variables"),
                ),
                Term::Const(c) => ArgRef::Const(c.clone()),
            })
            .collect();
        AtomTemplate {
            predicate: atom.predicate.clone(),
            args,
        }
    }

    /// Highest parameter index this atom depends on.
    fn last_param(&self) -> Option<usize> {
        self.args
            .iter()
            .filter_map(|a| match a {
                ArgRef::Param(i) => Some(*i),
                ArgRef::Const(_) => None,
            })
            .max()
    }

    fn ground(&self, binding: &[&str]) -> GroundFact {
        GroundFact {
            predicate: self.predicate.clone(),
            args: self
                .args
                .iter()
                .map(|a| match a {
                    ArgRef::Param(i) => binding[*i].to_string(),
                    ArgRef::Const(c) => c.clone(),
                })
                .collect(),
        }
    }
}

struct RawAction {
    name: String,
    args: Vec<String>,
    pre: Vec<GroundFact>,
    add: Vec<GroundFact>,
    del: Vec<GroundFact>,
}

fn static_predicates(domain: &PlanningDomain) -> HashSet<&str> {
    let fluent: HashSet<&str> = domain
        .operators
        .iter()
        .flat_map(|o| o.add.iter().chain(&o.del))
        .map(|a| a.predicate.as_str())
        .collect();
    domain
        .predicates
        .iter()
        .map(|p| p.name.as_str())
        .filter(|p| !fluent.contains(p))
        .collect()
}

fn enumerate_operator(
    domain: &PlanningDomain,
    op: &crate::pddl::Operator,
    objects: &[TypedName],
    initial: &BTreeSet<GroundFact>,
    statics: &HashSet<&str>,
    options: GroundingOptions,
    out: &mut Vec<RawAction>,
) {
    let typed = domain.is_typed();
    let candidates: Vec<Vec<&str>> = op
        .params
        .iter()
        .map(|p| {
            let mut c: Vec<&str> = objects
                .iter()
                .filter(|o| !typed || domain.is_subtype(&o.ty, &p.ty))
                .map(|o| o.name.as_str())
                .collect();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect();
    let pre: Vec<AtomTemplate> = op.pre.iter().map(|a| AtomTemplate::new(a, &op.params)).collect();
    let add: Vec<AtomTemplate> = op.add.iter().map(|a| AtomTemplate::new(a, &op.params)).collect();
    let del: Vec<AtomTemplate> = op.del.iter().map(|a| AtomTemplate::new(a, &op.params)).collect();

    // static checks fire as soon as their last parameter is bound
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); op.params.len() + 1];
    if options.prune_static {
        for (i, atom) in pre.iter().enumerate() {
            if statics.contains(atom.predicate.as_str()) {
                let slot = atom.last_param().map_or(0, |p| p + 1);
                checks[slot].push(i);
            }
        }
    }
    let passes = |binding: &[&str], slot: usize| {
        checks[slot]
            .iter()
            .all(|&i| initial.contains(&pre[i].ground(binding)))
    };
    if !passes(&[], 0) {
        return;
    }

    let mut binding: Vec<&str> = Vec::with_capacity(op.params.len());
    // explicit stack of next-candidate indices per depth
    let mut next = vec![0usize; op.params.len()];
    let n = op.params.len();
    if n == 0 {
        out.push(build_raw(op, &binding, &pre, &add, &del));
        return;
    }
    let mut depth = 0;
    loop {
        if next[depth] >= candidates[depth].len() {
            if depth == 0 {
                break;
            }
            next[depth] = 0;
            depth -= 1;
            binding.pop();
            continue;
        }
        let obj = candidates[depth][next[depth]];
        next[depth] += 1;
        if options.distinct_args && binding.contains(&obj) {
            continue;
        }
        binding.push(obj);
        if !passes(&binding, depth + 1) {
            binding.pop();
            continue;
        }
        if depth + 1 == n {
            out.push(build_raw(op, &binding, &pre, &add, &del));
            binding.pop();
        } else {
            depth += 1;
        }
    }
}

fn build_raw(
    op: &crate::pddl::Operator,
    binding: &[&str],
    pre: &[AtomTemplate],
    add: &[AtomTemplate],
    del: &[AtomTemplate],
) -> RawAction {
    RawAction {
        name: op.name.clone(),
        args: binding.iter().map(|s| s.to_string()).collect(),
        pre: pre.iter().map(|a| a.ground(binding)).collect(),
        add: add.iter().map(|a| a.ground(binding)).collect(),
        del: del.iter().map(|a| a.ground(binding)).collect(),
    }
}

fn sorted_ids(table: &mut FactTable, facts: Vec<GroundFact>) -> Vec<FactId> {
    let mut ids: Vec<FactId> = facts.into_iter().map(|f| table.intern(f)).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Grounds `domain` over `objects` with an explicit initial state and goal.
///
/// Actions come out sorted by signature. Initial facts are interned first,
/// then action facts, then goal facts.
pub fn ground_with(
    domain: &PlanningDomain,
    objects: &[TypedName],
    initial: &BTreeSet<GroundFact>,
    goal: &BTreeSet<GroundFact>,
    options: GroundingOptions,
) -> GroundTask {
    let statics = static_predicates(domain);
    let mut ops: Vec<&crate::pddl::Operator> = domain.operators.iter().collect();
    ops.sort_by(|a, b| a.name.cmp(&b.name));
    let mut raw = Vec::new();
    for op in ops {
        enumerate_operator(domain, op, objects, initial, &statics, options, &mut raw);
    }

    let mut table = FactTable::default();
    for f in initial {
        table.intern(f.clone());
    }
    let mut actions = Vec::with_capacity(raw.len());
    for (id, r) in raw.into_iter().enumerate() {
        let pre = sorted_ids(&mut table, r.pre);
        let add = sorted_ids(&mut table, r.add);
        let mut del = sorted_ids(&mut table, r.del);
        let before = del.len();
        del.retain(|f| add.binary_search(f).is_err());
        if del.len() != before {
            log::warn!(
                "({} {}) adds and deletes the same fact; keeping it",
                r.name,
                r.args.join(" ")
            );
        }
        actions.push(Action {
            id,
            name: r.name,
            args: r.args,
            pre,
            add,
            del,
        });
    }
    for f in goal {
        table.intern(f.clone());
    }
    let init_state = State::from_facts(table.len(), initial.iter().map(|f| table.get(f).unwrap()));
    GroundTask::new(table, actions, init_state)
}

/// Every type-consistent instantiation over `objects`, no initial state.
pub fn ground(domain: &PlanningDomain, objects: &[TypedName]) -> GroundTask {
    ground_with(
        domain,
        objects,
        &BTreeSet::new(),
        &BTreeSet::new(),
        GroundingOptions {
            prune_static: false,
            ..GroundingOptions::default()
        },
    )
}

/// Grounds an instance, pruning instantiations with false static preconditions.
pub fn ground_instance(instance: &PlanningInstance) -> GroundTask {
    ground_with(
        &instance.domain,
        &instance.objects,
        &instance.initial,
        &instance.goal,
        GroundingOptions::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem};

    const BLOCKS: &str = include_str!("../tests/fixtures/blocks-domain.pddl");
    const FIG3: &str = include_str!("../tests/fixtures/words-problem.pddl");

    fn objs(names: &[&str]) -> Vec<TypedName> {
        names
            .iter()
            .map(|n| TypedName {
                name: n.to_string(),
                ty: "object".into(),
            })
            .collect()
    }

    #[test]
    fn two_blocks_ground_to_eight_actions() {
        let d = parse_domain(BLOCKS).unwrap();
        let task = ground(&d, &objs(&["a", "b"]));
        let sigs: Vec<String> = task.actions().iter().map(Action::signature).collect();
        assert_eq!(
            sigs,
            [
                "(pickup a)",
                "(pickup b)",
                "(putdown a)",
                "(putdown b)",
                "(stack a b)",
                "(stack b a)",
                "(unstack a b)",
                "(unstack b a)"
            ]
        );
        assert!(task.actions().iter().all(|a| a.cost() == 1));
    }

    #[test]
    fn zero_objects_ground_nothing() {
        let d = parse_domain(BLOCKS).unwrap();
        assert!(ground(&d, &[]).actions().is_empty());
    }

    #[test]
    fn words_count_and_determinism() {
        let d = parse_domain(BLOCKS).unwrap();
        let p = parse_problem(FIG3, &d).unwrap();
        let t1 = ground_instance(&p);
        let t2 = ground_instance(&p);
        // n pickup + n putdown + n(n-1) stack + n(n-1) unstack
        assert_eq!(t1.actions().len(), 6 + 6 + 30 + 30);
        assert_eq!(t1.actions(), t2.actions());
    }

    #[test]
    fn signature_lookup_is_case_insensitive() {
        let d = parse_domain(BLOCKS).unwrap();
        let p = parse_problem(FIG3, &d).unwrap();
        let t = ground_instance(&p);
        let id = t.action_by_signature("(UNSTACK E A)").unwrap();
        assert_eq!(t.action(id).signature(), "(unstack e a)");
        assert!(t.action_by_signature("(unstack z a)").is_none());
    }

    #[test]
    fn overlapping_add_del_keeps_fact() {
        let d = parse_domain(
            "(define (domain o) (:predicates (p ?x)) (:action t :parameters (?x) :precondition (p ?x) :effect (and (p ?x) (not (p ?x)))))",
        )
        .unwrap();
        let t = ground(&d, &objs(&["a"]));
        let a = &t.actions()[0];
        assert_eq!(a.add.len(), 1);
        assert!(a.del.is_empty());
    }

    #[test]
    fn static_preconditions_prune_instantiations() {
        let d = parse_domain(
            "(define (domain g) (:predicates (conn ?a ?b) (at ?a))
              (:action move :parameters (?a ?b) :precondition (and (at ?a) (conn ?a ?b)) :effect (and (at ?b) (not (at ?a)))))",
        )
        .unwrap();
        let p = parse_problem(
            "(define (problem p) (:domain g) (:objects x y z) (:init (at x) (conn x y) (conn y z)) (:goal (at z)))",
            &d,
        )
        .unwrap();
        let t = ground_instance(&p);
        let sigs: Vec<String> = t.actions().iter().map(Action::signature).collect();
        assert_eq!(sigs, ["(move x y)", "(move y z)"]);
        assert_eq!(ground(&d, &p.objects).actions().len(), 6);
    }

    #[test]
    fn apply_follows_strips_semantics() {
        let d = parse_domain(BLOCKS).unwrap();
        let p = parse_problem(FIG3, &d).unwrap();
        let t = ground_instance(&p);
        let f = |s: &str| t.fact_id(&GroundFact::parse(s).unwrap()).unwrap();
        let unstack = t.action(t.action_by_signature("(unstack d b)").unwrap());
        assert!(applicable(t.initial(), unstack));
        let next = apply(&t, t.initial(), unstack).unwrap();
        assert!(next.holds(f("(holding d)")) && next.holds(f("(clear b)")));
        assert!(!next.holds(f("(on d b)")) && !next.holds(f("(handempty)")));

        let stack = t.action(t.action_by_signature("(stack r e)").unwrap());
        assert!(!applicable(t.initial(), stack));
        assert!(matches!(
            apply(&t, t.initial(), stack),
            Err(Error::PreconditionViolation { .. })
        ));
    }
}
