use std::collections::{BTreeSet, HashMap, HashSet};

use super::sexpr::{self, syntax, Pos, SExpr};
use super::{
    AtomSchema, GroundFact, Operator, ParseError, PlanningDomain, PlanningInstance, PredicateDecl,
    Term, TypeDecl, TypedName, ROOT_TYPE,
};

const SUPPORTED_REQUIREMENTS: &[&str] = &[":strips", ":typing"];

fn expect_list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], ParseError> {
    e.as_list()
        .ok_or_else(|| syntax(e.pos(), format!("expected {what}")))
}

fn expect_atom<'a>(e: &'a SExpr, what: &str) -> Result<&'a str, ParseError> {
    e.as_atom()
        .ok_or_else(|| syntax(e.pos(), format!("expected {what}")))
}

/// Splits the top-level `(define (kind name) sections...)` form.
fn split_define<'a>(
    root: &'a SExpr,
    kind: &str,
) -> Result<(&'a str, &'a [SExpr]), ParseError> {
    let items = expect_list(root, "(define ...)")?;
    if items.first().and_then(SExpr::as_atom) != Some("define") {
        return Err(syntax(root.pos(), "expected (define ...)"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| syntax(root.pos(), format!("missing ({kind} <name>)")))?;
    let header_items = expect_list(header, &format!("({kind} <name>)"))?;
    match header_items {
        [k, name] if k.as_atom() == Some(kind) => Ok((expect_atom(name, "a name")?, &items[2..])),
        _ => Err(syntax(header.pos(), format!("expected ({kind} <name>)"))),
    }
}

/// Parses `a b - t c` style lists. Untyped entries get [`ROOT_TYPE`].
fn parse_typed_list(items: &[SExpr]) -> Result<Vec<TypedName>, ParseError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        match item.as_atom() {
            Some("-") => {
                let ty = items
                    .get(i + 1)
                    .ok_or_else(|| syntax(item.pos(), "missing type after '-'"))?;
                if ty.head() == Some("either") {
                    return Err(ParseError::Unsupported("either types".into()));
                }
                let ty = expect_atom(ty, "a type name")?;
                out.extend(pending.drain(..).map(|name| TypedName {
                    name,
                    ty: ty.to_string(),
                }));
                i += 2;
            }
            Some(name) => {
                pending.push(name.to_string());
                i += 1;
            }
            None => return Err(syntax(item.pos(), "expected a name")),
        }
    }
    out.extend(pending.into_iter().map(|name| TypedName {
        name,
        ty: ROOT_TYPE.to_string(),
    }));
    Ok(out)
}

fn unsupported_connective(head: &str) -> Option<&'static str> {
    match head {
        "not" => Some(":negative-preconditions"),
        "=" => Some(":equality"),
        "or" | "imply" => Some(":disjunctive-preconditions"),
        "exists" => Some(":existential-preconditions"),
        "forall" => Some(":universal-preconditions"),
        "when" => Some(":conditional-effects"),
        "increase" | "decrease" | "assign" | "scale-up" | "scale-down" => Some(":numeric-fluents"),
        "<" | ">" | "<=" | ">=" => Some(":numeric-fluents"),
        "preference" => Some(":preferences"),
        _ => None,
    }
}

/// Flattens a conjunction of positive atoms (`(and ...)`, a single atom, or `()`).
fn parse_conjunction(e: &SExpr) -> Result<Vec<&[SExpr]>, ParseError> {
    let items = expect_list(e, "a formula")?;
    match items.first().and_then(SExpr::as_atom) {
        None if items.is_empty() => Ok(Vec::new()),
        Some("and") => {
            let mut atoms = Vec::new();
            for sub in &items[1..] {
                atoms.extend(parse_conjunction(sub)?);
            }
            Ok(atoms)
        }
        Some(head) => {
            if let Some(feature) = unsupported_connective(head) {
                return Err(ParseError::Unsupported(feature.into()));
            }
            Ok(vec![items])
        }
        None => Err(syntax(e.pos(), "expected a predicate name")),
    }
}

struct AtomContext<'a> {
    predicates: &'a HashMap<String, usize>,
    operator: &'a str,
    params: &'a HashSet<&'a str>,
    constants: &'a HashSet<&'a str>,
}

impl AtomContext<'_> {
    fn schema(&self, items: &[SExpr]) -> Result<AtomSchema, ParseError> {
        let pred = expect_atom(&items[0], "a predicate name")?;
        let arity = *self
            .predicates
            .get(pred)
            .ok_or_else(|| ParseError::UndeclaredPredicate(pred.to_string()))?;
        if arity != items.len() - 1 {
            return Err(ParseError::ArityMismatch {
                predicate: pred.to_string(),
                expected: arity,
                found: items.len() - 1,
            });
        }
        let mut args = Vec::with_capacity(arity);
        for a in &items[1..] {
            let name = expect_atom(a, "a term")?;
            if name.starts_with('?') {
                if !self.params.contains(name) {
                    return Err(ParseError::UndeclaredVariable {
                        operator: self.operator.to_string(),
                        variable: name.to_string(),
                    });
                }
                args.push(Term::Var(name.to_string()));
            } else {
                if !self.constants.contains(name) {
                    return Err(ParseError::UndeclaredObject(name.to_string()));
                }
                args.push(Term::Const(name.to_string()));
            }
        }
        Ok(AtomSchema {
            predicate: pred.to_string(),
            args,
        })
    }
}

fn parse_action(
    items: &[SExpr],
    pos: Pos,
    predicates: &HashMap<String, usize>,
    constants: &HashSet<&str>,
    domain: &PlanningDomain,
) -> Result<Operator, ParseError> {
    let name = items
        .get(1)
        .ok_or_else(|| syntax(pos, "missing action name"))
        .and_then(|e| expect_atom(e, "an action name"))?
        .to_string();
    let mut params = Vec::new();
    let mut pre_expr = None;
    let mut eff_expr = None;
    let mut i = 2;
    while i < items.len() {
        let key = expect_atom(&items[i], "an action keyword")?;
        let value = items
            .get(i + 1)
            .ok_or_else(|| syntax(items[i].pos(), format!("missing value for {key}")))?;
        match key {
            ":parameters" => params = parse_typed_list(expect_list(value, "a parameter list")?)?,
            ":precondition" => pre_expr = Some(value),
            ":effect" => eff_expr = Some(value),
            other => return Err(ParseError::Unsupported(format!("action keyword {other}"))),
        }
        i += 2;
    }
    for p in &params {
        if !domain.has_type(&p.ty) {
            return Err(ParseError::UnknownType(p.ty.clone()));
        }
    }
    let param_names: HashSet<&str> = params.iter().map(|p| p.name.as_str()).collect();
    let ctx = AtomContext {
        predicates,
        operator: &name,
        params: &param_names,
        constants,
    };

    let mut pre = Vec::new();
    if let Some(e) = pre_expr {
        for atom in parse_conjunction(e)? {
            pre.push(ctx.schema(atom)?);
        }
    }
    let mut add = Vec::new();
    let mut del = Vec::new();
    if let Some(e) = eff_expr {
        collect_effects(e, &ctx, &mut add, &mut del)?;
    }
    Ok(Operator {
        name,
        params,
        pre,
        add,
        del,
    })
}

fn collect_effects(
    e: &SExpr,
    ctx: &AtomContext<'_>,
    add: &mut Vec<AtomSchema>,
    del: &mut Vec<AtomSchema>,
) -> Result<(), ParseError> {
    let items = expect_list(e, "an effect")?;
    match items.first().and_then(SExpr::as_atom) {
        None if items.is_empty() => Ok(()),
        Some("and") => items[1..]
            .iter()
            .try_for_each(|sub| collect_effects(sub, ctx, add, del)),
        Some("not") => {
            let inner = items
                .get(1)
                .ok_or_else(|| syntax(e.pos(), "empty (not)"))?;
            let inner_items = expect_list(inner, "an atom")?;
            if let Some(feature) = inner.head().and_then(unsupported_connective) {
                return Err(ParseError::Unsupported(feature.into()));
            }
            if inner_items.is_empty() {
                return Err(syntax(inner.pos(), "empty atom"));
            }
            del.push(ctx.schema(inner_items)?);
            Ok(())
        }
        Some("forall") => Err(ParseError::Unsupported(":conditional-effects".into())),
        Some(head) => {
            if let Some(feature) = unsupported_connective(head) {
                return Err(ParseError::Unsupported(feature.into()));
            }
            add.push(ctx.schema(items)?);
            Ok(())
        }
        None => Err(syntax(e.pos(), "expected an effect")),
    }
}

/// Parses a STRIPS domain definition.
pub fn parse_domain(text: &str) -> Result<PlanningDomain, ParseError> {
    let root = sexpr::read_one(text)?;
    let (name, sections) = split_define(&root, "domain")?;
    let mut domain = PlanningDomain {
        name: name.to_string(),
        requirements: Vec::new(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        operators: Vec::new(),
    };
    let mut actions = Vec::new();
    for section in sections {
        let items = expect_list(section, "a domain section")?;
        let key = items
            .first()
            .map(|k| expect_atom(k, "a section keyword"))
            .transpose()?
            .ok_or_else(|| syntax(section.pos(), "empty section"))?;
        match key {
            ":requirements" => {
                for r in &items[1..] {
                    let r = expect_atom(r, "a requirement")?;
                    if !SUPPORTED_REQUIREMENTS.contains(&r) {
                        return Err(ParseError::Unsupported(r.to_string()));
                    }
                    domain.requirements.push(r.to_string());
                }
            }
            ":types" => {
                domain.types = parse_typed_list(&items[1..])?
                    .into_iter()
                    .filter(|t| t.name != ROOT_TYPE)
                    .map(|t| TypeDecl {
                        name: t.name,
                        parent: t.ty,
                    })
                    .collect();
            }
            ":constants" => domain.constants = parse_typed_list(&items[1..])?,
            ":predicates" => {
                for p in &items[1..] {
                    let p_items = expect_list(p, "a predicate declaration")?;
                    let pname = p_items
                        .first()
                        .ok_or_else(|| syntax(p.pos(), "empty predicate declaration"))
                        .and_then(|e| expect_atom(e, "a predicate name"))?;
                    domain.predicates.push(PredicateDecl {
                        name: pname.to_string(),
                        params: parse_typed_list(&p_items[1..])?,
                    });
                }
            }
            ":action" => actions.push(section),
            ":functions" => return Err(ParseError::Unsupported(":numeric-fluents".into())),
            ":derived" => return Err(ParseError::Unsupported(":derived-predicates".into())),
            ":durative-action" => return Err(ParseError::Unsupported(":durative-actions".into())),
            ":constraints" => return Err(ParseError::Unsupported(":constraints".into())),
            other => return Err(syntax(section.pos(), format!("unknown domain section {other}"))),
        }
    }
    for t in &domain.types {
        if !domain.has_type(&t.parent) {
            return Err(ParseError::UnknownType(t.parent.clone()));
        }
    }
    for p in &domain.predicates {
        for param in &p.params {
            if !domain.has_type(&param.ty) {
                return Err(ParseError::UnknownType(param.ty.clone()));
            }
        }
    }
    for c in &domain.constants {
        if !domain.has_type(&c.ty) {
            return Err(ParseError::UnknownType(c.ty.clone()));
        }
    }

    let predicates: HashMap<String, usize> = domain
        .predicates
        .iter()
        .map(|p| (p.name.clone(), p.params.len()))
        .collect();
    let constants: HashSet<&str> = domain.constants.iter().map(|c| c.name.as_str()).collect();
    let mut operators = Vec::new();
    let mut seen = HashSet::new();
    for section in actions {
        let op = parse_action(
            section.as_list().unwrap_or_default(),
            section.pos(),
            &predicates,
            &constants,
            &domain,
        )?;
        if !seen.insert(op.name.clone()) {
            return Err(ParseError::DuplicateOperator(op.name));
        }
        operators.push(op);
    }
    domain.operators = operators;
    Ok(domain)
}

fn ground_atom(
    items: &[SExpr],
    domain: &PlanningDomain,
    object_types: &HashMap<&str, &str>,
) -> Result<GroundFact, ParseError> {
    let pred_name = expect_atom(&items[0], "a predicate name")?;
    let decl = domain
        .predicate(pred_name)
        .ok_or_else(|| ParseError::UndeclaredPredicate(pred_name.to_string()))?;
    if decl.params.len() != items.len() - 1 {
        return Err(ParseError::ArityMismatch {
            predicate: pred_name.to_string(),
            expected: decl.params.len(),
            found: items.len() - 1,
        });
    }
    let mut args = Vec::with_capacity(decl.params.len());
    for (a, param) in items[1..].iter().zip(&decl.params) {
        let obj = expect_atom(a, "an object name")?;
        let ty = object_types
            .get(obj)
            .ok_or_else(|| ParseError::UndeclaredObject(obj.to_string()))?;
        if domain.is_typed() && !domain.is_subtype(ty, &param.ty) {
            return Err(ParseError::TypeMismatch {
                predicate: pred_name.to_string(),
                object: obj.to_string(),
                expected: param.ty.clone(),
                actual: ty.to_string(),
            });
        }
        args.push(obj.to_string());
    }
    Ok(GroundFact {
        predicate: pred_name.to_string(),
        args,
    })
}

/// Parses a problem against an already parsed domain and grounds its
/// initial state and goal.
pub fn parse_problem(text: &str, domain: &PlanningDomain) -> Result<PlanningInstance, ParseError> {
    let root = sexpr::read_one(text)?;
    let (name, sections) = split_define(&root, "problem")?;
    let mut objects = Vec::new();
    let mut init_exprs: &[SExpr] = &[];
    let mut goal_expr = None;
    for section in sections {
        let items = expect_list(section, "a problem section")?;
        let key = items
            .first()
            .map(|k| expect_atom(k, "a section keyword"))
            .transpose()?
            .ok_or_else(|| syntax(section.pos(), "empty section"))?;
        match key {
            ":domain" => {
                let d = items
                    .get(1)
                    .ok_or_else(|| syntax(section.pos(), "missing domain name"))
                    .and_then(|e| expect_atom(e, "a domain name"))?;
                if d != domain.name {
                    return Err(ParseError::DomainMismatch {
                        expected: domain.name.clone(),
                        found: d.to_string(),
                    });
                }
            }
            ":requirements" => {
                for r in &items[1..] {
                    let r = expect_atom(r, "a requirement")?;
                    if !SUPPORTED_REQUIREMENTS.contains(&r) {
                        return Err(ParseError::Unsupported(r.to_string()));
                    }
                }
            }
            ":objects" => objects = parse_typed_list(&items[1..])?,
            ":init" => init_exprs = &items[1..],
            ":goal" => {
                let g = items
                    .get(1)
                    .ok_or_else(|| syntax(section.pos(), "missing goal formula"))?;
                goal_expr = Some(g);
            }
            ":metric" => return Err(ParseError::Unsupported(":action-costs".into())),
            other => return Err(syntax(section.pos(), format!("unknown problem section {other}"))),
        }
    }
    for o in &objects {
        if !domain.has_type(&o.ty) {
            return Err(ParseError::UnknownType(o.ty.clone()));
        }
    }
    objects.extend(domain.constants.iter().cloned());
    let object_types: HashMap<&str, &str> = objects
        .iter()
        .map(|o| (o.name.as_str(), o.ty.as_str()))
        .collect();

    let mut initial = BTreeSet::new();
    for e in init_exprs {
        let items = expect_list(e, "an initial atom")?;
        match items.first().and_then(SExpr::as_atom) {
            Some("=") => return Err(ParseError::Unsupported(":numeric-fluents".into())),
            Some("not") => continue, // closed world: negative init atoms are redundant
            Some(_) => {
                initial.insert(ground_atom(items, domain, &object_types)?);
            }
            None => return Err(syntax(e.pos(), "expected an atom")),
        }
    }
    let mut goal = BTreeSet::new();
    if let Some(g) = goal_expr {
        for atom in parse_conjunction(g)? {
            goal.insert(ground_atom(atom, domain, &object_types)?);
        }
    }
    Ok(PlanningInstance {
        name: name.to_string(),
        domain: domain.clone(),
        objects,
        initial,
        goal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BLOCKS: &str = r#"
    (define (domain blocks)
      (:requirements :strips)
      (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
      (:action pick-up :parameters (?x)
        :precondition (and (clear ?x) (ontable ?x) (handempty))
        :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x))))"#;

    #[test]
    fn parses_blocks_operator() {
        let d = parse_domain(BLOCKS).unwrap();
        assert_eq!(d.name, "blocks");
        let op = d.operator("pick-up").unwrap();
        assert_eq!(op.pre.len(), 3);
        assert_eq!(op.add.len(), 1);
        assert_eq!(op.del.len(), 3);
        assert!(!d.is_typed());
    }

    #[test]
    fn empty_domain() {
        let d = parse_domain("(define (domain d))").unwrap();
        assert!(d.operators.is_empty());
        assert!(d.predicates.is_empty());
    }

    #[test]
    fn rejects_adl_requirement() {
        let err = parse_domain("(define (domain d) (:requirements :strips :adl))").unwrap_err();
        assert_eq!(err, ParseError::Unsupported(":adl".into()));
    }

    #[test]
    fn rejects_negative_preconditions_and_conditional_effects() {
        let neg = r#"(define (domain d) (:predicates (p ?x))
            (:action a :parameters (?x) :precondition (not (p ?x)) :effect (p ?x)))"#;
        assert_eq!(
            parse_domain(neg).unwrap_err(),
            ParseError::Unsupported(":negative-preconditions".into())
        );
        let eq = r#"(define (domain d) (:predicates (p ?x))
            (:action a :parameters (?x ?y) :precondition (and (p ?x) (= ?x ?y)) :effect (p ?y)))"#;
        assert_eq!(
            parse_domain(eq).unwrap_err(),
            ParseError::Unsupported(":equality".into())
        );
        let when = r#"(define (domain d) (:predicates (p ?x))
            (:action a :parameters (?x) :precondition () :effect (when (p ?x) (not (p ?x)))))"#;
        assert_eq!(
            parse_domain(when).unwrap_err(),
            ParseError::Unsupported(":conditional-effects".into())
        );
    }

    #[test]
    fn rejects_unknown_variable_and_duplicate_operator() {
        let bad_var = r#"(define (domain d) (:predicates (p ?x))
            (:action a :parameters (?x) :precondition (p ?y) :effect (p ?x)))"#;
        assert!(matches!(
            parse_domain(bad_var),
            Err(ParseError::UndeclaredVariable { .. })
        ));
        let dup = r#"(define (domain d) (:predicates (p))
            (:action a :parameters () :effect (p)) (:action a :parameters () :effect (p)))"#;
        assert_eq!(
            parse_domain(dup).unwrap_err(),
            ParseError::DuplicateOperator("a".into())
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_domain("(define (domain d)\n  (:predicates (p ?x)\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, column: 3, .. }), "{err:?}");
    }

    #[test]
    fn typed_lists_and_subtypes() {
        let d = parse_domain(
            r#"(define (domain t) (:requirements :strips :typing)
                (:types truck plane - vehicle vehicle place)
                (:predicates (at ?v - vehicle ?p - place)))"#,
        )
        .unwrap();
        assert!(d.is_typed());
        assert!(d.is_subtype("truck", "vehicle"));
        assert!(d.is_subtype("truck", "object"));
        assert!(!d.is_subtype("place", "vehicle"));
        let p = parse_problem(
            "(define (problem p) (:domain t) (:objects t1 - truck l1 - place) (:init (at t1 l1)) (:goal (at t1 l1)))",
            &d,
        )
        .unwrap();
        assert_eq!(p.goal.len(), 1);
        let bad = parse_problem(
            "(define (problem p) (:domain t) (:objects t1 - truck l1 - place) (:init (at l1 t1)) (:goal (and)))",
            &d,
        );
        assert!(matches!(bad, Err(ParseError::TypeMismatch { .. })));
    }

    #[test]
    fn problem_errors() {
        let d = parse_domain(BLOCKS).unwrap();
        let unknown = parse_problem(
            "(define (problem p) (:domain blocks) (:objects a) (:init (clear a)) (:goal (and (clear z))))",
            &d,
        );
        assert_eq!(unknown.unwrap_err(), ParseError::UndeclaredObject("z".into()));
        let arity = parse_problem(
            "(define (problem p) (:domain blocks) (:objects a) (:init (clear a a)) (:goal (and)))",
            &d,
        );
        assert!(matches!(arity, Err(ParseError::ArityMismatch { .. })));
        let empty = parse_problem(
            "(define (problem p) (:domain blocks) (:objects a) (:init (clear a)) (:goal (and)))",
            &d,
        )
        .unwrap();
        assert!(empty.goal.is_empty());
    }
}
