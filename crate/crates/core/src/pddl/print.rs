use std::fmt::{self, Display, Formatter};

use super::{AtomSchema, PlanningDomain, PlanningInstance, Term, TypedName};

struct TypedList<'a>(&'a [TypedName]);

impl Display for TypedList<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{} - {}", t.name, t.ty)?;
        }
        Ok(())
    }
}

impl Display for AtomSchema {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            match a {
                Term::Var(v) | Term::Const(v) => write!(f, " {v}")?,
            }
        }
        f.write_str(")")
    }
}

impl Display for PlanningDomain {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            writeln!(f, "  (:requirements {})", self.requirements.join(" "))?;
        }
        if !self.types.is_empty() {
            f.write_str("  (:types")?;
            for t in &self.types {
                write!(f, " {} - {}", t.name, t.parent)?;
            }
            f.write_str(")\n")?;
        }
        if !self.constants.is_empty() {
            writeln!(f, "  (:constants {})", TypedList(&self.constants))?;
        }
        if !self.predicates.is_empty() {
            f.write_str("  (:predicates")?;
            for p in &self.predicates {
                if p.params.is_empty() {
                    write!(f, " ({})", p.name)?;
                } else {
                    write!(f, " ({} {})", p.name, TypedList(&p.params))?;
                }
            }
            f.write_str(")\n")?;
        }
        for op in &self.operators {
            writeln!(f, "  (:action {}", op.name)?;
            writeln!(f, "    :parameters ({})", TypedList(&op.params))?;
            f.write_str("    :precondition (and")?;
            for a in &op.pre {
                write!(f, " {a}")?;
            }
            f.write_str(")\n    :effect (and")?;
            for a in &op.add {
                write!(f, " {a}")?;
            }
            for a in &op.del {
                write!(f, " (not {a})")?;
            }
            f.write_str("))\n")?;
        }
        f.write_str(")\n")
    }
}

impl Display for PlanningInstance {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "  (:domain {})", self.domain.name)?;
        let objects: Vec<TypedName> = self
            .objects
            .iter()
            .filter(|o| !self.domain.constants.contains(o))
            .cloned()
            .collect();
        writeln!(f, "  (:objects {})", TypedList(&objects))?;
        f.write_str("  (:init")?;
        for fact in &self.initial {
            write!(f, " {fact}")?;
        }
        f.write_str(")\n  (:goal (and")?;
        for fact in &self.goal {
            write!(f, " {fact}")?;
        }
        f.write_str(")))\n")
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_domain, parse_problem};

    #[test]
    fn domain_and_problem_round_trip() {
        let text = r#"(define (domain log) (:requirements :strips :typing)
            (:types truck - vehicle vehicle place)
            (:constants depot - place)
            (:predicates (at ?v - vehicle ?p - place) (road ?a ?b - place) (idle))
            (:action drive :parameters (?t - truck ?a ?b - place)
              :precondition (and (at ?t ?a) (road ?a ?b))
              :effect (and (at ?t ?b) (not (at ?t ?a)))))"#;
        let d = parse_domain(text).unwrap();
        let printed = d.to_string();
        assert_eq!(parse_domain(&printed).unwrap(), d);
        assert_eq!(parse_domain(&printed).unwrap().to_string(), printed);

        let p = parse_problem(
            "(define (problem p) (:domain log) (:objects t1 - truck x - place)
              (:init (at t1 depot) (road depot x)) (:goal (and (at t1 x))))",
            &d,
        )
        .unwrap();
        assert_eq!(parse_problem(&p.to_string(), &d).unwrap(), p);
    }
}
