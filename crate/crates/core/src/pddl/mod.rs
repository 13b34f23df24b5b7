//! The STRIPS fragment of PDDL: domain/problem types, parser and printer.
//!
//! Supported requirements are `:strips` and `:typing`. Anything that needs
//! negation, equality, quantifiers, conditional effects or numbers is
//! rejected with [`ParseError::Unsupported`].

mod parser;
mod print;
pub(crate) mod sexpr;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parser::{parse_domain, parse_problem};

/// Root of every type hierarchy; untyped objects have this type.
pub const ROOT_TYPE: &str = "object";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported PDDL feature: {0}")]
    Unsupported(String),
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("predicate `{predicate}` expects {expected} arguments, found {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("undeclared object `{0}`")]
    UndeclaredObject(String),
    #[error("variable `{variable}` is not a parameter of `{operator}`")]
    UndeclaredVariable { operator: String, variable: String },
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("operator `{0}` is declared twice")]
    DuplicateOperator(String),
    #[error("problem is for domain `{found}`, expected `{expected}`")]
    DomainMismatch { expected: String, found: String },
    #[error("object `{object}` of type `{actual}` cannot fill a `{expected}` slot of `{predicate}`")]
    TypeMismatch {
        predicate: String,
        object: String,
        expected: String,
        actual: String,
    },
}

/// A positive ground atom such as `(on e d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundFact {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundFact {
    pub fn new<S: Into<String>>(predicate: impl Into<String>, args: impl IntoIterator<Item = S>) -> Self {
        GroundFact {
            predicate: predicate.into().to_lowercase(),
            args: args.into_iter().map(|a| a.into().to_lowercase()).collect(),
        }
    }

    /// Parses a single parenthesized atom, e.g. `(on E D)`.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let expr = sexpr::read_one(text)?;
        let items = expr
            .as_list()
            .ok_or_else(|| sexpr::syntax(expr.pos(), "expected a parenthesized atom"))?;
        let mut symbols = Vec::with_capacity(items.len());
        for item in items {
            let sym = item
                .as_atom()
                .ok_or_else(|| sexpr::syntax(item.pos(), "nested list inside an atom"))?;
            symbols.push(sym.to_string());
        }
        let mut iter = symbols.into_iter();
        let predicate = iter
            .next()
            .ok_or_else(|| sexpr::syntax(expr.pos(), "empty atom"))?;
        Ok(GroundFact {
            predicate,
            args: iter.collect(),
        })
    }

    /// Parses every parenthesized atom in `text`, ignoring separators such as
    /// commas between them. Used for hypothesis and fact-observation lines.
    pub fn parse_list(text: &str) -> Result<Vec<Self>, ParseError> {
        let mut facts = Vec::new();
        let mut rest = text;
        while let Some(start) = rest.find('(') {
            let end = rest[start..]
                .find(')')
                .map(|e| start + e)
                .ok_or_else(|| ParseError::Syntax {
                    line: 1,
                    column: text.len() - rest.len() + start + 1,
                    message: "unclosed '('".into(),
                })?;
            facts.push(GroundFact::parse(&rest[start..=end])?);
            rest = &rest[end + 1..];
        }
        Ok(facts)
    }
}

impl fmt::Display for GroundFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

/// Argument of an atom inside an operator schema. Variables keep their `?`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSchema {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedName>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub parent: String,
}

/// An operator schema: conjunctive positive precondition, add and delete lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operator {
    pub name: String,
    pub params: Vec<TypedName>,
    pub pre: Vec<AtomSchema>,
    pub add: Vec<AtomSchema>,
    pub del: Vec<AtomSchema>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanningDomain {
    pub name: String,
    pub requirements: Vec<String>,
    pub types: Vec<TypeDecl>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateDecl>,
    pub operators: Vec<Operator>,
}

impl PlanningDomain {
    pub fn is_typed(&self) -> bool {
        self.requirements.iter().any(|r| r == ":typing") || !self.types.is_empty()
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn operator(&self, name: &str) -> Option<&Operator> {
        self.operators.iter().find(|o| o.name == name)
    }

    pub fn has_type(&self, name: &str) -> bool {
        name == ROOT_TYPE || self.types.iter().any(|t| t.name == name)
    }

    fn parent_map(&self) -> HashMap<&str, &str> {
        self.types
            .iter()
            .map(|t| (t.name.as_str(), t.parent.as_str()))
            .collect()
    }

    /// True if `ty` equals `ancestor` or inherits from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ancestor == ROOT_TYPE || ty == ancestor {
            return true;
        }
        let parents = self.parent_map();
        let mut current = ty;
        // bounded walk; malformed hierarchies with cycles just stop
        for _ in 0..=parents.len() {
            match parents.get(current) {
                Some(&p) if p == ancestor => return true,
                Some(&p) if p != current => current = p,
                _ => return false,
            }
        }
        false
    }
}

/// A parsed problem bound to its domain: objects, initial facts and goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanningInstance {
    pub name: String,
    pub domain: PlanningDomain,
    /// Problem objects followed by domain constants.
    pub objects: Vec<TypedName>,
    pub initial: BTreeSet<GroundFact>,
    pub goal: BTreeSet<GroundFact>,
}

impl PlanningInstance {
    pub fn holds_initially(&self, fact: &GroundFact) -> bool {
        self.initial.contains(fact)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fact_display_and_parse_agree() {
        let f = GroundFact::parse("(On E D)").unwrap();
        assert_eq!(f, GroundFact::new("on", ["e", "d"]));
        assert_eq!(f.to_string(), "(on e d)");
        assert_eq!(GroundFact::parse("(handempty)").unwrap().to_string(), "(handempty)");
    }

    #[test]
    fn parse_list_ignores_separators() {
        let facts = GroundFact::parse_list("(clear r), (on r e),(on e d) (ontable d)").unwrap();
        assert_eq!(facts.len(), 4);
        assert_eq!(facts[3], GroundFact::new("ontable", ["d"]));
        assert!(GroundFact::parse_list("").unwrap().is_empty());
        assert!(GroundFact::parse_list("(on a").is_err());
    }
}
