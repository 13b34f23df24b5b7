//! Dataset bundles: a domain, a problem template with a `<HYPOTHESIS>`
//! goal, candidate goals, observations and optionally the real goal.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use goalrec_core::pddl::{parse_domain, parse_problem, GroundFact, PlanningInstance};
use goalrec_core::recognition::GoalRecognitionProblem;
use goalrec_core::task::{ground_with, GroundingOptions};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, HarnessError, Result};

pub const PLACEHOLDER: &str = "<HYPOTHESIS>";
pub const DOMAIN_FILE: &str = "domain.pddl";
pub const TEMPLATE_FILE: &str = "template.pddl";
pub const HYPS_FILE: &str = "hyps.dat";
pub const OBS_FILE: &str = "obs.dat";
pub const REAL_FILE: &str = "real_hyp.dat";
pub const META_FILE: &str = "meta.json";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundlePaths {
    pub domain: PathBuf,
    pub template: PathBuf,
    pub hyps: PathBuf,
    pub obs: PathBuf,
    pub real_hyp: Option<PathBuf>,
    pub meta: Option<PathBuf>,
}

impl BundlePaths {
    /// Default file names inside `dir`; optional files only if present.
    pub fn in_dir(dir: &Path) -> Self {
        let optional = |name: &str| Some(dir.join(name)).filter(|p| p.is_file());
        BundlePaths {
            domain: dir.join(DOMAIN_FILE),
            template: dir.join(TEMPLATE_FILE),
            hyps: dir.join(HYPS_FILE),
            obs: dir.join(OBS_FILE),
            real_hyp: optional(REAL_FILE),
            meta: optional(META_FILE),
        }
    }
}

/// Generation parameters recorded next to generated bundles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub domain: String,
    pub observability: f64,
    pub noise: usize,
    pub seed: u64,
    pub plan_length: usize,
}

/// The raw contents of a bundle's files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleFiles {
    pub domain: String,
    pub template: String,
    pub hyps: String,
    pub obs: String,
    pub real_hyp: Option<String>,
    pub meta: Option<String>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

impl BundleFiles {
    pub fn read(paths: &BundlePaths) -> Result<Self> {
        Ok(BundleFiles {
            domain: read(&paths.domain)?,
            template: read(&paths.template)?,
            hyps: read(&paths.hyps)?,
            obs: read(&paths.obs)?,
            real_hyp: paths.real_hyp.as_deref().map(read).transpose()?,
            meta: paths.meta.as_deref().map(read).transpose()?,
        })
    }

    /// Writes the files under their default names, creating `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut files = vec![
            (DOMAIN_FILE, &self.domain),
            (TEMPLATE_FILE, &self.template),
            (HYPS_FILE, &self.hyps),
            (OBS_FILE, &self.obs),
        ];
        if let Some(real) = &self.real_hyp {
            files.push((REAL_FILE, real));
        }
        if let Some(meta) = &self.meta {
            files.push((META_FILE, meta));
        }
        for (name, text) in files {
            let path = dir.join(name);
            fs::write(&path, text).map_err(io_err(&path))?;
        }
        Ok(())
    }
}

/// A loaded bundle ready for recognition.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub name: String,
    pub domain_name: String,
    pub hypotheses: Vec<Vec<GroundFact>>,
    /// Index of the real goal in `hypotheses`.
    pub real: Option<usize>,
    pub problem: GoalRecognitionProblem,
    pub meta: Option<BundleMeta>,
}

impl Bundle {
    pub fn domain_label(&self) -> &str {
        self.meta.as_ref().map_or(&self.domain_name, |m| &m.domain)
    }

    pub fn observability(&self) -> Option<f64> {
        self.meta.as_ref().map(|m| m.observability)
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with(';'))
}

/// One goal per line, fluents separated by commas.
pub fn parse_hypotheses(text: &str) -> Result<Vec<Vec<GroundFact>>> {
    content_lines(text)
        .map(|l| Ok(GroundFact::parse_list(l)?))
        .collect()
}

/// One action signature (or fact set) per line; blank and `;` lines skipped.
pub fn parse_observations(text: &str) -> Vec<String> {
    content_lines(text).map(str::to_string).collect()
}

pub fn format_hypothesis(goal: &[GroundFact]) -> String {
    goal.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Replaces the placeholder with the conjunction of `goal`.
pub fn substitute(template: &str, goal: &[GroundFact]) -> Result<String> {
    if !template.contains(PLACEHOLDER) {
        return Err(HarnessError::MissingPlaceholder);
    }
    let atoms: Vec<String> = goal.iter().map(ToString::to_string).collect();
    Ok(template.replace(PLACEHOLDER, &format!("(and {})", atoms.join(" "))))
}

/// Renders `instance` as a template whose goal is the placeholder.
pub fn make_template(instance: &PlanningInstance) -> String {
    let mut empty = instance.clone();
    empty.goal.clear();
    empty
        .to_string()
        .replace("(:goal (and))", &format!("(:goal (and {PLACEHOLDER}))"))
}

fn goal_key(goal: &[GroundFact]) -> BTreeSet<&GroundFact> {
    goal.iter().collect()
}

pub fn load_bundle(paths: &BundlePaths, facts_obs: bool) -> Result<Bundle> {
    let name = paths
        .hyps
        .parent()
        .map(|p| p.display().to_string())
        .unwrap_or_default();
    load_bundle_files(&name, &BundleFiles::read(paths)?, facts_obs)
}

pub fn load_bundle_files(name: &str, files: &BundleFiles, facts_obs: bool) -> Result<Bundle> {
    let domain = parse_domain(&files.domain)?;
    let hypotheses = parse_hypotheses(&files.hyps)?;
    if hypotheses.is_empty() {
        return Err(HarnessError::NoHypotheses);
    }
    let mut instances = Vec::with_capacity(hypotheses.len());
    for h in &hypotheses {
        instances.push(parse_problem(&substitute(&files.template, h)?, &domain)?);
    }
    let first = &instances[0];
    let task = ground_with(
        &domain,
        &first.objects,
        &first.initial,
        &BTreeSet::new(),
        GroundingOptions::default(),
    );
    let goals: Vec<Vec<GroundFact>> = instances
        .iter()
        .map(|i| i.goal.iter().cloned().collect())
        .collect();
    let real = match &files.real_hyp {
        None => None,
        Some(text) => {
            let real = parse_hypotheses(text)?
                .into_iter()
                .next()
                .ok_or(HarnessError::MissingRealGoal)?;
            let key = goal_key(&real);
            let idx = hypotheses
                .iter()
                .position(|h| goal_key(h) == key)
                .ok_or_else(|| HarnessError::RealGoalNotFound(format_hypothesis(&real)))?;
            Some(idx)
        }
    };
    let meta = files
        .meta
        .as_deref()
        .map(serde_json::from_str::<BundleMeta>)
        .transpose()?;
    let observations = parse_observations(&files.obs);
    let problem = GoalRecognitionProblem::new(task, &goals, &observations, facts_obs)?;
    Ok(Bundle {
        name: name.to_string(),
        domain_name: domain.name,
        hypotheses,
        real,
        problem,
        meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOMAIN: &str = "(define (domain d) (:predicates (p ?x) (q ?x))
        (:action a :parameters (?x) :precondition (p ?x) :effect (q ?x)))";
    const TEMPLATE: &str = "(define (problem t) (:domain d) (:objects x y)
        (:init (p x) (p y)) (:goal (and <HYPOTHESIS>)))";

    fn files(hyps: &str, obs: &str, real: Option<&str>) -> BundleFiles {
        BundleFiles {
            domain: DOMAIN.into(),
            template: TEMPLATE.into(),
            hyps: hyps.into(),
            obs: obs.into(),
            real_hyp: real.map(Into::into),
            meta: None,
        }
    }

    #[test]
    fn loads_hypotheses_and_skips_comments() {
        let b = load_bundle_files(
            "t",
            &files("(q x)\n(q y)\n\n(q x),(q y)\n", "; comment\n\n(A X)\n", Some("(q y)\n")),
            false,
        )
        .unwrap();
        assert_eq!(b.problem.candidate_goals.len(), 3);
        assert_eq!(b.problem.observations.len(), 1);
        assert_eq!(b.real, Some(1));
        assert_eq!(b.domain_label(), "d");
    }

    #[test]
    fn real_goal_must_be_a_hypothesis() {
        let err = load_bundle_files("t", &files("(q x)\n", "", Some("(q y)")), false).unwrap_err();
        assert!(matches!(err, HarnessError::RealGoalNotFound(_)));
    }

    #[test]
    fn template_needs_placeholder() {
        let mut f = files("(q x)", "", None);
        f.template = f.template.replace(PLACEHOLDER, "(q x)");
        assert!(matches!(load_bundle_files("t", &f, false), Err(HarnessError::MissingPlaceholder)));
    }

    #[test]
    fn template_round_trip() {
        let domain = parse_domain(DOMAIN).unwrap();
        let inst = parse_problem(&substitute(TEMPLATE, &[GroundFact::parse("(q x)").unwrap()]).unwrap(), &domain)
            .unwrap();
        let t = make_template(&inst);
        assert!(t.contains(PLACEHOLDER));
        let back = parse_problem(&substitute(&t, &[GroundFact::parse("(q x)").unwrap()]).unwrap(), &domain).unwrap();
        assert_eq!(back.initial, inst.initial);
        assert_eq!(back.goal, inst.goal);
    }
}
