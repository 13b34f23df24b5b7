//! Building bundles from a domain, a problem whose goal is the hidden one,
//! and an observation spec.

use goalrec_core::obsgen::{find_plan, observe_plan, ObservationSpec};
use goalrec_core::pddl::{parse_domain, parse_problem, GroundFact};
use goalrec_core::task::ground_instance;

use crate::bundle::{format_hypothesis, make_template, BundleFiles, BundleMeta};
use crate::error::Result;

fn same_goal(a: &[GroundFact], b: &[GroundFact]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    a.dedup();
    b.sort();
    b.dedup();
    a == b
}

/// Plans for the problem's goal and observes the plan per `spec`. The
/// real goal is appended to `hypotheses` when missing; without
/// hypotheses it is the only candidate.
pub fn generate_bundle(
    domain_text: &str,
    problem_text: &str,
    hypotheses: Option<&[Vec<GroundFact>]>,
    spec: &ObservationSpec,
) -> Result<BundleFiles> {
    spec.validate()?;
    let domain = parse_domain(domain_text)?;
    let instance = parse_problem(problem_text, &domain)?;
    let real: Vec<GroundFact> = instance.goal.iter().cloned().collect();
    let mut hyps: Vec<Vec<GroundFact>> = hypotheses.map(<[_]>::to_vec).unwrap_or_default();
    if !hyps.iter().any(|h| same_goal(h, &real)) {
        hyps.push(real.clone());
    }

    let mut task = ground_instance(&instance);
    let goal = task.intern_all(&real);
    let plan = find_plan(&task, task.initial(), &goal)?;
    let observed = observe_plan(&task, &plan, spec)?;

    let mut obs = String::new();
    for &a in &observed {
        obs.push_str(&task.action(a).to_string());
        obs.push('\n');
    }
    let mut hyps_text = String::new();
    for h in &hyps {
        hyps_text.push_str(&format_hypothesis(h));
        hyps_text.push('\n');
    }
    let meta = BundleMeta {
        domain: domain.name.clone(),
        observability: spec.observability,
        noise: spec.noise_count,
        seed: spec.seed,
        plan_length: plan.len(),
    };
    Ok(BundleFiles {
        domain: domain_text.to_string(),
        template: make_template(&instance),
        hyps: hyps_text,
        obs,
        real_hyp: Some(format!("{}\n", format_hypothesis(&real))),
        meta: Some(serde_json::to_string_pretty(&meta)? + "\n"),
    })
}
