//! Seeded generators of recognition problems for four domain families.
//! Candidate goals are fact subsets of states reached by random walks,
//! so every goal is solvable and no goal contains another.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use goalrec_core::obsgen::ObservationSpec;
use goalrec_core::pddl::{parse_domain, parse_problem, GroundFact};
use goalrec_core::task::{ground_instance, successor, GroundTask, State};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::{load_bundle_files, substitute, Bundle, BundleFiles, PLACEHOLDER};
use crate::dataset::generate_bundle;
use crate::error::{HarnessError, Result};

pub const BLOCKS_DOMAIN: &str = "(define (domain blocks)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
  (:action pickup
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
  (:action putdown
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y)))))
";

pub const FERRY_DOMAIN: &str = "(define (domain ferry)
  (:requirements :strips :typing)
  (:types car location)
  (:predicates (at-ferry ?l - location) (at ?c - car ?l - location) (empty-ferry) (on ?c - car))
  (:action sail
    :parameters (?from ?to - location)
    :precondition (at-ferry ?from)
    :effect (and (at-ferry ?to) (not (at-ferry ?from))))
  (:action board
    :parameters (?car - car ?loc - location)
    :precondition (and (at ?car ?loc) (at-ferry ?loc) (empty-ferry))
    :effect (and (on ?car) (not (at ?car ?loc)) (not (empty-ferry))))
  (:action debark
    :parameters (?car - car ?loc - location)
    :precondition (and (on ?car) (at-ferry ?loc))
    :effect (and (at ?car ?loc) (empty-ferry) (not (on ?car)))))
";

pub const LOGISTICS_DOMAIN: &str = "(define (domain logistics)
  (:requirements :strips :typing)
  (:types truck airplane - vehicle
          package vehicle - physobj
          airport location - place
          city place physobj - object)
  (:predicates (in-city ?loc - place ?city - city)
               (at ?obj - physobj ?loc - place)
               (in ?pkg - package ?veh - vehicle))
  (:action load-truck
    :parameters (?pkg - package ?truck - truck ?loc - place)
    :precondition (and (at ?truck ?loc) (at ?pkg ?loc))
    :effect (and (not (at ?pkg ?loc)) (in ?pkg ?truck)))
  (:action load-airplane
    :parameters (?pkg - package ?airplane - airplane ?loc - airport)
    :precondition (and (at ?pkg ?loc) (at ?airplane ?loc))
    :effect (and (not (at ?pkg ?loc)) (in ?pkg ?airplane)))
  (:action unload-truck
    :parameters (?pkg - package ?truck - truck ?loc - place)
    :precondition (and (at ?truck ?loc) (in ?pkg ?truck))
    :effect (and (not (in ?pkg ?truck)) (at ?pkg ?loc)))
  (:action unload-airplane
    :parameters (?pkg - package ?airplane - airplane ?loc - airport)
    :precondition (and (in ?pkg ?airplane) (at ?airplane ?loc))
    :effect (and (not (in ?pkg ?airplane)) (at ?pkg ?loc)))
  (:action drive-truck
    :parameters (?truck - truck ?from ?to - place ?city - city)
    :precondition (and (at ?truck ?from) (in-city ?from ?city) (in-city ?to ?city))
    :effect (and (not (at ?truck ?from)) (at ?truck ?to)))
  (:action fly-airplane
    :parameters (?airplane - airplane ?from ?to - airport)
    :precondition (at ?airplane ?from)
    :effect (and (not (at ?airplane ?from)) (at ?airplane ?to))))
";

pub const GRID_DOMAIN: &str = "(define (domain grid)
  (:requirements :strips :typing)
  (:types place key shape)
  (:predicates (conn ?x ?y - place) (key-shape ?k - key ?s - shape) (lock-shape ?x - place ?s - shape)
               (at ?k - key ?x - place) (at-robot ?x - place) (locked ?x - place)
               (holding ?k - key) (open ?x - place) (arm-empty))
  (:action unlock
    :parameters (?curpos ?lockpos - place ?key - key ?shape - shape)
    :precondition (and (conn ?curpos ?lockpos) (key-shape ?key ?shape) (lock-shape ?lockpos ?shape)
                       (at-robot ?curpos) (locked ?lockpos) (holding ?key))
    :effect (and (open ?lockpos) (not (locked ?lockpos))))
  (:action move
    :parameters (?curpos ?nextpos - place)
    :precondition (and (at-robot ?curpos) (conn ?curpos ?nextpos) (open ?nextpos))
    :effect (and (at-robot ?nextpos) (not (at-robot ?curpos))))
  (:action pickup
    :parameters (?curpos - place ?key - key)
    :precondition (and (at-robot ?curpos) (at ?key ?curpos) (arm-empty))
    :effect (and (holding ?key) (not (at ?key ?curpos)) (not (arm-empty))))
  (:action pickup-and-loose
    :parameters (?curpos - place ?newkey ?oldkey - key)
    :precondition (and (at-robot ?curpos) (holding ?oldkey) (at ?newkey ?curpos))
    :effect (and (holding ?newkey) (at ?oldkey ?curpos) (not (holding ?oldkey)) (not (at ?newkey ?curpos))))
  (:action putdown
    :parameters (?curpos - place ?key - key)
    :precondition (and (at-robot ?curpos) (holding ?key))
    :effect (and (arm-empty) (at ?key ?curpos) (not (holding ?key)))))
";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Blocks,
    Ferry,
    Logistics,
    Grid,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Blocks, Family::Ferry, Family::Logistics, Family::Grid];

    pub fn domain(self) -> &'static str {
        match self {
            Family::Blocks => BLOCKS_DOMAIN,
            Family::Ferry => FERRY_DOMAIN,
            Family::Logistics => LOGISTICS_DOMAIN,
            Family::Grid => GRID_DOMAIN,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Blocks => "blocks",
            Family::Ferry => "ferry",
            Family::Logistics => "logistics",
            Family::Grid => "grid",
        })
    }
}

impl FromStr for Family {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| HarnessError::Invalid(format!("unknown domain family `{s}`")))
    }
}

/// Instance size. `Tiny` keeps at most three objects of each type and
/// goals within eight steps of the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Tiny,
    Small,
    Large,
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Tiny => "tiny",
            Scale::Small => "small",
            Scale::Large => "large",
        })
    }
}

/// A generated problem: domain text, goal template and candidate goals.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteProblem {
    pub name: String,
    pub family: Family,
    pub domain: String,
    pub template: String,
    pub hypotheses: Vec<Vec<GroundFact>>,
    pub real: usize,
}

impl SuiteProblem {
    /// The template with the real goal filled in.
    pub fn problem_text(&self) -> Result<String> {
        substitute(&self.template, &self.hypotheses[self.real])
    }

    pub fn problem_text_for(&self, goal: usize) -> Result<String> {
        substitute(&self.template, &self.hypotheses[goal])
    }

    /// Plans for the real goal and observes the plan per `spec`.
    pub fn bundle(&self, spec: &ObservationSpec) -> Result<BundleFiles> {
        let mut files = generate_bundle(&self.domain, &self.problem_text()?, Some(&self.hypotheses), spec)?;
        files.template = self.template.clone();
        Ok(files)
    }

    pub fn load(&self, spec: &ObservationSpec) -> Result<Bundle> {
        load_bundle_files(&self.name, &self.bundle(spec)?, false)
    }
}

struct Layout {
    objects: String,
    init: Vec<GroundFact>,
    /// Predicate filter for goal facts.
    goal_fact: Box<dyn Fn(&GroundFact) -> bool>,
}

fn fact(pred: &str, args: &[&str]) -> GroundFact {
    GroundFact::new(pred, args.iter().copied())
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn blocks(rng: &mut ChaCha8Rng, scale: Scale) -> Layout {
    let n = match scale {
        Scale::Tiny => 3,
        Scale::Small => rng.gen_range(5..=7),
        Scale::Large => rng.gen_range(10..=14),
    };
    let mut blocks = names("b", n);
    blocks.shuffle(rng);
    let mut init = vec![fact("handempty", &[])];
    let mut i = 0;
    while i < n {
        let height = rng.gen_range(1..=(n - i).min(4));
        let tower = &blocks[i..i + height];
        init.push(fact("ontable", &[&tower[0]]));
        for w in tower.windows(2) {
            init.push(fact("on", &[&w[1], &w[0]]));
        }
        init.push(fact("clear", &[&tower[height - 1]]));
        i += height;
    }
    blocks.sort();
    Layout {
        objects: blocks.join(" "),
        init,
        goal_fact: Box::new(|f| matches!(f.predicate.as_str(), "on" | "ontable" | "clear")),
    }
}

fn ferry(rng: &mut ChaCha8Rng, scale: Scale) -> Layout {
    let (cars, locs) = match scale {
        Scale::Tiny => (rng.gen_range(1..=3), rng.gen_range(2..=3)),
        Scale::Small => (rng.gen_range(3..=5), rng.gen_range(3..=5)),
        Scale::Large => (rng.gen_range(8..=10), rng.gen_range(6..=8)),
    };
    let cars = names("c", cars);
    let locs = names("l", locs);
    let mut init = vec![
        fact("empty-ferry", &[]),
        fact("at-ferry", &[locs.choose(rng).unwrap()]),
    ];
    for c in &cars {
        init.push(fact("at", &[c, locs.choose(rng).unwrap()]));
    }
    Layout {
        objects: format!("{} - car {} - location", cars.join(" "), locs.join(" ")),
        init,
        goal_fact: Box::new(|f| f.predicate == "at"),
    }
}

fn logistics(rng: &mut ChaCha8Rng, scale: Scale) -> Layout {
    let (cities, locs_per_city, planes, packages) = match scale {
        Scale::Tiny => (2, 1, 1, rng.gen_range(1..=2)),
        Scale::Small => (rng.gen_range(2..=3), 1, 1, rng.gen_range(3..=5)),
        Scale::Large => (4, 3, 2, 20),
    };
    let city_names = names("city", cities);
    let mut airports = Vec::new();
    let mut locations = Vec::new();
    let mut init = Vec::new();
    let mut by_city = Vec::new();
    for (ci, city) in city_names.iter().enumerate() {
        let ap = format!("ap{}", ci + 1);
        init.push(fact("in-city", &[&ap, city]));
        let mut places = vec![ap.clone()];
        airports.push(ap);
        for li in 1..=locs_per_city {
            let l = format!("loc{}-{}", ci + 1, li);
            init.push(fact("in-city", &[&l, city]));
            places.push(l.clone());
            locations.push(l);
        }
        by_city.push(places);
    }
    let trucks = names("truck", cities);
    for (t, places) in trucks.iter().zip(&by_city) {
        init.push(fact("at", &[t, places.choose(rng).unwrap()]));
    }
    let planes = names("plane", planes);
    for p in &planes {
        init.push(fact("at", &[p, airports.choose(rng).unwrap()]));
    }
    let all_places: Vec<&String> = by_city.iter().flatten().collect();
    let packages = names("pkg", packages);
    for p in &packages {
        init.push(fact("at", &[p, all_places.choose(rng).unwrap()]));
    }
    Layout {
        objects: format!(
            "{} - city {} - airport {} - location {} - truck {} - airplane {} - package",
            city_names.join(" "),
            airports.join(" "),
            locations.join(" "),
            trucks.join(" "),
            planes.join(" "),
            packages.join(" ")
        ),
        init,
        goal_fact: Box::new(|f| f.predicate == "at" && f.args[0].starts_with("pkg")),
    }
}

fn grid(rng: &mut ChaCha8Rng, scale: Scale) -> Layout {
    let (w, h, keys, locked) = match scale {
        Scale::Tiny => (3, 1, 1, 1),
        Scale::Small => (rng.gen_range(3..=4), 3, rng.gen_range(2..=3), rng.gen_range(1..=2)),
        Scale::Large => (7, 7, 4, 4),
    };
    let place = |x: usize, y: usize| format!("p{x}-{y}");
    let mut places = Vec::new();
    let mut init = vec![fact("arm-empty", &[])];
    for y in 0..h {
        for x in 0..w {
            places.push(place(x, y));
            if x + 1 < w {
                init.push(fact("conn", &[&place(x, y), &place(x + 1, y)]));
                init.push(fact("conn", &[&place(x + 1, y), &place(x, y)]));
            }
            if y + 1 < h {
                init.push(fact("conn", &[&place(x, y), &place(x, y + 1)]));
                init.push(fact("conn", &[&place(x, y + 1), &place(x, y)]));
            }
        }
    }
    let shapes = names("s", 2);
    let key_names = names("k", keys);
    let mut order = places.clone();
    order.shuffle(rng);
    let robot = order[0].clone();
    let locked_places = &order[1..1 + locked];
    let open_places: Vec<&String> = places.iter().filter(|p| !locked_places.contains(p)).collect();
    init.push(fact("at-robot", &[&robot]));
    for p in &open_places {
        init.push(fact("open", &[p]));
    }
    for p in locked_places {
        init.push(fact("locked", &[p]));
        init.push(fact("lock-shape", &[p, shapes.choose(rng).unwrap()]));
    }
    for (i, k) in key_names.iter().enumerate() {
        init.push(fact("key-shape", &[k, &shapes[i % shapes.len()]]));
        init.push(fact("at", &[k, open_places.choose(rng).unwrap()]));
    }
    Layout {
        objects: format!(
            "{} - place {} - key {} - shape",
            places.join(" "),
            key_names.join(" "),
            shapes.join(" ")
        ),
        init,
        goal_fact: Box::new(|f| f.predicate == "at" || f.predicate == "at-robot"),
    }
}

fn template(family: Family, name: &str, layout: &Layout) -> String {
    let mut init = layout.init.clone();
    init.sort();
    init.dedup();
    let init: Vec<String> = init.iter().map(ToString::to_string).collect();
    format!(
        "(define (problem {name})\n  (:domain {family})\n  (:objects {})\n  (:init {})\n  (:goal (and {PLACEHOLDER})))\n",
        layout.objects,
        init.join(" ")
    )
}

fn random_walk(task: &GroundTask, start: &State, steps: usize, rng: &mut ChaCha8Rng) -> State {
    let mut s = start.clone();
    for _ in 0..steps {
        let applicable: Vec<usize> = task
            .actions()
            .iter()
            .filter(|a| s.holds_all(&a.pre))
            .map(|a| a.id)
            .collect();
        match applicable.choose(rng) {
            Some(&a) => s = successor(&s, task.action(a)),
            None => break,
        }
    }
    s
}

fn comparable(a: &[GroundFact], b: &[GroundFact]) -> bool {
    a.iter().all(|f| b.contains(f)) || b.iter().all(|f| a.contains(f))
}

struct Shape {
    goals: RangeInclusive<usize>,
    goal_size: RangeInclusive<usize>,
    walk: RangeInclusive<usize>,
}

fn shape(scale: Scale) -> Shape {
    match scale {
        Scale::Tiny => Shape {
            goals: 3..=4,
            goal_size: 1..=2,
            walk: 2..=8,
        },
        Scale::Small => Shape {
            goals: 3..=6,
            goal_size: 2..=3,
            walk: 8..=30,
        },
        Scale::Large => Shape {
            goals: 4..=6,
            goal_size: 3..=5,
            walk: 30..=80,
        },
    }
}

/// Generates one problem; identical arguments give identical problems.
pub fn generate(family: Family, scale: Scale, seed: u64) -> Result<SuiteProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(family as u64 * 4 + scale as u64);
    let name = format!("{family}-{scale}-{seed:04}");
    let layout = match family {
        Family::Blocks => blocks(&mut rng, scale),
        Family::Ferry => ferry(&mut rng, scale),
        Family::Logistics => logistics(&mut rng, scale),
        Family::Grid => grid(&mut rng, scale),
    };
    let template = template(family, &name, &layout);
    let domain = parse_domain(family.domain())?;
    let instance = parse_problem(&substitute(&template, &[])?, &domain)?;
    let task = ground_instance(&instance);

    let shape = shape(scale);
    let wanted = rng.gen_range(shape.goals.clone());
    let mut hypotheses: Vec<Vec<GroundFact>> = Vec::new();
    for _ in 0..wanted * 200 {
        if hypotheses.len() == wanted {
            break;
        }
        let steps = rng.gen_range(shape.walk.clone());
        let end = random_walk(&task, task.initial(), steps, &mut rng);
        let changed: Vec<&GroundFact> = end
            .facts()
            .filter(|&f| !task.initial().holds(f))
            .map(|f| task.fact(f))
            .filter(|f| (layout.goal_fact)(f))
            .collect();
        if changed.is_empty() {
            continue;
        }
        // keep at least one changed fact, pad with other goal facts of the end state
        let size = rng.gen_range(shape.goal_size.clone());
        let mut goal: Vec<GroundFact> = changed.choose_multiple(&mut rng, size).map(|f| (*f).clone()).collect();
        let extra: Vec<&GroundFact> = end
            .facts()
            .map(|f| task.fact(f))
            .filter(|f| (layout.goal_fact)(f) && !goal.contains(f))
            .collect();
        let missing = size.saturating_sub(goal.len());
        goal.extend(extra.choose_multiple(&mut rng, missing).map(|f| (*f).clone()));
        goal.sort();
        if hypotheses.iter().any(|h| comparable(h, &goal)) {
            continue;
        }
        hypotheses.push(goal);
    }
    if hypotheses.len() < 2 {
        return Err(HarnessError::Invalid(format!("{name}: could not generate distinct goals")));
    }
    let real = rng.gen_range(0..hypotheses.len());
    Ok(SuiteProblem {
        name,
        family,
        domain: family.domain().to_string(),
        template,
        hypotheses,
        real,
    })
}

/// `count` problems per family with consecutive seeds from `seed`.
pub fn generate_suite(families: &[Family], scale: Scale, count: usize, seed: u64) -> Result<Vec<SuiteProblem>> {
    let mut out = Vec::with_capacity(families.len() * count);
    for &family in families {
        for i in 0..count as u64 {
            out.push(generate(family, scale, seed + i)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        for family in Family::ALL {
            let a = generate(family, Scale::Small, 7).unwrap();
            assert_eq!(a, generate(family, Scale::Small, 7).unwrap());
            assert!(a.hypotheses.len() >= 3, "{family}");
            for (i, g) in a.hypotheses.iter().enumerate() {
                for h in &a.hypotheses[i + 1..] {
                    assert!(!comparable(g, h));
                }
            }
        }
    }

    #[test]
    fn problems_load_with_full_observations() {
        for family in Family::ALL {
            let p = generate(family, Scale::Small, 3).unwrap();
            let b = p.load(&ObservationSpec::full(0)).unwrap();
            assert_eq!(b.real, Some(p.real));
            assert!(b.problem.unresolved.is_empty());
            assert!(!b.problem.observations.is_empty());
        }
    }

    #[test]
    fn family_names_parse() {
        for f in Family::ALL {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
    }
}
