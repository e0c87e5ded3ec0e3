//! Random small nets and an independent brute-force reachability enumerator.
#![allow(dead_code)]

use std::collections::BTreeSet;

use enet::analysis::AbstractMarking;
use enet::sim::enabled_transitions;
use enet::{fire, Marking, Net, PositionKind, Selector, Token, Transition, TransitionId, TransitionKind};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub net: Net,
    pub initial: Marking,
}

/// A structurally valid net with at most 6 positions (one of them possibly a
/// resolution position) and at most 5 transitions; no transition lists a
/// position twice on the same side.
pub fn random_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let case = attempt(&mut rng);
        if enet::validate_net(&case.net).is_empty() {
            return case;
        }
    }
}

fn attempt(rng: &mut ChaCha8Rng) -> Case {
    let n_places = rng.gen_range(2..=5);
    let places: Vec<String> = (0..n_places).map(|i| format!("p{i}")).collect();
    let resolution = rng.gen_bool(0.5).then(|| rng.gen_range(2..=3usize));

    let mut b = Net::builder("R");
    for (i, p) in places.iter().enumerate() {
        let kind = if i == 0 && rng.gen_bool(0.3) {
            PositionKind::Peripheral
        } else {
            PositionKind::Simple
        };
        b = b.position(p.as_str(), kind);
    }
    if let Some(branches) = resolution {
        b = b.position("r0", PositionKind::Resolution { branches });
    }

    for i in 0..rng.gen_range(2..=5) {
        let kind = match rng.gen_range(0..7) {
            0 | 1 => TransitionKind::T,
            2 => TransitionKind::F,
            3 => TransitionKind::J,
            4 | 5 => TransitionKind::X {
                branches: rng.gen_range(2..=3),
            },
            _ => TransitionKind::Y {
                branches: rng.gen_range(2..=3),
            },
        };
        let (ni, no) = kind.arity();
        if ni > n_places || no > n_places {
            continue;
        }
        let inputs: Vec<&str> = places.choose_multiple(rng, ni).map(String::as_str).collect();
        let outputs: Vec<&str> = places.choose_multiple(rng, no).map(String::as_str).collect();
        let mut t = Transition::new(format!("t{i}"), kind).inputs(inputs).outputs(outputs);
        if kind.is_selected() {
            t = match resolution {
                Some(n) if n == kind.branches() && rng.gen_bool(0.6) => t.selector(Selector::Resolution("r0".into())),
                _ => t.selector(Selector::Proc("identity".into())),
            };
        }
        if rng.gen_bool(0.3) {
            t = t.procedure("merge");
        }
        b = b.transition(t);
    }
    let net = b.build_unchecked();

    let mut initial = Marking::new();
    for p in &places {
        if rng.gen_bool(0.45) {
            initial.place(p.as_str(), Token::new().with("k", p.as_str()));
        }
    }
    // Mostly start with something enabled, so the corpus exercises firing.
    if let Some(t) = net.transitions().choose(rng).filter(|_| rng.gen_bool(0.8)) {
        for p in &t.outputs {
            initial.take(p.as_str());
        }
        for p in &t.inputs {
            initial.place(p.clone(), Token::new().with("k", p.as_str()));
        }
    }
    if let Some(n) = resolution {
        if rng.gen_bool(0.5) {
            initial.set_resolution("r0", rng.gen_range(0..n));
        }
    }
    Case { net, initial }
}

pub type EdgeKey = (AbstractMarking, TransitionId, Option<usize>, AbstractMarking);

/// Bitmask state: occupied places plus the resolution value (`None` = unset).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct State {
    occ: u32,
    res: Option<usize>,
}

struct Compiled {
    places: Vec<String>,
    resolution: Option<String>,
    transitions: Vec<CT>,
}

struct CT {
    id: TransitionId,
    kind: TransitionKind,
    inputs: u32,
    outputs: Vec<u32>,
    by_resolution: bool,
}

fn compile(net: &Net) -> Compiled {
    let places: Vec<String> = net
        .positions()
        .iter()
        .filter(|p| !p.kind.is_resolution())
        .map(|p| p.id.as_str().to_owned())
        .collect();
    let resolution = net
        .positions()
        .iter()
        .find(|p| p.kind.is_resolution())
        .map(|p| p.id.as_str().to_owned());
    let bit = |id: &str| 1u32 << places.iter().position(|p| p == id).unwrap();
    let transitions = net
        .transitions()
        .iter()
        .map(|t| CT {
            id: t.id.clone(),
            kind: t.kind,
            inputs: t.inputs.iter().map(|p| bit(p.as_str())).fold(0, |a, b| a | b),
            outputs: t.outputs.iter().map(|p| bit(p.as_str())).collect(),
            by_resolution: matches!(t.selector, Some(Selector::Resolution(_))),
        })
        .collect();
    Compiled {
        places,
        resolution,
        transitions,
    }
}

fn successors(c: &Compiled, s: State) -> Vec<(usize, Option<usize>, State)> {
    let mut out = Vec::new();
    for (i, t) in c.transitions.iter().enumerate() {
        if s.occ & t.inputs != t.inputs {
            continue;
        }
        let all_out = t.outputs.iter().fold(0, |a, b| a | b);
        match t.kind {
            TransitionKind::T | TransitionKind::F | TransitionKind::J => {
                if s.occ & all_out == 0 {
                    out.push((i, None, State { occ: (s.occ & !t.inputs) | all_out, res: s.res }));
                }
            }
            TransitionKind::X { branches } | TransitionKind::Y { branches } => {
                let choices: Vec<usize> = match (t.by_resolution, s.res) {
                    (true, Some(v)) => vec![v],
                    _ => (0..branches).collect(),
                };
                let res = if t.by_resolution { None } else { s.res };
                for b in choices {
                    let target = if matches!(t.kind, TransitionKind::X { .. }) {
                        t.outputs[b]
                    } else {
                        all_out
                    };
                    if s.occ & target == 0 {
                        out.push((i, Some(b), State { occ: (s.occ & !t.inputs) | target, res }));
                    }
                }
            }
        }
    }
    out
}

fn to_abstract(c: &Compiled, s: State) -> AbstractMarking {
    let mut m = AbstractMarking::with_tokens(
        c.places
            .iter()
            .enumerate()
            .filter(|(i, _)| s.occ & (1 << i) != 0)
            .map(|(_, p)| p.as_str()),
    );
    if let (Some(r), Some(v)) = (&c.resolution, s.res) {
        m.resolutions.insert(r.as_str().into(), v);
    }
    m
}

/// Extends firing sequences one step at a time until a level adds no new state,
/// collecting every marking and step seen.
pub fn brute_force(net: &Net, m0: &AbstractMarking) -> (BTreeSet<AbstractMarking>, BTreeSet<EdgeKey>) {
    let c = compile(net);
    let occ = c
        .places
        .iter()
        .enumerate()
        .filter(|(_, p)| m0.is_marked(p))
        .fold(0, |a, (i, _)| a | (1 << i));
    let res = c.resolution.as_ref().and_then(|r| m0.resolution(r));
    let start = State { occ, res };

    let mut seen = BTreeSet::from([start]);
    let mut steps = BTreeSet::new();
    let mut level = vec![start];
    while !level.is_empty() {
        let mut next = Vec::new();
        for &s in &level {
            for (t, b, s2) in successors(&c, s) {
                steps.insert((s, t, b, s2));
                if seen.insert(s2) {
                    next.push(s2);
                }
            }
        }
        level = next;
    }
    let nodes = seen.iter().map(|&s| to_abstract(&c, s)).collect();
    let edges = steps
        .into_iter()
        .map(|(s, t, b, s2)| (to_abstract(&c, s), c.transitions[t].id.clone(), b, to_abstract(&c, s2)))
        .collect();
    (nodes, edges)
}

/// `m` plus, for each unset resolution, a copy with every admissible value set.
fn with_resolutions(net: &Net, m: &Marking) -> Vec<Marking> {
    let mut out = vec![m.clone()];
    for r in net.resolution_ids() {
        if let (None, Some(PositionKind::Resolution { branches })) = (m.resolution(r.as_str()), net.position_kind(r.as_str())) {
            out.extend((0..branches).map(|v| {
                let mut mv = m.clone();
                mv.set_resolution(r.clone(), v);
                mv
            }));
        }
    }
    out
}

/// Fires every enabled transition from every concrete marking reachable from
/// the case's initial marking (bounded at `LIMIT` markings) and reports each
/// firing that errs, changes the token count by other than the kind's delta,
/// leaves its resolution set, or is not reproducible.
pub fn firing_violations(case: &Case) -> Vec<String> {
    const LIMIT: usize = 500;
    let net = &case.net;
    let mut violations = Vec::new();
    let mut seen = BTreeSet::from([case.initial.to_string()]);
    let mut queue = vec![case.initial.clone()];
    let mut i = 0;
    while i < queue.len() {
        let m = queue[i].clone();
        i += 1;
        for mv in with_resolutions(net, &m) {
            for t in enabled_transitions(net, &mv) {
                let (next, event) = match fire(net, &mv, t.id.as_str()) {
                    Ok(r) => r,
                    Err(e) => {
                        violations.push(format!("{} at {mv}: {e}", t.id));
                        continue;
                    }
                };
                let delta = next.token_count() as isize - mv.token_count() as isize;
                if delta != t.kind.token_delta() {
                    violations.push(format!("{} at {mv}: token delta {delta}", t.id));
                }
                if let Some(Selector::Resolution(r)) = &t.selector {
                    if next.resolution(r.as_str()).is_some() {
                        violations.push(format!("{} at {mv}: {r} still set", t.id));
                    }
                }
                if fire(net, &mv, t.id.as_str()).ok() != Some((next.clone(), event)) {
                    violations.push(format!("{} at {mv}: not deterministic", t.id));
                }
                if queue.len() < LIMIT && seen.insert(next.to_string()) {
                    queue.push(next);
                }
            }
        }
    }
    violations
}
