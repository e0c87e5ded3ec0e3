//! State-space construction and the property checks run over it.
//!
//! Analysis ignores token attributes and enumerates every selector outcome, so
//! the checks are about control flow only:
//!
//! * safeness: no firing ever marks an already marked place;
//! * deadlock freedom: every marking without successors is accepted by a finals predicate;
//! * transition coverage: every transition labels at least one edge;
//! * conflict freedom: no reachable marking enables two transitions that share an input;
//! * sequence conformance: every accepted run follows a [`StagePattern`].

mod dot;
mod finals;
mod graph;
mod pattern;

use std::collections::BTreeSet;
use std::fmt;

pub use dot::export_dot;
pub use finals::FinalsPredicate;
pub use graph::{
    build_state_graph, AbstractMarking, AnalysisError, Edge, ExploreOptions, SafenessViolation, StateGraph,
};
pub use pattern::{check_sequence_language, Alternative, Stage, StagePattern, StepMatch};

use crate::net::{Net, TransitionId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// A counterexample: where a check failed and why.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub marking: Option<AbstractMarking>,
    pub transition: Option<TransitionId>,
    pub detail: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(m) = &self.marking {
            parts.push(format!("marking {m}"));
        }
        if let Some(t) = &self.transition {
            parts.push(format!("transition {t}"));
        }
        if !self.detail.is_empty() {
            parts.push(self.detail.clone());
        }
        f.write_str(&parts.join(": "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub nodes: usize,
    pub edges: usize,
}

impl CheckReport {
    /// Verdict is derived from the witnesses: none means pass.
    pub fn from_witnesses(name: &str, nodes: usize, edges: usize, witnesses: Vec<Witness>) -> Self {
        let verdict = if witnesses.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name: name.to_owned(),
            verdict,
            witnesses,
            nodes,
            edges,
        }
    }

    pub(crate) fn new(name: &str, g: &StateGraph, witnesses: Vec<Witness>) -> Self {
        Self::from_witnesses(name, g.node_count(), g.edge_count(), witnesses)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} (nodes={}, edges={})",
            self.verdict, self.name, self.nodes, self.edges
        )?;
        for w in &self.witnesses {
            write!(f, "\n  witness: {w}")?;
        }
        Ok(())
    }
}

pub fn check_safeness(g: &StateGraph) -> CheckReport {
    let witnesses = g
        .safeness_violations()
        .iter()
        .map(|v| Witness {
            marking: Some(v.marking.clone()),
            transition: Some(v.transition.clone()),
            detail: format!("second token on `{}`", v.position),
        })
        .collect();
    CheckReport::new("safeness", g, witnesses)
}

pub fn check_deadlock_freedom(g: &StateGraph, finals: &FinalsPredicate) -> CheckReport {
    let mut has_out = vec![false; g.node_count()];
    for e in g.edges() {
        has_out[e.from] = true;
    }
    let witnesses = g
        .nodes()
        .iter()
        .enumerate()
        .filter(|(i, m)| !has_out[*i] && !finals.accepts(g, m))
        .map(|(_, m)| Witness {
            marking: Some(m.clone()),
            transition: None,
            detail: format!("no transition enabled and not accepted by `{finals}`"),
        })
        .collect();
    CheckReport::new("deadlock", g, witnesses)
}

pub fn check_transition_coverage(g: &StateGraph, net: &Net) -> CheckReport {
    let covered: BTreeSet<&TransitionId> = g.edges().iter().map(|e| &e.transition).collect();
    let witnesses = net
        .transitions()
        .iter()
        .filter(|t| !covered.contains(&t.id))
        .map(|t| Witness {
            marking: None,
            transition: Some(t.id.clone()),
            detail: "never fires".into(),
        })
        .collect();
    CheckReport::new("coverage", g, witnesses)
}

/// Fails when a reachable marking enables two distinct transitions that share an
/// input position. Branches of one X or Y are alternatives, not conflicts.
pub fn check_conflict_freedom(g: &StateGraph, net: &Net) -> CheckReport {
    let mut witnesses = Vec::new();
    for (i, m) in g.nodes().iter().enumerate() {
        let mut enabled: Vec<&TransitionId> = g.outgoing(i).map(|e| &e.transition).collect();
        enabled.dedup();
        for (a_idx, a) in enabled.iter().enumerate() {
            for b in &enabled[a_idx + 1..] {
                let (Some(ta), Some(tb)) = (net.transition(a.as_str()), net.transition(b.as_str())) else {
                    continue;
                };
                let shared: Vec<&str> = ta
                    .inputs
                    .iter()
                    .filter(|p| tb.inputs.contains(p))
                    .map(|p| p.as_str())
                    .collect();
                if !shared.is_empty() {
                    witnesses.push(Witness {
                        marking: Some(m.clone()),
                        transition: Some((*a).clone()),
                        detail: format!("competes with `{b}` for {}", shared.join(", ")),
                    });
                }
            }
        }
    }
    CheckReport::new("conflict", g, witnesses)
}

/// The checks a caller can request by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckKind {
    Safeness,
    Deadlock,
    Coverage,
    Conflict,
    Sequence,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] = [
        CheckKind::Safeness,
        CheckKind::Deadlock,
        CheckKind::Coverage,
        CheckKind::Conflict,
        CheckKind::Sequence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Safeness => "safeness",
            CheckKind::Deadlock => "deadlock",
            CheckKind::Coverage => "coverage",
            CheckKind::Conflict => "conflict",
            CheckKind::Sequence => "sequence",
        }
    }
}

impl std::str::FromStr for CheckKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| format!("unknown check `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{PositionKind, Selector, Transition, TransitionKind};

    fn graph(net: &Net, tokens: &[&str]) -> StateGraph {
        build_state_graph(net, &AbstractMarking::with_tokens(tokens.iter().copied()), Default::default()).unwrap()
    }

    #[test]
    fn aliased_f_outputs_fail_safeness() {
        let net = Net::builder("alias")
            .simple("p")
            .simple("q")
            .transition(Transition::new("f", TransitionKind::F).inputs(["p"]).outputs(["q", "q"]))
            .build()
            .unwrap();
        let r = check_safeness(&graph(&net, &["p"]));
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.witnesses[0].marking, Some(AbstractMarking::with_tokens(["p"])));
        assert_eq!(r.witnesses[0].transition, Some("f".into()));
    }

    #[test]
    fn empty_net_passes_everything_applicable() {
        let net = Net::builder("empty").build().unwrap();
        let g = graph(&net, &[]);
        assert!(check_safeness(&g).passed());
        assert!(check_deadlock_freedom(&g, &FinalsPredicate::Initial).passed());
        assert!(check_transition_coverage(&g, &net).passed());
        assert!(check_conflict_freedom(&g, &net).passed());
    }

    #[test]
    fn blocked_chain_deadlocks() {
        let net = Net::builder("chain")
            .simple("a")
            .simple("b")
            .simple("c")
            .transition(Transition::new("t1", TransitionKind::T).inputs(["a"]).outputs(["b"]))
            .transition(Transition::new("t2", TransitionKind::T).inputs(["b"]).outputs(["c"]))
            .build()
            .unwrap();
        let g = graph(&net, &["a", "c"]);
        let r = check_deadlock_freedom(&g, &FinalsPredicate::only(["c"]));
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(
            r.witnesses[0].marking,
            Some(AbstractMarking::with_tokens(["b", "c"]))
        );
    }

    #[test]
    fn j_with_unmarked_second_input_is_uncovered() {
        let net = Net::builder("j")
            .simple("a")
            .simple("b")
            .simple("c")
            .transition(Transition::new("j", TransitionKind::J).inputs(["a", "b"]).outputs(["c"]))
            .build()
            .unwrap();
        let r = check_transition_coverage(&graph(&net, &["a"]), &net);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witnesses[0].transition, Some("j".into()));

        let one = Net::builder("one")
            .simple("a")
            .simple("c")
            .transition(Transition::new("t", TransitionKind::T).inputs(["a"]).outputs(["c"]))
            .build()
            .unwrap();
        assert!(check_transition_coverage(&graph(&one, &["a"]), &one).passed());
    }

    #[test]
    fn shared_input_is_a_conflict_but_branching_is_not() {
        let net = Net::builder("c")
            .simple("p")
            .simple("a")
            .simple("b")
            .transition(Transition::new("ta", TransitionKind::T).inputs(["p"]).outputs(["a"]))
            .transition(Transition::new("tb", TransitionKind::T).inputs(["p"]).outputs(["b"]))
            .build()
            .unwrap();
        let r = check_conflict_freedom(&graph(&net, &["p"]), &net);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witnesses[0].marking, Some(AbstractMarking::with_tokens(["p"])));

        let x = Net::builder("x")
            .simple("p")
            .simple("a")
            .simple("b")
            .simple("c")
            .position("r", PositionKind::Resolution { branches: 3 })
            .transition(
                Transition::new("x", TransitionKind::X { branches: 3 })
                    .inputs(["p"])
                    .outputs(["a", "b", "c"])
                    .selector(Selector::Resolution("r".into())),
            )
            .build()
            .unwrap();
        assert!(check_conflict_freedom(&graph(&x, &["p"]), &x).passed());
    }

    #[test]
    fn single_stage_pattern_on_single_transition() {
        let net = Net::builder("one")
            .simple("a")
            .simple("c")
            .transition(Transition::new("t", TransitionKind::T).inputs(["a"]).outputs(["c"]))
            .build()
            .unwrap();
        let g = graph(&net, &["a"]);
        let r = check_sequence_language(&g, &"t".parse().unwrap(), &FinalsPredicate::Sinks);
        assert!(r.passed(), "{r}");
        let r = check_sequence_language(&g, &"u".parse().unwrap(), &FinalsPredicate::Sinks);
        assert!(!r.passed());
    }

    #[test]
    fn report_display() {
        let r = CheckReport::from_witnesses(
            "coverage",
            2,
            1,
            vec![Witness {
                marking: None,
                transition: Some("t9".into()),
                detail: "never fires".into(),
            }],
        );
        assert_eq!(
            r.to_string(),
            "FAIL coverage (nodes=2, edges=1)\n  witness: transition t9: never fires"
        );
        assert_eq!("conflict".parse::<CheckKind>(), Ok(CheckKind::Conflict));
        assert!("nope".parse::<CheckKind>().is_err());
    }
}
