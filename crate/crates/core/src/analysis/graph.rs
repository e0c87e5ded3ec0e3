use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::marking::Marking;
use crate::net::{validate_net, Net, PositionId, Selector, StructuralError, Transition, TransitionId, TransitionKind};

/// Token-attribute-free marking: which places hold a token, and the value of
/// each resolution position (absent = unset).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AbstractMarking {
    pub occupied: BTreeSet<PositionId>,
    pub resolutions: BTreeMap<PositionId, usize>,
}

impl AbstractMarking {
    pub fn with_tokens<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<PositionId>,
    {
        Self {
            occupied: ids.into_iter().map(Into::into).collect(),
            resolutions: BTreeMap::new(),
        }
    }

    pub fn is_marked(&self, id: &str) -> bool {
        self.occupied.contains(id)
    }

    pub fn resolution(&self, id: &str) -> Option<usize> {
        self.resolutions.get(id).copied()
    }
}

impl From<&Marking> for AbstractMarking {
    fn from(m: &Marking) -> Self {
        Self {
            occupied: m.marked().map(|(p, _)| p.clone()).collect(),
            resolutions: m.resolutions().map(|(p, v)| (p.clone(), v)).collect(),
        }
    }
}

impl fmt::Display for AbstractMarking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let occ: Vec<_> = self.occupied.iter().map(PositionId::as_str).collect();
        f.write_str(&occ.join(", "))?;
        if !self.resolutions.is_empty() {
            let res: Vec<_> = self
                .resolutions
                .iter()
                .map(|(p, v)| format!("{p}={v}"))
                .collect();
            write!(f, "; {}", res.join(", "))?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: usize,
    pub transition: TransitionId,
    /// Branch for X and Y, `None` otherwise.
    pub branch: Option<usize>,
    pub to: usize,
}

/// A firing that put a token on an already marked place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafenessViolation {
    pub marking: AbstractMarking,
    pub transition: TransitionId,
    pub branch: Option<usize>,
    pub position: PositionId,
}

/// Reachability graph over abstract markings. Node 0 is the initial marking.
#[derive(Debug, Clone)]
pub struct StateGraph {
    nodes: Vec<AbstractMarking>,
    edges: Vec<Edge>,
    violations: Vec<SafenessViolation>,
    places: Vec<PositionId>,
    resolution_positions: Vec<PositionId>,
    sink_places: BTreeSet<PositionId>,
    labels: BTreeMap<(TransitionId, usize), String>,
    selected: BTreeSet<TransitionId>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("net is structurally invalid ({} error(s))", .0.len())]
    InvalidNet(Vec<StructuralError>),
    #[error("state space exceeds the budget of {0} markings")]
    StateBudgetExceeded(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct ExploreOptions {
    pub max_states: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        Self { max_states: 100_000 }
    }
}

/// Abstract successors of `m` under `t`: one per admissible selector outcome.
/// Each entry is `(branch, successor, positions marked twice)`.
pub(crate) fn abstract_successors(
    t: &Transition,
    m: &AbstractMarking,
) -> Vec<(Option<usize>, AbstractMarking, Vec<PositionId>)> {
    if !t.inputs.iter().all(|p| m.occupied.contains(p)) {
        return Vec::new();
    }
    let n = t.kind.branches();
    let branches: Vec<Option<usize>> = match &t.selector {
        None => vec![None],
        Some(Selector::Resolution(r)) => match m.resolutions.get(r) {
            Some(&v) if v < n => vec![Some(v)],
            Some(_) => Vec::new(),
            None => (0..n).map(Some).collect(),
        },
        Some(Selector::Proc(_)) => (0..n).map(Some).collect(),
    };

    let mut out = Vec::new();
    for branch in branches {
        let targets: &[PositionId] = match (t.kind, branch) {
            (TransitionKind::X { .. }, Some(b)) => std::slice::from_ref(&t.outputs[b]),
            _ => &t.outputs,
        };
        if targets.iter().any(|p| m.occupied.contains(p)) {
            continue;
        }
        let mut next = m.clone();
        for p in &t.inputs {
            next.occupied.remove(p);
        }
        let mut doubled = Vec::new();
        for p in targets {
            if !next.occupied.insert(p.clone()) {
                doubled.push(p.clone());
            }
        }
        if let Some(Selector::Resolution(r)) = &t.selector {
            next.resolutions.remove(r);
        }
        out.push((branch, next, doubled));
    }
    out
}

/// Breadth-first closure from `m0`, enumerating every selector outcome.
/// Procedures are not evaluated.
pub fn build_state_graph(net: &Net, m0: &AbstractMarking, opts: ExploreOptions) -> Result<StateGraph, AnalysisError> {
    let errors = validate_net(net);
    if !errors.is_empty() {
        return Err(AnalysisError::InvalidNet(errors));
    }

    let mut nodes = vec![m0.clone()];
    let mut index: HashMap<AbstractMarking, usize> = HashMap::from([(m0.clone(), 0)]);
    let mut edges = Vec::new();
    let mut violations = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(from) = queue.pop_front() {
        let marking = nodes[from].clone();
        for t in net.transitions() {
            for (branch, next, doubled) in abstract_successors(t, &marking) {
                for position in doubled {
                    violations.push(SafenessViolation {
                        marking: marking.clone(),
                        transition: t.id.clone(),
                        branch,
                        position,
                    });
                }
                let to = match index.get(&next) {
                    Some(&i) => i,
                    None => {
                        if nodes.len() >= opts.max_states {
                            return Err(AnalysisError::StateBudgetExceeded(opts.max_states));
                        }
                        let i = nodes.len();
                        index.insert(next.clone(), i);
                        nodes.push(next);
                        queue.push_back(i);
                        i
                    }
                };
                edges.push(Edge {
                    from,
                    transition: t.id.clone(),
                    branch,
                    to,
                });
            }
        }
    }

    let mut places: Vec<PositionId> = net.place_ids().cloned().collect();
    places.sort();
    let mut resolution_positions: Vec<PositionId> = net.resolution_ids().cloned().collect();
    resolution_positions.sort();
    let consumed: BTreeSet<&PositionId> = net.transitions().iter().flat_map(|t| &t.inputs).collect();
    let sink_places = places
        .iter()
        .filter(|p| !consumed.contains(p))
        .cloned()
        .collect();
    let labels = net
        .transitions()
        .iter()
        .flat_map(|t| t.labels.iter().map(move |(b, l)| ((t.id.clone(), *b), l.clone())))
        .collect();
    let selected = net
        .transitions()
        .iter()
        .filter(|t| t.kind.is_selected())
        .map(|t| t.id.clone())
        .collect();

    Ok(StateGraph {
        nodes,
        edges,
        violations,
        places,
        resolution_positions,
        sink_places,
        labels,
        selected,
    })
}

impl StateGraph {
    pub fn initial(&self) -> &AbstractMarking {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[AbstractMarking] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn safeness_violations(&self) -> &[SafenessViolation] {
        &self.violations
    }

    /// Places no transition consumes from.
    pub fn sink_places(&self) -> &BTreeSet<PositionId> {
        &self.sink_places
    }

    /// Simple and peripheral positions, sorted by id.
    pub fn places(&self) -> &[PositionId] {
        &self.places
    }

    pub fn resolution_positions(&self) -> &[PositionId] {
        &self.resolution_positions
    }

    pub fn branch_label(&self, t: &TransitionId, branch: usize) -> Option<&str> {
        self.labels.get(&(t.clone(), branch)).map(String::as_str)
    }

    pub fn outgoing(&self, node: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == node)
    }

    pub fn node_set(&self) -> BTreeSet<AbstractMarking> {
        self.nodes.iter().cloned().collect()
    }

    /// Edges with their endpoints spelled out; comparable across graphs.
    pub fn edge_set(&self) -> BTreeSet<(AbstractMarking, TransitionId, Option<usize>, AbstractMarking)> {
        self.edges
            .iter()
            .map(|e| {
                (
                    self.nodes[e.from].clone(),
                    e.transition.clone(),
                    e.branch,
                    self.nodes[e.to].clone(),
                )
            })
            .collect()
    }

    /// `t` or `t:b`.
    pub fn step_label(&self, e: &Edge) -> String {
        match e.branch {
            Some(b) if self.selected.contains(&e.transition) => format!("{}:{}", e.transition, b),
            _ => e.transition.to_string(),
        }
    }

    /// `t:branch(label)`, as used in DOT output.
    pub fn edge_label(&self, e: &Edge) -> String {
        let base = self.step_label(e);
        match self.branch_label(&e.transition, e.branch.unwrap_or(0)) {
            Some(l) => format!("{base}({l})"),
            None => base,
        }
    }

    /// Occupancy bits over [`places`](Self::places) then resolution state.
    pub fn node_label(&self, m: &AbstractMarking) -> String {
        let mut s: String = self
            .places
            .iter()
            .map(|p| if m.occupied.contains(p) { '1' } else { '0' })
            .collect();
        for r in &self.resolution_positions {
            match m.resolutions.get(r) {
                Some(v) => s.push_str(&format!(" {r}={v}")),
                None => s.push_str(&format!(" {r}=-")),
            }
        }
        s
    }

    /// Node indices from which some node satisfying `accept` is reachable.
    pub(crate) fn co_reachable(&self, accept: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            reverse[e.to].push(e.from);
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut queue: VecDeque<usize> = (0..self.nodes.len()).filter(|&i| accept(i)).collect();
        for &i in &queue {
            seen[i] = true;
        }
        while let Some(i) = queue.pop_front() {
            for &p in &reverse[i] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{PositionKind, Transition, TransitionKind};

    #[test]
    fn single_t_has_two_nodes_one_edge() {
        let net = Net::builder("one")
            .simple("p")
            .simple("q")
            .transition(Transition::new("t", TransitionKind::T).inputs(["p"]).outputs(["q"]))
            .build()
            .unwrap();
        let g = build_state_graph(&net, &AbstractMarking::with_tokens(["p"]), Default::default()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.step_label(&g.edges()[0]), "t");
    }

    #[test]
    fn unreachable_transition_labels_no_edge() {
        let net = Net::builder("u")
            .simple("p")
            .simple("q")
            .simple("r")
            .simple("s")
            .transition(Transition::new("t", TransitionKind::T).inputs(["p"]).outputs(["q"]))
            .transition(Transition::new("never", TransitionKind::T).inputs(["r"]).outputs(["s"]))
            .build()
            .unwrap();
        let g = build_state_graph(&net, &AbstractMarking::with_tokens(["p"]), Default::default()).unwrap();
        assert!(g.edges().iter().all(|e| e.transition != "never"));
    }

    #[test]
    fn unset_resolution_enumerates_every_branch() {
        let net = Net::builder("x")
            .simple("a")
            .simple("b")
            .simple("c")
            .position("r", PositionKind::Resolution { branches: 2 })
            .transition(
                Transition::new("x", TransitionKind::X { branches: 2 })
                    .inputs(["a"])
                    .outputs(["b", "c"])
                    .selector(Selector::Resolution("r".into())),
            )
            .build()
            .unwrap();
        let g = build_state_graph(&net, &AbstractMarking::with_tokens(["a"]), Default::default()).unwrap();
        assert_eq!(g.node_count(), 3);
        let mut fixed = AbstractMarking::with_tokens(["a"]);
        fixed.resolutions.insert("r".into(), 1);
        let g = build_state_graph(&net, &fixed, Default::default()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.nodes()[1], AbstractMarking::with_tokens(["c"]));
    }

    #[test]
    fn budget_is_enforced() {
        let net = Net::builder("one")
            .simple("p")
            .simple("q")
            .transition(Transition::new("t", TransitionKind::T).inputs(["p"]).outputs(["q"]))
            .build()
            .unwrap();
        let err = build_state_graph(
            &net,
            &AbstractMarking::with_tokens(["p"]),
            ExploreOptions { max_states: 1 },
        )
        .unwrap_err();
        assert_eq!(err, AnalysisError::StateBudgetExceeded(1));
    }
}
