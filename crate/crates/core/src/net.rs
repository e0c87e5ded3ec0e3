//! Net structure: positions, typed transitions, and structural validation.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::procedure::ProcedureRegistry;

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl PartialEq<str> for $name {
            fn eq(&self, other: &str) -> bool {
                self.0 == other
            }
        }

        impl PartialEq<&str> for $name {
            fn eq(&self, other: &&str) -> bool {
                self.0 == *other
            }
        }
    };
}

id_type!(
    /// Identifier of a position, unique among the positions of a net.
    PositionId
);
id_type!(
    /// Identifier of a transition, unique among the transitions of a net.
    TransitionId
);

/// Kind of a position. The derived order is the canonical formatting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PositionKind {
    Simple,
    /// Environment boundary; tokens enter and leave the net here.
    Peripheral,
    /// Holds no tokens, only a branch value in `0..branches`.
    Resolution { branches: usize },
}

impl PositionKind {
    pub fn is_resolution(self) -> bool {
        matches!(self, PositionKind::Resolution { .. })
    }
}

/// Primitive transition schema. X and Y carry their branch count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransitionKind {
    T,
    F,
    J,
    X { branches: usize },
    Y { branches: usize },
}

impl TransitionKind {
    /// `(inputs, outputs)` required by the schema.
    pub fn arity(self) -> (usize, usize) {
        match self {
            TransitionKind::T => (1, 1),
            TransitionKind::F => (1, 2),
            TransitionKind::J => (2, 1),
            TransitionKind::X { branches } => (1, branches),
            TransitionKind::Y { branches } => (branches, 1),
        }
    }

    /// Number of selector outcomes; 1 for the unselected kinds.
    pub fn branches(self) -> usize {
        match self {
            TransitionKind::X { branches } | TransitionKind::Y { branches } => branches,
            _ => 1,
        }
    }

    pub fn is_selected(self) -> bool {
        matches!(self, TransitionKind::X { .. } | TransitionKind::Y { .. })
    }

    pub fn letter(self) -> char {
        match self {
            TransitionKind::T => 'T',
            TransitionKind::F => 'F',
            TransitionKind::J => 'J',
            TransitionKind::X { .. } => 'X',
            TransitionKind::Y { .. } => 'Y',
        }
    }

    /// Net token-count change caused by one firing.
    pub fn token_delta(self) -> isize {
        let (i, o) = self.arity();
        match self {
            TransitionKind::X { .. } => 0,
            _ => o as isize - i as isize,
        }
    }
}

/// How an X or Y transition picks its branch.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Selector {
    /// Value held by a resolution position.
    Resolution(PositionId),
    /// Value returned by a registered procedure evaluated on the input token.
    Proc(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Position {
    pub id: PositionId,
    pub kind: PositionKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub id: TransitionId,
    pub kind: TransitionKind,
    pub inputs: Vec<PositionId>,
    pub outputs: Vec<PositionId>,
    pub selector: Option<Selector>,
    pub procedure: Option<String>,
    /// Display labels per branch index, e.g. `"t2~"`.
    pub labels: BTreeMap<usize, String>,
}

impl Transition {
    pub fn new(id: impl Into<TransitionId>, kind: TransitionKind) -> Self {
        Self {
            id: id.into(),
            kind,
            inputs: Vec::new(),
            outputs: Vec::new(),
            selector: None,
            procedure: None,
            labels: BTreeMap::new(),
        }
    }

    pub fn inputs<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<PositionId>,
    {
        self.inputs = ids.into_iter().map(Into::into).collect();
        self
    }

    pub fn outputs<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<PositionId>,
    {
        self.outputs = ids.into_iter().map(Into::into).collect();
        self
    }

    pub fn selector(mut self, selector: Selector) -> Self {
        self.selector = Some(selector);
        self
    }

    pub fn procedure(mut self, name: impl Into<String>) -> Self {
        self.procedure = Some(name.into());
        self
    }

    pub fn label(mut self, branch: usize, label: impl Into<String>) -> Self {
        self.labels.insert(branch, label.into());
        self
    }

    /// `t` or `t:b`; branch is shown only for X and Y.
    pub fn step_label(&self, branch: Option<usize>) -> String {
        match branch {
            Some(b) if self.kind.is_selected() => format!("{}:{}", self.id, b),
            _ => self.id.to_string(),
        }
    }
}

/// Which declaration a structural error is about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    Net,
    Position(PositionId),
    Transition(TransitionId),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructuralError {
    #[error("{0} has an empty id")]
    EmptyId(&'static str),
    #[error("position `{0}` is declared more than once")]
    DuplicatePosition(PositionId),
    #[error("transition `{0}` is declared more than once")]
    DuplicateTransition(TransitionId),
    #[error("resolution position `{position}` needs at least 2 branches, has {branches}")]
    ResolutionTooNarrow { position: PositionId, branches: usize },
    #[error("transition `{transition}` needs at least 2 branches, has {branches}")]
    TooFewBranches { transition: TransitionId, branches: usize },
    #[error(
        "transition `{transition}` of kind {kind} takes {expected_in} input(s) and {expected_out} output(s), found {found_in} and {found_out}"
    )]
    ArityMismatch {
        transition: TransitionId,
        kind: char,
        expected_in: usize,
        expected_out: usize,
        found_in: usize,
        found_out: usize,
    },
    #[error("transition `{transition}` references undefined position `{position}`")]
    DanglingRef {
        transition: TransitionId,
        position: PositionId,
    },
    #[error("transition `{transition}` uses resolution position `{position}` as an arc")]
    ResolutionArc {
        transition: TransitionId,
        position: PositionId,
    },
    #[error("transition `{transition}` lists input `{position}` twice")]
    DuplicateInput {
        transition: TransitionId,
        position: PositionId,
    },
    #[error("transition `{0}` of kind X or Y has no selector")]
    MissingSelector(TransitionId),
    #[error("transition `{0}` has a selector but is not of kind X or Y")]
    UnexpectedSelector(TransitionId),
    #[error("selector of `{transition}` names `{position}`, which is not a resolution position")]
    SelectorNotResolution {
        transition: TransitionId,
        position: PositionId,
    },
    #[error(
        "transition `{transition}` has {expected} branches but resolution position `{position}` has {found}"
    )]
    BranchCountMismatch {
        transition: TransitionId,
        position: PositionId,
        expected: usize,
        found: usize,
    },
    #[error("transition `{transition}` references unregistered procedure `{name}`")]
    UnknownProcedure { transition: TransitionId, name: String },
    #[error("transition `{transition}` labels branch {branch}, which does not exist")]
    LabelOutOfRange {
        transition: TransitionId,
        branch: usize,
    },
}

impl StructuralError {
    /// Stable diagnostic code.
    pub fn code(&self) -> &'static str {
        match self {
            StructuralError::EmptyId(_) => "EmptyId",
            StructuralError::DuplicatePosition(_) | StructuralError::DuplicateTransition(_) => {
                "DuplicateId"
            }
            StructuralError::ResolutionTooNarrow { .. } | StructuralError::TooFewBranches { .. } => {
                "TooFewBranches"
            }
            StructuralError::ArityMismatch { .. } => "ArityMismatch",
            StructuralError::DanglingRef { .. } => "DanglingRef",
            StructuralError::ResolutionArc { .. } => "ResolutionArc",
            StructuralError::DuplicateInput { .. } => "DuplicateInput",
            StructuralError::MissingSelector(_) => "MissingSelector",
            StructuralError::UnexpectedSelector(_) => "UnexpectedSelector",
            StructuralError::SelectorNotResolution { .. } => "SelectorNotResolution",
            StructuralError::BranchCountMismatch { .. } => "BranchCountMismatch",
            StructuralError::UnknownProcedure { .. } => "UnknownProcedure",
            StructuralError::LabelOutOfRange { .. } => "LabelOutOfRange",
        }
    }

    pub fn element(&self) -> Element {
        use StructuralError::*;
        match self {
            EmptyId(_) => Element::Net,
            DuplicatePosition(p) => Element::Position(p.clone()),
            ResolutionTooNarrow { position, .. } => Element::Position(position.clone()),
            DuplicateTransition(t) | MissingSelector(t) | UnexpectedSelector(t) => {
                Element::Transition(t.clone())
            }
            TooFewBranches { transition, .. }
            | ArityMismatch { transition, .. }
            | DanglingRef { transition, .. }
            | ResolutionArc { transition, .. }
            | DuplicateInput { transition, .. }
            | SelectorNotResolution { transition, .. }
            | BranchCountMismatch { transition, .. }
            | UnknownProcedure { transition, .. }
            | LabelOutOfRange { transition, .. } => Element::Transition(transition.clone()),
        }
    }
}

/// An E-net: positions, transitions, and the procedures they reference.
///
/// A `Net` is immutable once built and may be shared across threads. It can hold
/// structurally invalid content (see [`Net::from_parts`]); [`validate_net`] reports
/// what is wrong. Equality is structural and ignores declaration order and the
/// procedure implementations.
#[derive(Debug, Clone)]
pub struct Net {
    name: String,
    positions: Vec<Position>,
    transitions: Vec<Transition>,
    procedures: ProcedureRegistry,
    position_index: HashMap<PositionId, usize>,
    transition_index: HashMap<TransitionId, usize>,
}

impl Net {
    /// Assembles a net without validating it.
    pub fn from_parts(
        name: impl Into<String>,
        positions: Vec<Position>,
        transitions: Vec<Transition>,
        procedures: ProcedureRegistry,
    ) -> Self {
        let mut position_index = HashMap::new();
        for (i, p) in positions.iter().enumerate() {
            position_index.entry(p.id.clone()).or_insert(i);
        }
        let mut transition_index = HashMap::new();
        for (i, t) in transitions.iter().enumerate() {
            transition_index.entry(t.id.clone()).or_insert(i);
        }
        Self {
            name: name.into(),
            positions,
            transitions,
            procedures,
            position_index,
            transition_index,
        }
    }

    pub fn builder(name: impl Into<String>) -> NetBuilder {
        NetBuilder {
            name: name.into(),
            positions: Vec::new(),
            transitions: Vec::new(),
            procedures: ProcedureRegistry::with_builtins(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    /// Transitions in declaration order.
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn procedures(&self) -> &ProcedureRegistry {
        &self.procedures
    }

    pub fn position(&self, id: &str) -> Option<&Position> {
        self.position_index.get(id).map(|&i| &self.positions[i])
    }

    pub fn position_kind(&self, id: &str) -> Option<PositionKind> {
        self.position(id).map(|p| p.kind)
    }

    pub fn transition(&self, id: &str) -> Option<&Transition> {
        self.transition_index.get(id).map(|&i| &self.transitions[i])
    }

    /// Positions that can hold tokens (simple and peripheral), in declaration order.
    pub fn place_ids(&self) -> impl Iterator<Item = &PositionId> {
        self.positions
            .iter()
            .filter(|p| !p.kind.is_resolution())
            .map(|p| &p.id)
    }

    pub fn resolution_ids(&self) -> impl Iterator<Item = &PositionId> {
        self.positions
            .iter()
            .filter(|p| p.kind.is_resolution())
            .map(|p| &p.id)
    }

    /// Same structure, new declaration order; used to check order independence.
    pub fn reordered(&self, positions: Vec<Position>, transitions: Vec<Transition>) -> Net {
        Net::from_parts(self.name.clone(), positions, transitions, self.procedures.clone())
    }

    /// A copy of this net with one more transition appended.
    pub fn with_transition(&self, t: Transition) -> Net {
        let mut transitions = self.transitions.clone();
        transitions.push(t);
        self.reordered(self.positions.clone(), transitions)
    }

    /// A copy of this net without the named transition.
    pub fn without_transition(&self, id: &str) -> Net {
        let transitions = self
            .transitions
            .iter()
            .filter(|t| t.id != id)
            .cloned()
            .collect();
        self.reordered(self.positions.clone(), transitions)
    }

    /// A copy of this net using a different procedure registry.
    pub fn with_procedures(&self, procedures: ProcedureRegistry) -> Net {
        Net::from_parts(
            self.name.clone(),
            self.positions.clone(),
            self.transitions.clone(),
            procedures,
        )
    }

    fn sorted_parts(&self) -> (Vec<&Position>, Vec<&Transition>) {
        let mut ps: Vec<_> = self.positions.iter().collect();
        ps.sort_by(|a, b| a.id.cmp(&b.id).then(a.kind.cmp(&b.kind)));
        let mut ts: Vec<_> = self.transitions.iter().collect();
        ts.sort_by(|a, b| a.id.cmp(&b.id));
        (ps, ts)
    }
}

impl PartialEq for Net {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.sorted_parts() == other.sorted_parts()
    }
}

/// Incremental construction of a [`Net`].
pub struct NetBuilder {
    name: String,
    positions: Vec<Position>,
    transitions: Vec<Transition>,
    procedures: ProcedureRegistry,
}

impl NetBuilder {
    pub fn position(mut self, id: impl Into<PositionId>, kind: PositionKind) -> Self {
        self.positions.push(Position {
            id: id.into(),
            kind,
        });
        self
    }

    pub fn simple(self, id: impl Into<PositionId>) -> Self {
        self.position(id, PositionKind::Simple)
    }

    pub fn transition(mut self, t: Transition) -> Self {
        self.transitions.push(t);
        self
    }

    pub fn procedures(mut self, procedures: ProcedureRegistry) -> Self {
        self.procedures.extend(&procedures);
        self
    }

    pub fn build_unchecked(self) -> Net {
        Net::from_parts(self.name, self.positions, self.transitions, self.procedures)
    }

    pub fn build(self) -> Result<Net, Vec<StructuralError>> {
        let net = self.build_unchecked();
        let errors = validate_net(&net);
        if errors.is_empty() {
            Ok(net)
        } else {
            Err(errors)
        }
    }
}

/// Checks every structural rule; an empty result means the net is valid.
pub fn validate_net(net: &Net) -> Vec<StructuralError> {
    let mut errors = Vec::new();

    let mut seen = BTreeSet::new();
    for p in net.positions() {
        if p.id.as_str().is_empty() {
            errors.push(StructuralError::EmptyId("position"));
        } else if !seen.insert(&p.id) {
            errors.push(StructuralError::DuplicatePosition(p.id.clone()));
        }
        if let PositionKind::Resolution { branches } = p.kind {
            if branches < 2 {
                errors.push(StructuralError::ResolutionTooNarrow {
                    position: p.id.clone(),
                    branches,
                });
            }
        }
    }

    let mut seen = BTreeSet::new();
    for t in net.transitions() {
        if t.id.as_str().is_empty() {
            errors.push(StructuralError::EmptyId("transition"));
        } else if !seen.insert(&t.id) {
            errors.push(StructuralError::DuplicateTransition(t.id.clone()));
        }
        validate_transition(net, t, &mut errors);
    }
    errors
}

fn validate_transition(net: &Net, t: &Transition, errors: &mut Vec<StructuralError>) {
    let tid = || t.id.clone();
    let branches = t.kind.branches();
    if t.kind.is_selected() && branches < 2 {
        errors.push(StructuralError::TooFewBranches {
            transition: tid(),
            branches,
        });
    }

    let (ei, eo) = t.kind.arity();
    if t.inputs.len() != ei || t.outputs.len() != eo {
        errors.push(StructuralError::ArityMismatch {
            transition: tid(),
            kind: t.kind.letter(),
            expected_in: ei,
            expected_out: eo,
            found_in: t.inputs.len(),
            found_out: t.outputs.len(),
        });
    }

    for p in t.inputs.iter().chain(&t.outputs) {
        match net.position_kind(p.as_str()) {
            None => errors.push(StructuralError::DanglingRef {
                transition: tid(),
                position: p.clone(),
            }),
            Some(k) if k.is_resolution() => errors.push(StructuralError::ResolutionArc {
                transition: tid(),
                position: p.clone(),
            }),
            Some(_) => {}
        }
    }

    let mut seen = BTreeSet::new();
    for p in &t.inputs {
        if !seen.insert(p) {
            errors.push(StructuralError::DuplicateInput {
                transition: tid(),
                position: p.clone(),
            });
        }
    }

    match (&t.selector, t.kind.is_selected()) {
        (None, true) => errors.push(StructuralError::MissingSelector(tid())),
        (Some(_), false) => errors.push(StructuralError::UnexpectedSelector(tid())),
        (Some(Selector::Resolution(r)), true) => match net.position_kind(r.as_str()) {
            None => errors.push(StructuralError::DanglingRef {
                transition: tid(),
                position: r.clone(),
            }),
            Some(PositionKind::Resolution { branches: found }) => {
                if found != branches {
                    errors.push(StructuralError::BranchCountMismatch {
                        transition: tid(),
                        position: r.clone(),
                        expected: branches,
                        found,
                    });
                }
            }
            Some(_) => errors.push(StructuralError::SelectorNotResolution {
                transition: tid(),
                position: r.clone(),
            }),
        },
        (Some(Selector::Proc(name)), true) => {
            if !net.procedures().contains(name) {
                errors.push(StructuralError::UnknownProcedure {
                    transition: tid(),
                    name: name.clone(),
                });
            }
        }
        (None, false) => {}
    }

    if let Some(name) = &t.procedure {
        if !net.procedures().contains(name) {
            errors.push(StructuralError::UnknownProcedure {
                transition: tid(),
                name: name.clone(),
            });
        }
    }

    for &b in t.labels.keys() {
        if b >= branches {
            errors.push(StructuralError::LabelOutOfRange {
                transition: tid(),
                branch: b,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq() -> NetBuilder {
        Net::builder("N")
            .position("p", PositionKind::Peripheral)
            .simple("q")
    }

    #[test]
    fn valid_single_transition() {
        let net = pq()
            .transition(Transition::new("t", TransitionKind::T).inputs(["p"]).outputs(["q"]))
            .build_unchecked();
        assert!(validate_net(&net).is_empty());
    }

    #[test]
    fn t_with_two_outputs_is_arity_mismatch() {
        let net = pq()
            .simple("r")
            .transition(
                Transition::new("t", TransitionKind::T)
                    .inputs(["p"])
                    .outputs(["q", "r"]),
            )
            .build_unchecked();
        let errs = validate_net(&net);
        assert_eq!(errs.len(), 1);
        assert!(matches!(&errs[0], StructuralError::ArityMismatch { transition, .. } if transition == "t"));
    }

    #[test]
    fn undefined_position_is_dangling() {
        let net = pq()
            .transition(Transition::new("t", TransitionKind::T).inputs(["p"]).outputs(["bX"]))
            .build_unchecked();
        let errs = validate_net(&net);
        assert_eq!(
            errs,
            vec![StructuralError::DanglingRef {
                transition: "t".into(),
                position: "bX".into()
            }]
        );
        assert_eq!(errs[0].code(), "DanglingRef");
    }

    #[test]
    fn selector_rules() {
        let net = pq()
            .simple("r")
            .position("br", PositionKind::Resolution { branches: 3 })
            .transition(
                Transition::new("x", TransitionKind::X { branches: 2 })
                    .inputs(["p"])
                    .outputs(["q", "r"])
                    .selector(Selector::Resolution("br".into())),
            )
            .transition(
                Transition::new("t", TransitionKind::T)
                    .inputs(["q"])
                    .outputs(["r"])
                    .selector(Selector::Proc("identity".into())),
            )
            .transition(
                Transition::new("x2", TransitionKind::X { branches: 2 })
                    .inputs(["r"])
                    .outputs(["p", "q"]),
            )
            .build_unchecked();
        let codes: Vec<_> = validate_net(&net).iter().map(|e| e.code()).collect();
        assert_eq!(
            codes,
            vec!["BranchCountMismatch", "UnexpectedSelector", "MissingSelector"]
        );
    }

    #[test]
    fn resolution_positions_cannot_carry_arcs() {
        let net = pq()
            .position("br", PositionKind::Resolution { branches: 2 })
            .transition(Transition::new("t", TransitionKind::T).inputs(["br"]).outputs(["q"]))
            .build_unchecked();
        let codes: Vec<_> = validate_net(&net).iter().map(|e| e.code()).collect();
        assert_eq!(codes, vec!["ResolutionArc"]);
    }

    #[test]
    fn duplicates_and_unknown_procedures() {
        let net = pq()
            .simple("q")
            .transition(
                Transition::new("t", TransitionKind::J)
                    .inputs(["p", "p"])
                    .outputs(["q"])
                    .procedure("Foo"),
            )
            .build_unchecked();
        let codes: Vec<_> = validate_net(&net).iter().map(|e| e.code()).collect();
        assert_eq!(codes, vec!["DuplicateId", "DuplicateInput", "UnknownProcedure"]);
    }

    #[test]
    fn degenerate_nets_are_valid() {
        assert!(validate_net(&Net::builder("E").build_unchecked()).is_empty());
        assert!(validate_net(&Net::builder("E").simple("lonely").build_unchecked()).is_empty());
    }

    #[test]
    fn equality_ignores_declaration_order() {
        let a = pq()
            .simple("r")
            .transition(Transition::new("t", TransitionKind::T).inputs(["p"]).outputs(["q"]))
            .transition(Transition::new("u", TransitionKind::T).inputs(["q"]).outputs(["r"]))
            .build_unchecked();
        let mut ps = a.positions().to_vec();
        ps.reverse();
        let mut ts = a.transitions().to_vec();
        ts.reverse();
        assert_eq!(a, a.reordered(ps, ts));
        assert_ne!(a, a.without_transition("u"));
    }
}
