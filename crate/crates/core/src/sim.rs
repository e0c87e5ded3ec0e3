//! The token game: enablement, firing, scheduling and runs.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::marking::{Marking, MarkingError};
use crate::net::{validate_net, Net, PositionId, Selector, StructuralError, Transition, TransitionId, TransitionKind};
use crate::procedure::{ProcCall, ProcOutput};
use crate::token::Token;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("unknown transition `{0}`")]
    UnknownTransition(TransitionId),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(TransitionId),
    #[error("transition `{transition}` would put a second token on `{position}`")]
    DoubleMarking {
        transition: TransitionId,
        position: PositionId,
    },
    #[error("script exhausted while transitions are still enabled")]
    ScriptExhausted,
    #[error("scripted transition `{0}` is not enabled")]
    ScriptedTransitionNotEnabled(String),
    #[error("net is structurally invalid ({} error(s))", .0.len())]
    InvalidNet(Vec<StructuralError>),
    #[error(transparent)]
    InvalidMarking(#[from] MarkingError),
}

/// One firing, as recorded in a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct FiringEvent {
    pub transition: TransitionId,
    /// Selected branch for X and Y; `None` for the other kinds.
    pub branch: Option<usize>,
    /// Tokens consumed from the inputs, in input order.
    pub before: Vec<Token>,
    /// Token produced on the output(s).
    pub after: Token,
}

impl FiringEvent {
    pub fn step_label(&self) -> String {
        match self.branch {
            Some(b) => format!("{}:{}", self.transition, b),
            None => self.transition.to_string(),
        }
    }
}

fn lookup<'n>(net: &'n Net, t: &str) -> Result<&'n Transition, SimError> {
    net.transition(t)
        .ok_or_else(|| SimError::UnknownTransition(t.into()))
}

fn input_tokens(m: &Marking, t: &Transition) -> Option<Vec<Token>> {
    t.inputs.iter().map(|p| m.token(p.as_str()).cloned()).collect()
}

/// Branch chosen by the transition's selector, `Some(None)` for unselected kinds,
/// `None` when the selector cannot decide (unset resolution, out-of-range value,
/// missing input token).
fn selected_branch(net: &Net, m: &Marking, t: &Transition) -> Option<Option<usize>> {
    let n = t.kind.branches();
    let value = match &t.selector {
        None => return Some(None),
        Some(Selector::Resolution(r)) => m.resolution(r.as_str())?,
        Some(Selector::Proc(name)) => {
            let tokens = input_tokens(m, t)?;
            let out = net.procedures().get(name)?.call(&ProcCall {
                transition: t.id.as_str(),
                tokens: &tokens,
            });
            out.selector?
        }
    };
    (value < n).then_some(Some(value))
}

fn outputs_for(t: &Transition, branch: Option<usize>) -> &[PositionId] {
    match (t.kind, branch) {
        (TransitionKind::X { .. }, Some(b)) => std::slice::from_ref(&t.outputs[b]),
        _ => &t.outputs,
    }
}

fn enabled_branch(net: &Net, m: &Marking, t: &Transition) -> Option<Option<usize>> {
    if !t.inputs.iter().all(|p| m.is_marked(p.as_str())) {
        return None;
    }
    let branch = selected_branch(net, m, t)?;
    outputs_for(t, branch)
        .iter()
        .all(|p| !m.is_marked(p.as_str()))
        .then_some(branch)
}

/// True iff `t` can fire in `m`.
pub fn enabled(net: &Net, m: &Marking, t: &str) -> Result<bool, SimError> {
    let t = lookup(net, t)?;
    Ok(enabled_branch(net, m, t).is_some())
}

/// Enabled transitions in declaration order.
pub fn enabled_transitions<'n>(net: &'n Net, m: &Marking) -> Vec<&'n Transition> {
    net.transitions()
        .iter()
        .filter(|t| enabled_branch(net, m, t).is_some())
        .collect()
}

/// Fires `t`, returning the successor marking and the event.
pub fn fire(net: &Net, m: &Marking, t: &str) -> Result<(Marking, FiringEvent), SimError> {
    let t = lookup(net, t)?;
    let branch = enabled_branch(net, m, t).ok_or_else(|| SimError::NotEnabled(t.id.clone()))?;

    let mut next = m.clone();
    let consumed: Vec<Token> = t
        .inputs
        .iter()
        .map(|p| next.take(p.as_str()).expect("enabled transition has its inputs"))
        .collect();

    let proc_input: &[Token] = match (t.kind, branch) {
        (TransitionKind::Y { .. }, Some(b)) => std::slice::from_ref(&consumed[b]),
        _ => &consumed,
    };
    let call = ProcCall {
        transition: t.id.as_str(),
        tokens: proc_input,
    };
    let output = match &t.procedure {
        Some(name) => net
            .procedures()
            .get(name)
            .map(|p| p.call(&call))
            .unwrap_or_else(|| ProcOutput::token(call.merged())),
        None => ProcOutput::token(call.merged()),
    };

    let targets = outputs_for(t, branch);
    for p in targets {
        if next.place(p.clone(), output.token.clone()).is_some() {
            return Err(SimError::DoubleMarking {
                transition: t.id.clone(),
                position: p.clone(),
            });
        }
    }

    if let Some(Selector::Resolution(r)) = &t.selector {
        next.clear_resolution(r.as_str());
    }
    if let Some(value) = output.selector {
        // A procedure's selector value arbitrates the transitions its output feeds.
        for downstream in net.transitions() {
            if let Some(Selector::Resolution(r)) = &downstream.selector {
                if downstream.inputs.iter().any(|p| targets.contains(p))
                    && value < downstream.kind.branches()
                {
                    next.set_resolution(r.clone(), value);
                }
            }
        }
    }

    let event = FiringEvent {
        transition: t.id.clone(),
        branch,
        before: consumed,
        after: output.token,
    };
    Ok((next, event))
}

/// One entry of a scripted schedule: a transition and, for X/Y, an optional branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptEntry {
    pub transition: TransitionId,
    pub branch: Option<usize>,
}

impl FromStr for ScriptEntry {
    type Err = String;

    /// Parses `t` or `t:b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (id, branch) = match s.split_once(':') {
            Some((id, b)) => {
                let b = b
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| format!("bad branch in script entry `{s}`"))?;
                (id.trim(), Some(b))
            }
            None => (s, None),
        };
        if id.is_empty() {
            return Err(format!("empty script entry `{s}`"));
        }
        Ok(ScriptEntry {
            transition: id.into(),
            branch,
        })
    }
}

impl fmt::Display for ScriptEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.branch {
            Some(b) => write!(f, "{}:{}", self.transition, b),
            None => write!(f, "{}", self.transition),
        }
    }
}

/// How `step` chooses among simultaneously enabled transitions.
#[derive(Debug, Clone, Default)]
pub enum SchedulingPolicy {
    #[default]
    FirstByDeclaredOrder,
    SeededRandom(Box<ChaCha8Rng>),
    /// Fires the listed transitions in order. An entry with a branch also acts as
    /// the environment: it sets an unset resolution selector to that branch.
    Scripted(VecDeque<ScriptEntry>),
}

impl SchedulingPolicy {
    pub fn seeded_random(seed: u64) -> Self {
        SchedulingPolicy::SeededRandom(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }

    pub fn scripted<I: IntoIterator<Item = ScriptEntry>>(entries: I) -> Self {
        SchedulingPolicy::Scripted(entries.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub transition: TransitionId,
    pub marking: Marking,
    pub event: FiringEvent,
}

/// Fires one transition chosen by `policy`, or returns `None` when nothing is enabled.
pub fn step(net: &Net, m: &Marking, policy: &mut SchedulingPolicy) -> Result<Option<Step>, SimError> {
    let candidates = enabled_transitions(net, m);

    let (chosen, marking) = match policy {
        SchedulingPolicy::FirstByDeclaredOrder => match candidates.first() {
            Some(t) => (t.id.clone(), m.clone()),
            None => return Ok(None),
        },
        SchedulingPolicy::SeededRandom(rng) => match candidates.len() {
            0 => return Ok(None),
            1 => (candidates[0].id.clone(), m.clone()),
            n => (candidates[rng.gen_range(0..n)].id.clone(), m.clone()),
        },
        SchedulingPolicy::Scripted(script) => {
            if candidates.is_empty() && pending_resolutions(net, m).is_empty() {
                return Ok(None);
            }
            let entry = script.pop_front().ok_or(SimError::ScriptExhausted)?;
            let t = net
                .transition(entry.transition.as_str())
                .ok_or_else(|| SimError::ScriptedTransitionNotEnabled(entry.to_string()))?;
            let mut prepared = m.clone();
            if let (Some(b), Some(Selector::Resolution(r))) = (entry.branch, &t.selector) {
                if prepared.resolution(r.as_str()).is_none() {
                    prepared.set_resolution(r.clone(), b);
                }
            }
            match enabled_branch(net, &prepared, t) {
                Some(branch) if entry.branch.is_none() || entry.branch == branch => {
                    (t.id.clone(), prepared)
                }
                _ => return Err(SimError::ScriptedTransitionNotEnabled(entry.to_string())),
            }
        }
    };

    let (next, event) = fire(net, &marking, chosen.as_str())?;
    Ok(Some(Step {
        transition: chosen,
        marking: next,
        event,
    }))
}

/// Transitions whose inputs are marked but whose resolution selector is unset.
pub fn pending_resolutions<'n>(net: &'n Net, m: &Marking) -> Vec<(&'n Transition, &'n PositionId)> {
    net.transitions()
        .iter()
        .filter_map(|t| match &t.selector {
            Some(Selector::Resolution(r))
                if m.resolution(r.as_str()).is_none()
                    && t.inputs.iter().all(|p| m.is_marked(p.as_str())) =>
            {
                Some((t, r))
            }
            _ => None,
        })
        .collect()
}

/// Environment that supplies resolution values when a run would otherwise stall.
pub trait ResolutionSource {
    /// Value for `position`, which arbitrates `transition`; `None` declines.
    fn resolve(&mut self, net: &Net, m: &Marking, transition: &Transition, position: &PositionId) -> Option<usize>;
}

/// Supplies nothing: unset resolutions block.
pub struct NoResolution;

impl ResolutionSource for NoResolution {
    fn resolve(&mut self, _: &Net, _: &Marking, _: &Transition, _: &PositionId) -> Option<usize> {
        None
    }
}

impl<F> ResolutionSource for F
where
    F: FnMut(&Net, &Marking, &Transition, &PositionId) -> Option<usize>,
{
    fn resolve(&mut self, net: &Net, m: &Marking, t: &Transition, p: &PositionId) -> Option<usize> {
        self(net, m, t, p)
    }
}

/// Picks resolution values uniformly from a seeded generator.
pub struct RandomResolution(ChaCha8Rng);

impl RandomResolution {
    pub fn new(seed: u64) -> Self {
        // Offset so the stream differs from the scheduler's when both share a seed.
        Self(ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15))
    }
}

impl ResolutionSource for RandomResolution {
    fn resolve(&mut self, _: &Net, _: &Marking, t: &Transition, _: &PositionId) -> Option<usize> {
        Some(self.0.gen_range(0..t.kind.branches()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Quiescent,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub events: Vec<FiringEvent>,
    pub final_marking: Marking,
    pub stop: StopReason,
}

impl Trace {
    pub fn labels(&self) -> Vec<String> {
        self.events.iter().map(FiringEvent::step_label).collect()
    }
}

/// Runs to quiescence or `max_steps`, with unset resolutions blocking.
pub fn run(net: &Net, m0: &Marking, policy: &mut SchedulingPolicy, max_steps: usize) -> Result<Trace, SimError> {
    run_with(net, m0, policy, max_steps, &mut NoResolution)
}

/// Runs with an environment that may set resolution values whenever nothing is enabled.
pub fn run_with(
    net: &Net,
    m0: &Marking,
    policy: &mut SchedulingPolicy,
    max_steps: usize,
    env: &mut dyn ResolutionSource,
) -> Result<Trace, SimError> {
    let errors = validate_net(net);
    if !errors.is_empty() {
        return Err(SimError::InvalidNet(errors));
    }
    m0.check(net)?;

    let mut marking = m0.clone();
    let mut events = Vec::new();
    loop {
        if events.len() >= max_steps {
            let idle = enabled_transitions(net, &marking).is_empty()
                && pending_resolutions(net, &marking).is_empty();
            let stop = if idle {
                StopReason::Quiescent
            } else {
                StopReason::MaxSteps
            };
            return Ok(Trace {
                events,
                final_marking: marking,
                stop,
            });
        }
        if enabled_transitions(net, &marking).is_empty() && !matches!(policy, SchedulingPolicy::Scripted(_)) {
            let mut progressed = false;
            for (t, r) in pending_resolutions(net, &marking) {
                if let Some(v) = env.resolve(net, &marking, t, r) {
                    marking.set_resolution(r.clone(), v);
                    progressed = true;
                    break;
                }
            }
            if !progressed {
                return Ok(Trace {
                    events,
                    final_marking: marking,
                    stop: StopReason::Quiescent,
                });
            }
        }
        match step(net, &marking, policy)? {
            Some(s) => {
                marking = s.marking;
                events.push(s.event);
            }
            None => {
                return Ok(Trace {
                    events,
                    final_marking: marking,
                    stop: StopReason::Quiescent,
                })
            }
        }
    }
}
