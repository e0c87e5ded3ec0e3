//! Staged sequence patterns and the language-inclusion check.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use super::finals::FinalsPredicate;
use super::graph::{Edge, StateGraph};
use super::{CheckReport, Witness};
use crate::net::TransitionId;

/// A transition, optionally restricted to one branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepMatch {
    pub transition: TransitionId,
    pub branch: Option<usize>,
}

impl StepMatch {
    fn matches(&self, e: &Edge) -> bool {
        self.transition == e.transition && (self.branch.is_none() || self.branch == e.branch)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alternative {
    pub step: StepMatch,
    /// Stage to continue at after this step; `None` means the next stage.
    pub loop_back: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub alternatives: Vec<Alternative>,
}

/// Ordered stages of step alternatives. A run conforms when it walks every
/// stage to the end; alternatives with a loop-back return to an earlier stage.
///
/// Text form: stages separated by `;`, alternatives by `|`, a step is `t` or
/// `t:b`, and `>k` after a step jumps back to stage `k`:
///
/// ```text
/// t1 ; t2:0>0 | t2:1 | t2:2 ; t3 ; t4 ; t5:0 | t5:1 | t5:2
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StagePattern {
    pub stages: Vec<Stage>,
}

impl StagePattern {
    fn advance(&self, states: &BTreeSet<usize>, e: &Edge) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &s in states {
            let Some(stage) = self.stages.get(s) else { continue };
            for alt in &stage.alternatives {
                if alt.step.matches(e) {
                    out.insert(alt.loop_back.unwrap_or(s + 1));
                }
            }
        }
        out
    }

    fn accepting(&self, states: &BTreeSet<usize>) -> bool {
        states.contains(&self.stages.len())
    }
}

impl FromStr for StagePattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut stages = Vec::new();
        for stage_text in s.split(';') {
            let mut alternatives = Vec::new();
            for alt in stage_text.split('|') {
                let alt = alt.trim();
                if alt.is_empty() {
                    return Err(format!("empty alternative in pattern `{s}`"));
                }
                let (step_text, loop_back) = match alt.split_once('>') {
                    Some((step, k)) => {
                        let k = k
                            .trim()
                            .parse::<usize>()
                            .map_err(|_| format!("bad loop-back target in `{alt}`"))?;
                        (step.trim(), Some(k))
                    }
                    None => (alt, None),
                };
                let (id, branch) = match step_text.split_once(':') {
                    Some((id, b)) => (
                        id.trim(),
                        Some(
                            b.trim()
                                .parse::<usize>()
                                .map_err(|_| format!("bad branch in `{alt}`"))?,
                        ),
                    ),
                    None => (step_text, None),
                };
                alternatives.push(Alternative {
                    step: StepMatch {
                        transition: id.into(),
                        branch,
                    },
                    loop_back,
                });
            }
            stages.push(Stage { alternatives });
        }
        for stage in &stages {
            for alt in &stage.alternatives {
                if alt.loop_back.is_some_and(|k| k >= stages.len()) {
                    return Err(format!("loop-back target out of range in `{s}`"));
                }
            }
        }
        Ok(StagePattern { stages })
    }
}

impl fmt::Display for StagePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, stage) in self.stages.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            for (j, alt) in stage.alternatives.iter().enumerate() {
                if j > 0 {
                    f.write_str(" | ")?;
                }
                write!(f, "{}", alt.step.transition)?;
                if let Some(b) = alt.step.branch {
                    write!(f, ":{b}")?;
                }
                if let Some(k) = alt.loop_back {
                    write!(f, ">{k}")?;
                }
            }
        }
        Ok(())
    }
}

/// Passes iff every path from the initial marking to a marking accepted by
/// `finals` spells a word of `pattern`. Loops are handled exactly by exploring
/// the product of the state graph with the pattern's stage automaton.
pub fn check_sequence_language(g: &StateGraph, pattern: &StagePattern, finals: &FinalsPredicate) -> CheckReport {
    let is_final: Vec<bool> = g.nodes().iter().map(|m| finals.accepts(g, m)).collect();
    let reaches_final = g.co_reachable(|i| is_final[i]);

    type State = (usize, BTreeSet<usize>);
    let start: State = (0, BTreeSet::from([0]));
    let mut parent: HashMap<State, Option<(State, String)>> = HashMap::from([(start.clone(), None)]);
    let mut queue = VecDeque::from([start]);
    let mut witnesses = Vec::new();

    let path_to = |parent: &HashMap<State, Option<(State, String)>>, s: &State| {
        let mut steps = Vec::new();
        let mut cur = s.clone();
        while let Some(Some((prev, label))) = parent.get(&cur) {
            steps.push(label.clone());
            cur = prev.clone();
        }
        steps.reverse();
        steps.join(" ")
    };

    while let Some(state) = queue.pop_front() {
        let (node, stages) = &state;
        if is_final[*node] && !pattern.accepting(stages) {
            witnesses.push(Witness {
                marking: Some(g.nodes()[*node].clone()),
                transition: None,
                detail: format!("run ends before the pattern completes: {}", path_to(&parent, &state)),
            });
        }
        for e in g.outgoing(*node) {
            let next = pattern.advance(stages, e);
            if next.is_empty() {
                if reaches_final[e.to] {
                    let mut path = path_to(&parent, &state);
                    if !path.is_empty() {
                        path.push(' ');
                    }
                    path.push_str(&g.step_label(e));
                    witnesses.push(Witness {
                        marking: Some(g.nodes()[*node].clone()),
                        transition: Some(e.transition.clone()),
                        detail: format!("step leaves the pattern: {path}"),
                    });
                }
                continue;
            }
            let succ = (e.to, next);
            if !parent.contains_key(&succ) {
                parent.insert(succ.clone(), Some((state.clone(), g.step_label(e))));
                queue.push_back(succ);
            }
        }
    }

    CheckReport::new("sequence", g, witnesses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let text = "t1 ; t2:0>0 | t2:1 | t2:2 ; t3 ; t4 ; t5:0 | t5:1 | t5:2";
        let p: StagePattern = text.parse().unwrap();
        assert_eq!(p.stages.len(), 5);
        assert_eq!(p.stages[1].alternatives[0].loop_back, Some(0));
        assert_eq!(p.to_string(), text);
    }

    #[test]
    fn rejects_bad_patterns() {
        assert!("t1 ; ".parse::<StagePattern>().is_err());
        assert!("t1>5".parse::<StagePattern>().is_err());
        assert!("t1:x".parse::<StagePattern>().is_err());
    }
}
