use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::graph::{AbstractMarking, StateGraph};
use crate::net::{Net, PositionId};

/// Named predicate picking out accepting markings.
///
/// Textual forms: `sinks`, `any`, `initial`, `only:p,q`, `marked:p,q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FinalsPredicate {
    /// Every token sits on a place no transition consumes from.
    Sinks,
    /// Every marking is accepting.
    Any,
    /// Only the initial marking.
    Initial,
    /// Exactly these places are marked.
    Only(BTreeSet<PositionId>),
    /// At least these places are marked.
    Marked(BTreeSet<PositionId>),
}

impl FinalsPredicate {
    pub fn only<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<PositionId>,
    {
        FinalsPredicate::Only(ids.into_iter().map(Into::into).collect())
    }

    pub fn accepts(&self, g: &StateGraph, m: &AbstractMarking) -> bool {
        match self {
            FinalsPredicate::Sinks => m.occupied.iter().all(|p| g.sink_places().contains(p)),
            FinalsPredicate::Any => true,
            FinalsPredicate::Initial => m == g.initial(),
            FinalsPredicate::Only(set) => &m.occupied == set,
            FinalsPredicate::Marked(set) => set.is_subset(&m.occupied),
        }
    }

    /// Same test without a state graph: sinks are read off `net`, and
    /// `initial` stands in for the graph's initial marking.
    pub fn accepts_in(&self, net: &Net, initial: &AbstractMarking, m: &AbstractMarking) -> bool {
        match self {
            FinalsPredicate::Sinks => m
                .occupied
                .iter()
                .all(|p| !net.transitions().iter().any(|t| t.inputs.contains(p))),
            FinalsPredicate::Initial => m == initial,
            FinalsPredicate::Any => true,
            FinalsPredicate::Only(set) => &m.occupied == set,
            FinalsPredicate::Marked(set) => set.is_subset(&m.occupied),
        }
    }
}

impl FromStr for FinalsPredicate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let ids = |rest: &str| -> Result<BTreeSet<PositionId>, String> {
            let set: BTreeSet<PositionId> = rest
                .split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(PositionId::from)
                .collect();
            if set.is_empty() {
                Err(format!("finals predicate `{s}` lists no positions"))
            } else {
                Ok(set)
            }
        };
        match s.trim() {
            "sinks" => Ok(FinalsPredicate::Sinks),
            "any" => Ok(FinalsPredicate::Any),
            "initial" => Ok(FinalsPredicate::Initial),
            other => {
                if let Some(rest) = other.strip_prefix("only:") {
                    Ok(FinalsPredicate::Only(ids(rest)?))
                } else if let Some(rest) = other.strip_prefix("marked:") {
                    Ok(FinalsPredicate::Marked(ids(rest)?))
                } else {
                    Err(format!(
                        "unknown finals predicate `{other}` (expected sinks, any, initial, only:P,.. or marked:P,..)"
                    ))
                }
            }
        }
    }
}

impl fmt::Display for FinalsPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |set: &BTreeSet<PositionId>| {
            set.iter().map(PositionId::as_str).collect::<Vec<_>>().join(",")
        };
        match self {
            FinalsPredicate::Sinks => f.write_str("sinks"),
            FinalsPredicate::Any => f.write_str("any"),
            FinalsPredicate::Initial => f.write_str("initial"),
            FinalsPredicate::Only(s) => write!(f, "only:{}", join(s)),
            FinalsPredicate::Marked(s) => write!(f, "marked:{}", join(s)),
        }
    }
}
