use std::fmt;
use std::str::FromStr;

use super::primitives::{check_data_verdict, ATTR_ASSETS, ATTR_MATRIX, ATTR_OPERATOR, ATTR_ROUTING, ATTR_THREATS};
use super::build_en_def;
use crate::marking::Marking;
use crate::net::{Net, PositionId, Transition};
use crate::risk::{load_registers, RiskRegister, RowDiagnostic};
use crate::sim::{run_with, SchedulingPolicy, SimError, Trace};
use crate::token::Token;

pub const DEFAULT_MAX_RETRIES: usize = 3;

/// Where the operator asked the session to hand over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Routing {
    #[default]
    None,
    Calculation,
    Assessment,
}

impl Routing {
    pub fn as_str(self) -> &'static str {
        match self {
            Routing::None => "none",
            Routing::Calculation => "calculation",
            Routing::Assessment => "assessment",
        }
    }
}

impl FromStr for Routing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Routing::None),
            "calculation" => Ok(Routing::Calculation),
            "assessment" => Ok(Routing::Assessment),
            _ => Err(format!("unknown routing `{s}` (expected none, calculation or assessment)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Identification,
    Calculation,
    Assessment,
}

impl Target {
    fn from_branch(b: usize) -> Option<Self> {
        [Target::Identification, Target::Calculation, Target::Assessment].get(b).copied()
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Identification => "identification",
            Target::Calculation => "calculation",
            Target::Assessment => "assessment",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SessionInput {
    pub operator: String,
    pub assets: String,
    pub threats: String,
    pub matrix: String,
    pub routing: Routing,
    /// Values for `br1`, consumed in order before falling back to `Check_Data`.
    pub validity_override: Option<Vec<usize>>,
}

impl SessionInput {
    fn token(&self) -> Token {
        let mut t = Token::new()
            .with(ATTR_OPERATOR, self.operator.as_str())
            .with(ATTR_ASSETS, self.assets.as_str())
            .with(ATTR_THREATS, self.threats.as_str())
            .with(ATTR_MATRIX, self.matrix.as_str());
        if self.routing != Routing::None {
            t = t.with(ATTR_ROUTING, self.routing.as_str());
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefiningOutcome {
    pub target: Target,
    pub register: RiskRegister,
    pub trace: Trace,
    pub retries: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("data rejected {retries} times, giving up")]
    RetriesExhausted { retries: usize, trace: Trace },
    #[error("session stopped before t5 fired")]
    Incomplete { trace: Trace },
    #[error("data accepted at t2 but ingestion reports errors")]
    InvalidData { diagnostics: Vec<RowDiagnostic>, trace: Trace },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Runs one defining session on `EN_Def`: the input rides on a token placed on
/// `bp1`, `br1` is set from the override or from `Check_Data`, and every rejection
/// sends the token back through `t1`. The `max_retries + 1`-th rejection aborts.
pub fn run_defining_session(input: &SessionInput, max_retries: usize) -> Result<DefiningOutcome, SessionError> {
    run_on(&build_en_def(), input, max_retries)
}

fn run_on(net: &Net, input: &SessionInput, max_retries: usize) -> Result<DefiningOutcome, SessionError> {
    let mut m0 = Marking::new();
    m0.place("bp1", input.token());

    let mut overrides = input.validity_override.clone().unwrap_or_default().into_iter();
    let mut retries = 0;
    let mut exhausted = false;
    let mut env = |_: &Net, m: &Marking, t: &Transition, _: &PositionId| -> Option<usize> {
        let token = m.token(t.inputs[0].as_str())?;
        let v = overrides.next().unwrap_or_else(|| check_data_verdict(token));
        if v == 0 {
            if retries == max_retries {
                exhausted = true;
                return None;
            }
            retries += 1;
        }
        Some(v)
    };
    // t1 → t2 → t3 → t4 → t5 per attempt; the bound only guards against a broken net.
    let max_steps = 2 * (max_retries + 1) + 3;
    let trace = run_with(net, &m0, &mut SchedulingPolicy::FirstByDeclaredOrder, max_steps, &mut env)?;

    if exhausted {
        return Err(SessionError::RetriesExhausted { retries, trace });
    }
    let target = match trace.events.last() {
        Some(e) if e.transition == "t5" => e.branch.and_then(Target::from_branch),
        _ => None,
    };
    let Some(target) = target else {
        return Err(SessionError::Incomplete { trace });
    };
    let token = trace.final_marking.token("b5").cloned().unwrap_or_default();
    let text = |k: &str| token.get(k).and_then(|v| v.as_text()).unwrap_or("").to_owned();
    let (seed, diagnostics) = load_registers(&text(ATTR_ASSETS), &text(ATTR_THREATS), &text(ATTR_MATRIX));
    let Some(seed) = seed.filter(|_| !diagnostics.iter().any(RowDiagnostic::is_error)) else {
        return Err(SessionError::InvalidData { diagnostics, trace });
    };
    Ok(DefiningOutcome {
        target,
        register: RiskRegister::from_seed(seed),
        trace,
        retries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endef::{ATTR_SESSION, ATTR_VULNERABILITIES};
    use crate::token::Value;

    fn valid() -> SessionInput {
        SessionInput {
            operator: "op1".into(),
            assets: "id\tname\tcategory\tvalue\na1\tMail\tServers\t4\na2\tDesk\tBuilding\t2\n".into(),
            threats: "id\tname\tcategory\tprobability\nth1\tPhish\tIntentional\t0.5\n".into(),
            matrix: "asset_id\tthreat_id\tvuln_category\tseverity\na1\tth1\tHuman\t0.6\na2\tth1\tPhysical\t0.2\n"
                .into(),
            ..Default::default()
        }
    }

    #[test]
    fn valid_session_goes_to_identification() {
        let out = run_defining_session(&valid(), DEFAULT_MAX_RETRIES).unwrap();
        assert_eq!(out.trace.labels(), ["t1", "t2:1", "t3", "t4", "t5:0"]);
        assert_eq!(out.target, Target::Identification);
        assert_eq!(out.retries, 0);
        assert_eq!(out.register.risks.len(), 2);
        let last = &out.trace.events[4].after;
        assert_eq!(last.get(ATTR_SESSION), Some(&Value::Int(1)));
        assert_eq!(last.get(ATTR_OPERATOR), Some(&Value::Text("op1".into())));
        assert_eq!(last.get(ATTR_VULNERABILITIES).and_then(Value::as_list).map(<[String]>::len), Some(2));
    }

    #[test]
    fn empty_assets_exhaust_retries() {
        let input = SessionInput {
            assets: String::new(),
            ..valid()
        };
        let Err(SessionError::RetriesExhausted { retries, trace }) = run_defining_session(&input, 3) else {
            panic!("expected exhaustion");
        };
        assert_eq!(retries, 3);
        assert_eq!(trace.labels(), ["t1", "t2:0", "t1", "t2:0", "t1", "t2:0", "t1"]);
        assert_eq!(trace.events.iter().filter(|e| e.transition == "t1").count(), 4);
    }

    #[test]
    fn assessment_routing() {
        let input = SessionInput {
            routing: Routing::Assessment,
            ..valid()
        };
        let out = run_defining_session(&input, 3).unwrap();
        assert_eq!(out.trace.labels(), ["t1", "t2:2", "t3", "t4", "t5:2"]);
        assert_eq!(out.target, Target::Assessment);
    }

    #[test]
    fn override_retries_then_accepts() {
        let input = SessionInput {
            validity_override: Some(vec![0, 0, 1]),
            ..valid()
        };
        let out = run_defining_session(&input, 3).unwrap();
        assert_eq!(out.retries, 2);
        assert_eq!(out.trace.labels(), ["t1", "t2:0", "t1", "t2:0", "t1", "t2:1", "t3", "t4", "t5:0"]);
        assert_eq!(out.trace.events[8].after.get(ATTR_SESSION), Some(&Value::Int(3)));
    }

    #[test]
    fn forced_acceptance_of_bad_data_is_reported() {
        let input = SessionInput {
            assets: "id\tname\tcategory\tvalue\na1\tMail\tServers\t9\n".into(),
            validity_override: Some(vec![1]),
            ..valid()
        };
        assert!(matches!(run_defining_session(&input, 3), Err(SessionError::InvalidData { .. })));
    }

    #[test]
    fn reproducible() {
        let a = run_defining_session(&valid(), 3).unwrap();
        let b = run_defining_session(&valid(), 3).unwrap();
        assert_eq!(a, b);
    }
}
