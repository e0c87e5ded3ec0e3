//! The five procedures bound to `EN_Def` transitions. Session data travels in
//! token attributes; the raw TSV texts ride along so later stages can re-read them.

use crate::procedure::{ProcCall, ProcOutput, Procedure, ProcedureRegistry};
use crate::risk::{derive_vulnerabilities, load_registers, parse_assets, parse_matrix, parse_threats};
use crate::token::{Token, Value};

pub const ATTR_OPERATOR: &str = "operator";
pub const ATTR_SESSION: &str = "session";
pub const ATTR_ASSETS: &str = "assets";
pub const ATTR_THREATS: &str = "threats";
pub const ATTR_MATRIX: &str = "matrix";
pub const ATTR_ROUTING: &str = "routing";
pub const ATTR_THREAT_IDS: &str = "threat_ids";
pub const ATTR_VULNERABILITIES: &str = "vulnerabilities";

fn text<'t>(token: &'t Token, name: &str) -> &'t str {
    token.get(name).and_then(Value::as_text).unwrap_or("")
}

fn routing(token: &Token) -> &str {
    text(token, ATTR_ROUTING)
}

/// Stamps the operator id (empty when absent) and bumps the session counter.
pub fn ident(token: &Token) -> Token {
    let counter = token.get(ATTR_SESSION).and_then(Value::as_int).unwrap_or(0);
    let operator = text(token, ATTR_OPERATOR).to_owned();
    token
        .clone()
        .with(ATTR_OPERATOR, operator)
        .with(ATTR_SESSION, counter + 1)
}

/// `0` retry when there are no assets or ingestion reports an error,
/// `2` when valid and assessment routing was requested, else `1`.
pub fn check_data_verdict(token: &Token) -> usize {
    let (seed, diags) = load_registers(text(token, ATTR_ASSETS), text(token, ATTR_THREATS), text(token, ATTR_MATRIX));
    let valid = match &seed {
        Some(seed) => !seed.assets.is_empty() && !diags.iter().any(|d| d.is_error()),
        None => false,
    };
    match (valid, routing(token)) {
        (false, _) => 0,
        (true, "assessment") => 2,
        (true, _) => 1,
    }
}

/// The token passes through unchanged: the branch actually taken is decided by
/// `br1`, which the environment may set differently from the verdict.
pub fn check_data(token: &Token) -> (Token, usize) {
    (token.clone(), check_data_verdict(token))
}

pub fn def_treats(token: &Token) -> Token {
    let mut diags = Vec::new();
    let ids: Vec<String> = parse_threats(text(token, ATTR_THREATS), &mut diags)
        .into_iter()
        .map(|t| t.id)
        .collect();
    token.clone().with(ATTR_THREAT_IDS, ids)
}

/// Attaches vulnerability ids (`asset/threat`); an unusable matrix yields none.
pub fn def_vulnerability(token: &Token) -> Token {
    let mut diags = Vec::new();
    let assets = parse_assets(text(token, ATTR_ASSETS), &mut diags);
    let threats = parse_threats(text(token, ATTR_THREATS), &mut diags);
    let matrix = parse_matrix(text(token, ATTR_MATRIX), &mut diags);
    let ids: Vec<String> = derive_vulnerabilities(&assets, &threats, &matrix)
        .map(|(vs, _)| vs.iter().map(|v| v.id()).collect())
        .unwrap_or_default();
    token.clone().with(ATTR_VULNERABILITIES, ids)
}

/// `2` assessment when routing asks for it, `1` calculation when requested,
/// `0` identification when there are vulnerabilities, otherwise `1`.
pub fn select_subsystem(token: &Token) -> usize {
    let has_vulns = token
        .get(ATTR_VULNERABILITIES)
        .and_then(Value::as_list)
        .is_some_and(|l| !l.is_empty());
    if routing(token) == "assessment" {
        2
    } else if routing(token) == "calculation" {
        1
    } else if has_vulns {
        0
    } else {
        1
    }
}

/// Builtins plus `Ident`, `Check_Data`, `Def_Treats`, `Def_Vulnerability` and `Select_Subsystem`.
pub fn en_def_procedures() -> ProcedureRegistry {
    let mut reg = ProcedureRegistry::with_builtins();
    reg.register(Procedure::new("Ident", |c: &ProcCall<'_>| ProcOutput::token(ident(&c.token()))));
    reg.register(Procedure::new("Check_Data", |c: &ProcCall<'_>| {
        let (t, v) = check_data(&c.token());
        ProcOutput::with_selector(t, v)
    }));
    reg.register(Procedure::new("Def_Treats", |c: &ProcCall<'_>| ProcOutput::token(def_treats(&c.token()))));
    reg.register(Procedure::new("Def_Vulnerability", |c: &ProcCall<'_>| {
        ProcOutput::token(def_vulnerability(&c.token()))
    }));
    reg.register(Procedure::new("Select_Subsystem", |c: &ProcCall<'_>| {
        let t = c.token();
        let v = select_subsystem(&t);
        ProcOutput::with_selector(t, v)
    }));
    reg
}
