//! The `EN_Def` defining-subsystem net.
//!
//! Topology: `bp1 → t1 → b1 → t2 → b2 → t3 → b3 → t4 → b4 → t5 → b5`, with
//! `t2` branch 0 looping back to `bp1` when the entered data is rejected.
//! `br1` arbitrates `t2`. There is no resolution position for `t5`, so its
//! branch is computed from token attributes by `Select_Subsystem`.

mod primitives;
mod session;

use std::collections::BTreeSet;

use crate::analysis::{CheckReport, Witness};
use crate::dsl::{self, Diagnostic};
use crate::net::{Net, PositionKind, Selector, Transition, TransitionKind};

pub use primitives::{
    check_data, check_data_verdict, def_treats, def_vulnerability, en_def_procedures, ident, select_subsystem,
    ATTR_ASSETS, ATTR_MATRIX, ATTR_OPERATOR, ATTR_ROUTING, ATTR_SESSION,
    ATTR_THREATS, ATTR_THREAT_IDS, ATTR_VULNERABILITIES,
};
pub use session::{run_defining_session, DefiningOutcome, Routing, SessionError, SessionInput, Target, DEFAULT_MAX_RETRIES};

/// `EN_Def` in `.enet` form.
pub const EN_DEF_SOURCE: &str = include_str!("../../resources/EN_Def.enet");

/// Every complete run: `t1`, any number of rejected checks each followed by
/// `t1` again, an accepting `t2`, then `t3`, `t4` and one of the `t5` variants.
pub const EN_DEF_PATTERN: &str = "t1 ; t2:0>0 | t2:1 | t2:2 ; t3 ; t4 ; t5:0 | t5:1 | t5:2";

pub fn build_en_def() -> Net {
    Net::builder("EN_Def")
        .position("bp1", PositionKind::Peripheral)
        .position("br1", PositionKind::Resolution { branches: 3 })
        .simple("b1")
        .simple("b2")
        .simple("b3")
        .simple("b4")
        .simple("b5")
        .transition(Transition::new("t1", TransitionKind::T).inputs(["bp1"]).outputs(["b1"]).procedure("Ident"))
        .transition(
            Transition::new("t2", TransitionKind::X { branches: 3 })
                .selector(Selector::Resolution("br1".into()))
                .inputs(["b1"])
                .outputs(["bp1", "b2", "b2"])
                .procedure("Check_Data")
                .label(0, "t2~")
                .label(1, "t2^")
                .label(2, "t2∨"),
        )
        .transition(Transition::new("t3", TransitionKind::T).inputs(["b2"]).outputs(["b3"]).procedure("Def_Treats"))
        .transition(
            Transition::new("t4", TransitionKind::T)
                .inputs(["b3"])
                .outputs(["b4"])
                .procedure("Def_Vulnerability"),
        )
        .transition(
            Transition::new("t5", TransitionKind::X { branches: 3 })
                .selector(Selector::Proc("Select_Subsystem".into()))
                .inputs(["b4"])
                .outputs(["b5", "b5", "b5"])
                .label(0, "t5~")
                .label(1, "t5^")
                .label(2, "t5∨"),
        )
        .procedures(en_def_procedures())
        .build()
        .expect("EN_Def is structurally valid")
}

/// Parses and lowers the shipped `EN_Def.enet` against the `EN_Def` procedures.
pub fn load_en_def() -> Result<Net, Vec<Diagnostic>> {
    match dsl::load(EN_DEF_SOURCE, &en_def_procedures()) {
        (Some(net), diags) if !dsl::has_errors(&diags) => Ok(net),
        (_, diags) => Err(diags),
    }
}

fn witness(detail: String) -> Witness {
    Witness {
        marking: None,
        transition: None,
        detail,
    }
}

/// Compares `net` against the `EN_Def` inventory: positions and their kinds,
/// transitions with kinds, arcs, selectors and procedures. Each mismatch is a witness.
pub fn en_def_structure_report(net: &Net) -> CheckReport {
    let reference = build_en_def();
    let mut w = Vec::new();

    for p in reference.positions() {
        match net.position_kind(p.id.as_str()) {
            None => w.push(witness(format!("missing {}", p.id))),
            Some(k) if k != p.kind => w.push(witness(format!("{} has kind {k:?}, expected {:?}", p.id, p.kind))),
            Some(_) => {}
        }
    }
    let known: BTreeSet<&str> = reference.positions().iter().map(|p| p.id.as_str()).collect();
    for p in net.positions() {
        if !known.contains(p.id.as_str()) {
            w.push(witness(format!("unexpected position {}", p.id)));
        }
    }

    for t in reference.transitions() {
        let Some(u) = net.transition(t.id.as_str()) else {
            w.push(witness(format!("missing {}", t.id)));
            continue;
        };
        let mut mismatch = |what: &str| {
            w.push(Witness {
                marking: None,
                transition: Some(t.id.clone()),
                detail: format!("{what} differs"),
            })
        };
        if u.kind != t.kind {
            mismatch("kind");
        }
        if u.inputs != t.inputs {
            mismatch("inputs");
        }
        if u.outputs != t.outputs {
            mismatch("outputs");
        }
        if u.selector != t.selector {
            mismatch("selector");
        }
        if u.procedure != t.procedure {
            mismatch("procedure");
        }
    }
    let known: BTreeSet<&str> = reference.transitions().iter().map(|t| t.id.as_str()).collect();
    for t in net.transitions() {
        if !known.contains(t.id.as_str()) {
            w.push(witness(format!("unexpected transition {}", t.id)));
        }
    }

    CheckReport::from_witnesses("structure", 0, 0, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::StagePattern;

    #[test]
    fn inventory() {
        let net = build_en_def();
        assert_eq!(net.transitions().len(), 5);
        let peripheral: Vec<_> = net
            .positions()
            .iter()
            .filter(|p| p.kind == PositionKind::Peripheral)
            .map(|p| p.id.as_str())
            .collect();
        assert_eq!(peripheral, ["bp1"]);
        let res: Vec<_> = net.resolution_ids().map(|p| p.as_str()).collect();
        assert_eq!(res, ["br1"]);
        assert!(crate::validate_net(&net).is_empty());
    }

    #[test]
    fn shipped_file_matches_construction() {
        let parsed = load_en_def().unwrap();
        assert_eq!(parsed, build_en_def());
        assert!(en_def_structure_report(&parsed).passed());
    }

    #[test]
    fn structure_report_flags_missing_t3() {
        let r = en_def_structure_report(&build_en_def().without_transition("t3"));
        assert!(!r.passed());
        assert!(r.witnesses.iter().any(|w| w.detail == "missing t3"));
    }

    #[test]
    fn structure_report_flags_simple_br1() {
        let net = build_en_def();
        let positions = net
            .positions()
            .iter()
            .cloned()
            .map(|mut p| {
                if p.id == "br1" {
                    p.kind = PositionKind::Simple;
                }
                p
            })
            .collect();
        let r = en_def_structure_report(&net.reordered(positions, net.transitions().to_vec()));
        assert!(!r.passed());
    }

    #[test]
    fn pattern_parses() {
        let p: StagePattern = EN_DEF_PATTERN.parse().unwrap();
        assert_eq!(p.to_string(), EN_DEF_PATTERN);
    }
}
