use std::collections::BTreeSet;

use enet::analysis::{
    build_state_graph, check_conflict_freedom, check_deadlock_freedom, check_safeness, check_sequence_language,
    check_transition_coverage, export_dot, AbstractMarking, ExploreOptions, FinalsPredicate, StagePattern,
};
use enet::endef::{
    build_en_def, en_def_structure_report, load_en_def, run_defining_session, SessionInput, EN_DEF_PATTERN,
};
use enet::risk::{load_registers, RiskRegister};
use enet::{Marking, Net, Transition, TransitionKind};

fn graph(net: &Net) -> enet::analysis::StateGraph {
    build_state_graph(net, &AbstractMarking::from(&Marking::peripheral(net)), ExploreOptions::default()).unwrap()
}

#[test]
fn state_graph_size() {
    let g = graph(&build_en_def());
    // bp1, b1..b5; t1, t2 ×3, t3, t4, t5 ×3.
    assert_eq!(g.node_count(), 6);
    assert_eq!(g.edge_count(), 9);
}

#[test]
fn analysis_suite_passes() {
    for net in [build_en_def(), load_en_def().unwrap()] {
        let g = graph(&net);
        let finals = FinalsPredicate::only(["b5"]);
        let pattern: StagePattern = EN_DEF_PATTERN.parse().unwrap();
        let reports = [
            check_safeness(&g),
            check_deadlock_freedom(&g, &finals),
            check_transition_coverage(&g, &net),
            check_conflict_freedom(&g, &net),
            check_sequence_language(&g, &pattern, &finals),
        ];
        for r in &reports {
            assert!(r.passed(), "{r}");
        }
        assert!(g.node_count() < 200);
    }
}

#[test]
fn dot_edge_labels() {
    let dot = export_dot(&graph(&build_en_def()));
    let labels: BTreeSet<&str> = dot
        .lines()
        .filter(|l| l.contains("->"))
        .filter_map(|l| l.split(" [label=\"").nth(1)?.split('"').next())
        .collect();
    let expected = BTreeSet::from(["t1", "t2:0", "t2:1", "t2:2", "t3", "t4", "t5:0", "t5:1", "t5:2"]);
    assert_eq!(labels, expected, "{dot}");
    assert!(dot.contains("xlabel=\"t2∨\""));
}

#[test]
fn bypassing_t3_breaks_the_sequence() {
    // A shortcut b2 → b4 lets a run skip t3 and t4.
    let net = build_en_def().with_transition(Transition::new("skip", TransitionKind::T).inputs(["b2"]).outputs(["b4"]));
    let g = graph(&net);
    let pattern: StagePattern = EN_DEF_PATTERN.parse().unwrap();
    let report = check_sequence_language(&g, &pattern, &FinalsPredicate::only(["b5"]));
    assert!(!report.passed());
    assert!(!en_def_structure_report(&net).passed());
}

#[test]
fn session_register_matches_direct_path() {
    let input = SessionInput {
        operator: "op".into(),
        assets: "id\tname\tcategory\tvalue\na1\tMail\tServers\t5\na2\tLaptops\tComputers\t3\n".into(),
        threats: "id\tname\tcategory\tprobability\nth1\tFlood\tNatural\t0.1\nth2\tPhish\tIntentional\t0.7\n".into(),
        matrix: "asset_id\tthreat_id\tvuln_category\tseverity\na1\tth2\tHuman\t0.8\na2\tth1\tPhysical\t0.4\na2\tth2\tHuman\t0.6\n"
            .into(),
        ..Default::default()
    };
    let outcome = run_defining_session(&input, 3).unwrap();
    let direct = RiskRegister::from_seed(load_registers(&input.assets, &input.threats, &input.matrix).0.unwrap());
    assert_eq!(outcome.register, direct);
}

#[test]
fn net_is_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<Net>();
    let net = std::sync::Arc::new(build_en_def());
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let net = net.clone();
            std::thread::spawn(move || graph(&net).edge_count())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), 9);
    }
}
