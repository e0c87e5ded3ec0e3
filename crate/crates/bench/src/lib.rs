//! Inputs shared by the benchmarks.

use enet::{Net, PositionKind, Selector, Transition, TransitionKind};

/// `width` independent two-place cycles; with one token per cycle the state
/// graph has exactly `2^width` markings.
pub fn parallel_cycles(width: usize) -> Net {
    let mut b = Net::builder("cycles");
    for i in 0..width {
        b = b
            .simple(format!("a{i}"))
            .simple(format!("b{i}"))
            .transition(Transition::new(format!("go{i}"), TransitionKind::T).inputs([format!("a{i}")]).outputs([format!("b{i}")]))
            .transition(Transition::new(format!("back{i}"), TransitionKind::T).inputs([format!("b{i}")]).outputs([format!("a{i}")]));
    }
    b.build().expect("valid")
}

/// A long chain of X transitions, each arbitrated by its own resolution position.
pub fn choice_chain(len: usize) -> Net {
    let mut b = Net::builder("chain").position("p0", PositionKind::Peripheral);
    for i in 0..len {
        b = b
            .simple(format!("p{}", i + 1))
            .simple(format!("q{}", i + 1))
            .position(format!("r{i}"), PositionKind::Resolution { branches: 2 })
            .transition(
                Transition::new(format!("x{i}"), TransitionKind::X { branches: 2 })
                    .selector(Selector::Resolution(format!("r{i}").into()))
                    .inputs([format!("p{i}")])
                    .outputs([format!("p{}", i + 1), format!("q{}", i + 1)]),
            );
    }
    b.build().expect("valid")
}

/// Tab-separated asset, threat and matrix tables with every asset exposed to every threat.
pub fn risk_tables(assets: usize, threats: usize) -> (String, String, String) {
    let mut a = String::from("id\tname\tcategory\tvalue\n");
    for i in 0..assets {
        a += &format!("A{i}\tasset {i}\tServers\t{}\n", i % 5 + 1);
    }
    let mut t = String::from("id\tname\tcategory\tprobability\n");
    for j in 0..threats {
        t += &format!("T{j}\tthreat {j}\tIntentional\t0.{}\n", j % 10);
    }
    let mut m = String::from("asset_id\tthreat_id\tvuln_category\tseverity\n");
    for i in 0..assets {
        for j in 0..threats {
            m += &format!("A{i}\tT{j}\tHuman\t0.{}\n", (i + j) % 10);
        }
    }
    (a, t, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use enet::analysis::{build_state_graph, AbstractMarking, ExploreOptions};

    #[test]
    fn sizes() {
        let m0 = AbstractMarking::with_tokens((0..3).map(|i| format!("a{i}")));
        let g = build_state_graph(&parallel_cycles(3), &m0, ExploreOptions::default()).unwrap();
        assert_eq!(g.node_count(), 8);
        // Each X either continues or stops: len + 1 distinct end points plus the path.
        let g = build_state_graph(&choice_chain(4), &AbstractMarking::with_tokens(["p0"]), ExploreOptions::default()).unwrap();
        assert_eq!(g.node_count(), 9);
        let (a, t, m) = risk_tables(3, 2);
        assert_eq!(enet::risk::load_registers(&a, &t, &m).0.unwrap().vulnerabilities.len(), 6);
    }
}
