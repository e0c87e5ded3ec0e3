use std::fmt::Write;

use super::graph::StateGraph;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering of a state graph. Nodes are numbered in lexicographic
/// order of their labels, so the output depends only on the graph's content.
pub fn export_dot(g: &StateGraph) -> String {
    let labels: Vec<String> = g.nodes().iter().map(|m| g.node_label(m)).collect();
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
    let mut rank = vec![0; labels.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    let mut out = String::from("digraph state_graph {\n");
    let places: Vec<&str> = g.places().iter().map(|p| p.as_str()).collect();
    writeln!(out, "  // places: {}", places.join(" ")).unwrap();
    out.push_str("  node [shape=box];\n");
    for &i in &order {
        let extra = if i == 0 { ", peripheries=2" } else { "" };
        writeln!(out, "  n{} [label=\"{}\"{extra}];", rank[i], escape(&labels[i])).unwrap();
    }

    // Text labels of X/Y branches go to `xlabel`; `label` stays the bare step.
    let mut edges: Vec<(usize, usize, String, Option<&str>)> = g
        .edges()
        .iter()
        .map(|e| {
            let text = e.branch.and_then(|b| g.branch_label(&e.transition, b));
            (rank[e.from], rank[e.to], g.step_label(e), text)
        })
        .collect();
    edges.sort();
    for (from, to, label, text) in edges {
        match text {
            Some(x) => writeln!(out, "  n{from} -> n{to} [label=\"{}\", xlabel=\"{}\"];", escape(&label), escape(x)),
            None => writeln!(out, "  n{from} -> n{to} [label=\"{}\"];", escape(&label)),
        }
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{build_state_graph, AbstractMarking};
    use crate::net::{Net, Transition, TransitionKind};

    #[test]
    fn two_node_graph() {
        let net = Net::builder("one")
            .simple("p")
            .simple("q")
            .transition(Transition::new("t", TransitionKind::T).inputs(["p"]).outputs(["q"]))
            .build()
            .unwrap();
        let g = build_state_graph(&net, &AbstractMarking::with_tokens(["p"]), Default::default()).unwrap();
        let dot = export_dot(&g);
        assert_eq!(
            dot,
            "digraph state_graph {\n  // places: p q\n  node [shape=box];\n  n0 [label=\"01\"];\n  n1 [label=\"10\", peripheries=2];\n  n1 -> n0 [label=\"t\"];\n}\n"
        );
        assert_eq!(dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count(), 2);
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 1);
        assert_eq!(dot, export_dot(&g));
    }
}
