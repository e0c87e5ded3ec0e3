use std::fmt::Write;

use crate::net::{Net, PositionKind, Selector};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical text for a net: positions then transitions, each sorted by
/// `(kind, id)`, body clauses in grammar order.
pub fn format(net: &Net) -> String {
    let mut out = String::new();
    writeln!(out, "net {} {{", net.name()).unwrap();

    let mut positions: Vec<_> = net.positions().iter().collect();
    positions.sort_by(|a, b| a.kind.cmp(&b.kind).then_with(|| a.id.cmp(&b.id)));
    for p in positions {
        match p.kind {
            PositionKind::Simple => writeln!(out, "  position {};", p.id),
            PositionKind::Peripheral => writeln!(out, "  position {} peripheral;", p.id),
            PositionKind::Resolution { branches } => {
                writeln!(out, "  position {} resolution({branches});", p.id)
            }
        }
        .unwrap();
    }

    let mut transitions: Vec<_> = net.transitions().iter().collect();
    transitions.sort_by(|a, b| a.kind.cmp(&b.kind).then_with(|| a.id.cmp(&b.id)));
    for t in transitions {
        if !out.ends_with("{\n") {
            out.push('\n');
        }
        writeln!(out, "  transition {} kind {} {{", t.id, t.kind.letter()).unwrap();
        match &t.selector {
            Some(Selector::Resolution(r)) => writeln!(out, "    selector resolution {r};").unwrap(),
            Some(Selector::Proc(p)) => writeln!(out, "    selector proc {p};").unwrap(),
            None => {}
        }
        let list = |ids: &[crate::net::PositionId]| {
            ids.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(", ")
        };
        let (ik, ok) = (
            if t.inputs.len() == 1 { "input" } else { "inputs" },
            if t.outputs.len() == 1 { "output" } else { "outputs" },
        );
        writeln!(out, "    {ik} {};", list(&t.inputs)).unwrap();
        writeln!(out, "    {ok} {};", list(&t.outputs)).unwrap();
        if let Some(p) = &t.procedure {
            writeln!(out, "    proc {p};").unwrap();
        }
        for (b, label) in &t.labels {
            writeln!(out, "    label {b} {};", quote(label)).unwrap();
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}
