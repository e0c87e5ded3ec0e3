use std::collections::HashMap;

use super::ast::{NetAst, PositionKindAst, SelectorAst};
use super::{has_errors, Diagnostic, SourceSpan};
use crate::net::{
    validate_net, Element, Net, Position, PositionKind, Selector, StructuralError, Transition,
    TransitionKind,
};
use crate::procedure::ProcedureRegistry;

/// Resolves names and checks structure. A net is produced exactly when
/// [`validate_net`] has nothing to report; every problem becomes a diagnostic
/// pointing at the offending declaration.
pub fn lower(ast: &NetAst, procedures: &ProcedureRegistry) -> (Option<Net>, Vec<Diagnostic>) {
    let mut diags = Vec::new();

    let mut position_spans: HashMap<&str, SourceSpan> = HashMap::new();
    let mut positions = Vec::new();
    for p in &ast.positions {
        if position_spans.contains_key(p.id.value.as_str()) {
            diags.push(Diagnostic::error(
                "DuplicateId",
                format!("position `{}` is declared more than once", p.id.value),
                p.id.span,
            ));
            continue;
        }
        position_spans.insert(&p.id.value, p.id.span);
        let kind = match p.kind {
            PositionKindAst::Simple => PositionKind::Simple,
            PositionKindAst::Peripheral => PositionKind::Peripheral,
            PositionKindAst::Resolution(n) => PositionKind::Resolution {
                branches: n as usize,
            },
        };
        positions.push(Position {
            id: p.id.value.as_str().into(),
            kind,
        });
    }

    let mut transition_decls = HashMap::new();
    let mut transitions = Vec::new();
    for t in &ast.transitions {
        if transition_decls.contains_key(t.id.value.as_str()) {
            diags.push(Diagnostic::error(
                "DuplicateId",
                format!("transition `{}` is declared more than once", t.id.value),
                t.id.span,
            ));
            continue;
        }
        transition_decls.insert(t.id.value.as_str(), t);
        let kind = match t.kind.value {
            'T' => TransitionKind::T,
            'F' => TransitionKind::F,
            'J' => TransitionKind::J,
            'X' => TransitionKind::X {
                branches: t.outputs.len(),
            },
            _ => TransitionKind::Y {
                branches: t.inputs.len(),
            },
        };
        let mut tr = Transition::new(t.id.value.as_str(), kind)
            .inputs(t.inputs.iter().map(|s| s.value.as_str()))
            .outputs(t.outputs.iter().map(|s| s.value.as_str()));
        tr.selector = t.selector.as_ref().map(|s| match s {
            SelectorAst::Resolution(r) => Selector::Resolution(r.value.as_str().into()),
            SelectorAst::Proc(p) => Selector::Proc(p.value.clone()),
        });
        tr.procedure = t.procedure.as_ref().map(|p| p.value.clone());
        for (b, text) in &t.labels {
            tr.labels.insert(b.value as usize, text.clone());
        }
        transitions.push(tr);
    }

    let net = Net::from_parts(ast.name.value.clone(), positions, transitions, procedures.clone());

    for err in validate_net(&net) {
        let span = error_span(&err, &position_spans, &transition_decls).unwrap_or(ast.name.span);
        diags.push(Diagnostic::error(err.code(), err.to_string(), span));
    }

    diags.sort_by_key(|d| d.span);
    if has_errors(&diags) {
        (None, diags)
    } else {
        (Some(net), diags)
    }
}

fn error_span(
    err: &StructuralError,
    positions: &HashMap<&str, SourceSpan>,
    transitions: &HashMap<&str, &super::ast::TransitionDecl>,
) -> Option<SourceSpan> {
    match err.element() {
        Element::Net => None,
        Element::Position(p) => positions.get(p.as_str()).copied(),
        Element::Transition(t) => {
            let decl = transitions.get(t.as_str())?;
            let refs = || decl.inputs.iter().chain(&decl.outputs);
            let precise = match err {
                StructuralError::DanglingRef { position, .. }
                | StructuralError::ResolutionArc { position, .. }
                | StructuralError::DuplicateInput { position, .. } => refs()
                    .rfind(|s| s.value == position.as_str())
                    .map(|s| s.span)
                    .or_else(|| selector_span(decl)),
                StructuralError::SelectorNotResolution { .. }
                | StructuralError::BranchCountMismatch { .. }
                | StructuralError::UnexpectedSelector(_) => selector_span(decl),
                StructuralError::UnknownProcedure { name, .. } => decl
                    .procedure
                    .iter()
                    .filter(|p| &p.value == name)
                    .map(|p| p.span)
                    .next()
                    .or_else(|| selector_span(decl)),
                StructuralError::ArityMismatch { .. } | StructuralError::TooFewBranches { .. } => {
                    Some(decl.kind.span)
                }
                StructuralError::LabelOutOfRange { branch, .. } => decl
                    .labels
                    .iter()
                    .find(|(b, _)| b.value as usize == *branch)
                    .map(|(b, _)| b.span),
                _ => None,
            };
            precise.or(Some(decl.id.span))
        }
    }
}

fn selector_span(decl: &super::ast::TransitionDecl) -> Option<SourceSpan> {
    decl.selector.as_ref().map(|s| match s {
        SelectorAst::Resolution(r) => r.span,
        SelectorAst::Proc(p) => p.span,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn lower_src(src: &str) -> (Option<Net>, Vec<Diagnostic>) {
        let (ast, d) = parse(src);
        assert!(d.is_empty(), "{d:?}");
        lower(&ast.unwrap(), &ProcedureRegistry::with_builtins())
    }

    #[test]
    fn unknown_procedure() {
        let (net, diags) =
            lower_src("net N { position p; position q; transition t kind T { input p; output q; proc Foo; } }");
        assert!(net.is_none());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "UnknownProcedure");
        assert_eq!(diags[0].span.column, 79);
    }

    #[test]
    fn x_with_three_way_resolution() {
        let (net, diags) = lower_src(
            "net N { position b1; position b2; position b3; position b4; position br1 resolution(3);
             transition t kind X { selector resolution br1; input b1; outputs b2, b3, b4; } }",
        );
        assert!(diags.is_empty(), "{diags:?}");
        let net = net.unwrap();
        assert_eq!(
            net.transition("t").unwrap().kind,
            TransitionKind::X { branches: 3 }
        );
    }

    #[test]
    fn duplicate_position() {
        let (net, diags) = lower_src("net N { position p;\n position p; }");
        assert!(net.is_none());
        assert_eq!(diags[0].code, "DuplicateId");
        assert_eq!(diags[0].span, SourceSpan::new(2, 11, 1));
    }

    #[test]
    fn dangling_reference_points_at_use() {
        let (_, diags) = lower_src("net N { position p;\ntransition t kind T { input p; output bX; } }");
        assert_eq!(diags[0].code, "DanglingRef");
        assert_eq!(diags[0].span, SourceSpan::new(2, 39, 2));
    }

    #[test]
    fn arity_mismatch_points_at_kind() {
        let (_, diags) = lower_src(
            "net N { position p; position q; position r; transition t kind T { input p; outputs q, r; } }",
        );
        assert_eq!(diags[0].code, "ArityMismatch");
        assert_eq!(diags[0].span.column, 63);
    }
}
