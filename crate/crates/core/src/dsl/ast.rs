use super::SourceSpan;

/// A value with the span it was parsed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned<T> {
    pub value: T,
    pub span: SourceSpan,
}

impl<T> Spanned<T> {
    pub fn new(value: T, span: SourceSpan) -> Self {
        Self { value, span }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetAst {
    pub name: Spanned<String>,
    pub positions: Vec<PositionDecl>,
    pub transitions: Vec<TransitionDecl>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionKindAst {
    Simple,
    Peripheral,
    Resolution(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionDecl {
    pub id: Spanned<String>,
    pub kind: PositionKindAst,
    /// Span of the `position` keyword.
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectorAst {
    Resolution(Spanned<String>),
    Proc(Spanned<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionDecl {
    pub id: Spanned<String>,
    /// One of `T F J X Y`.
    pub kind: Spanned<char>,
    pub selector: Option<SelectorAst>,
    pub inputs: Vec<Spanned<String>>,
    pub outputs: Vec<Spanned<String>>,
    pub procedure: Option<Spanned<String>>,
    pub labels: Vec<(Spanned<u64>, String)>,
    /// Span of the `transition` keyword.
    pub span: SourceSpan,
}
