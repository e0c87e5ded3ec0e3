//! The `.enet` definition language.
//!
//! ```text
//! net := "net" IDENT "{" decl* "}"
//! decl := "position" IDENT ("peripheral" | "resolution" "(" INT ")")? ";"
//!       | "transition" IDENT "kind" ("T"|"F"|"J"|"X"|"Y") "{" body "}"
//! body := ("selector" ("resolution" IDENT | "proc" IDENT) ";")?
//!         ("input"|"inputs") identList ";" ("output"|"outputs") identList ";"
//!         ("proc" IDENT ";")? ("label" INT STRING ";")*
//! ```
//!
//! Identifier lists are comma separated. `#` starts a comment that runs to the end
//! of the line. X takes its branch count from its outputs, Y from its inputs.

mod ast;
mod format;
mod lexer;
mod lower;
mod parser;

use std::fmt;

pub use ast::{NetAst, PositionDecl, PositionKindAst, SelectorAst, Spanned, TransitionDecl};
pub use format::format;
pub use lexer::{is_identifier, tokenize, Keyword, LexToken, TokenKind};
pub use lower::lower;
pub use parser::parse;

use crate::net::Net;
use crate::procedure::ProcedureRegistry;

/// 1-based line and column, length in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, length: usize) -> Self {
        Self {
            line,
            column,
            length,
        }
    }

    /// Zero-length span just past the last character of `source`.
    pub fn end_of(source: &str) -> Self {
        let mut line = 1;
        let mut column = 1;
        for c in source.chars() {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        Self::new(line, column, 0)
    }

    /// Whether the span lies inside `source` (the end-of-input position counts).
    pub fn within(&self, source: &str) -> bool {
        if self.line == 0 || self.column == 0 {
            return false;
        }
        let Some(text) = source.split('\n').nth(self.line - 1) else {
            return false;
        };
        self.column - 1 + self.length <= text.chars().count()
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn error(code: impl Into<String>, message: impl Into<String>, span: SourceSpan) -> Self {
        Self {
            severity: Severity::Error,
            code: code.into(),
            message: message.into(),
            span,
        }
    }

    pub fn warning(code: impl Into<String>, message: impl Into<String>, span: SourceSpan) -> Self {
        Self {
            severity: Severity::Warning,
            code: code.into(),
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `error[CODE] file:line:col message`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{}[{}] {}:{} {}",
            self.severity, self.code, file, self.span, self.message
        )
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

/// Parses and lowers in one go.
pub fn load(source: &str, procedures: &ProcedureRegistry) -> (Option<Net>, Vec<Diagnostic>) {
    let (ast, mut diags) = parse(source);
    let Some(ast) = ast else {
        return (None, diags);
    };
    let (net, lower_diags) = lower(&ast, procedures);
    diags.extend(lower_diags);
    (net, diags)
}
