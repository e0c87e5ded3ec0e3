use super::ast::{NetAst, PositionDecl, PositionKindAst, SelectorAst, Spanned, TransitionDecl};
use super::lexer::{tokenize, Keyword, LexToken, TokenKind};
use super::{has_errors, Diagnostic, SourceSpan};

struct Parser {
    tokens: Vec<LexToken>,
    pos: usize,
    eof: SourceSpan,
    diags: Vec<Diagnostic>,
}

type Res<T> = Result<T, ()>;

fn describe(t: Option<&LexToken>) -> String {
    match t {
        None => "end of input".into(),
        Some(t) => match &t.kind {
            TokenKind::Keyword(k) => format!("`{}`", k.as_str()),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Int(i) => format!("integer {i}"),
            TokenKind::Str(s) => format!("string {s:?}"),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Semi => "`;`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Error(m) => m.clone(),
        },
    }
}

impl Parser {
    fn peek(&self) -> Option<&LexToken> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.peek_kind() == Some(&TokenKind::Keyword(kw))
    }

    fn bump(&mut self) -> Option<LexToken> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> SourceSpan {
        self.peek().map_or(self.eof, |t| t.span)
    }

    fn error_here(&mut self, expected: &str) {
        let found = self.peek();
        let code = if found.is_none() {
            "UnexpectedEof"
        } else {
            "UnexpectedToken"
        };
        let msg = format!("expected {expected}, found {}", describe(found));
        let span = self.here();
        self.diags.push(Diagnostic::error(code, msg, span));
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Res<SourceSpan> {
        if self.peek_kind() == Some(&kind) {
            Ok(self.bump().unwrap().span)
        } else {
            self.error_here(what);
            Err(())
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> Res<SourceSpan> {
        self.expect(TokenKind::Keyword(kw), &format!("`{}`", kw.as_str()))
    }

    fn ident(&mut self, what: &str) -> Res<Spanned<String>> {
        if let Some(TokenKind::Ident(s)) = self.peek_kind() {
            let s = s.clone();
            let span = self.bump().unwrap().span;
            Ok(Spanned::new(s, span))
        } else {
            self.error_here(what);
            Err(())
        }
    }

    fn ident_list(&mut self) -> Res<Vec<Spanned<String>>> {
        let mut out = vec![self.ident("a position name")?];
        while self.peek_kind() == Some(&TokenKind::Comma) {
            self.bump();
            out.push(self.ident("a position name")?);
        }
        Ok(out)
    }

    /// Skips to just past the next `;`, or up to a `}`, declaration keyword, or the end.
    fn sync(&mut self, stop_at_decl: bool) {
        while let Some(k) = self.peek_kind() {
            match k {
                TokenKind::Semi => {
                    self.bump();
                    return;
                }
                TokenKind::RBrace => return,
                TokenKind::Keyword(Keyword::Position | Keyword::Transition) if stop_at_decl => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn net(&mut self) -> Option<NetAst> {
        let start = self.here();
        self.expect_kw(Keyword::Net).ok()?;
        let name = self.ident("a net name").ok()?;
        self.expect(TokenKind::LBrace, "`{`").ok()?;

        let mut positions = Vec::new();
        let mut transitions = Vec::new();
        loop {
            match self.peek_kind() {
                None => {
                    self.error_here("`}` to close the net");
                    break;
                }
                Some(TokenKind::RBrace) => {
                    self.bump();
                    break;
                }
                Some(TokenKind::Keyword(Keyword::Position)) => match self.position() {
                    Ok(p) => positions.push(p),
                    Err(()) => self.sync(true),
                },
                Some(TokenKind::Keyword(Keyword::Transition)) => match self.transition() {
                    Ok(t) => transitions.push(t),
                    Err(()) => {
                        self.sync(true);
                        // A failed transition may leave its body's closing brace behind.
                        if self.peek_kind() == Some(&TokenKind::RBrace)
                            && matches!(
                                self.tokens.get(self.pos + 1).map(|t| &t.kind),
                                Some(TokenKind::Keyword(Keyword::Position | Keyword::Transition))
                                    | Some(TokenKind::RBrace)
                            )
                        {
                            self.bump();
                        }
                    }
                },
                Some(_) => {
                    self.error_here("`position`, `transition` or `}`");
                    self.bump();
                    self.sync(true);
                }
            }
        }

        if let Some(t) = self.peek() {
            let span = t.span;
            self.diags.push(Diagnostic::error(
                "TrailingInput",
                format!("unexpected {} after the net", describe(Some(t))),
                span,
            ));
        }

        Some(NetAst {
            name,
            positions,
            transitions,
            span: start,
        })
    }

    fn position(&mut self) -> Res<PositionDecl> {
        let span = self.expect_kw(Keyword::Position)?;
        let id = self.ident("a position name")?;
        let kind = if self.at_kw(Keyword::Peripheral) {
            self.bump();
            PositionKindAst::Peripheral
        } else if self.at_kw(Keyword::Resolution) {
            self.bump();
            self.expect(TokenKind::LParen, "`(`")?;
            let n = match self.peek_kind() {
                Some(TokenKind::Int(n)) => {
                    let n = *n;
                    self.bump();
                    n
                }
                _ => {
                    self.error_here("a branch count");
                    return Err(());
                }
            };
            self.expect(TokenKind::RParen, "`)`")?;
            PositionKindAst::Resolution(n)
        } else {
            PositionKindAst::Simple
        };
        self.expect(TokenKind::Semi, "`;`")?;
        Ok(PositionDecl { id, kind, span })
    }

    fn duplicate(&mut self, clause: &str, span: SourceSpan) {
        self.diags.push(Diagnostic::error(
            "DuplicateClause",
            format!("`{clause}` given more than once"),
            span,
        ));
    }

    fn transition(&mut self) -> Res<TransitionDecl> {
        let span = self.expect_kw(Keyword::Transition)?;
        let id = self.ident("a transition name")?;
        self.expect_kw(Keyword::Kind)?;
        let kind = match self.peek_kind() {
            Some(TokenKind::Ident(k)) if matches!(k.as_str(), "T" | "F" | "J" | "X" | "Y") => {
                let c = k.chars().next().unwrap();
                Spanned::new(c, self.bump().unwrap().span)
            }
            _ => {
                let found = describe(self.peek());
                let span = self.here();
                self.diags.push(Diagnostic::error(
                    "UnknownKind",
                    format!("expected a transition kind (T, F, J, X or Y), found {found}"),
                    span,
                ));
                return Err(());
            }
        };
        self.expect(TokenKind::LBrace, "`{`")?;

        let mut decl = TransitionDecl {
            id,
            kind,
            selector: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            procedure: None,
            labels: Vec::new(),
            span,
        };
        let mut seen_inputs = false;
        let mut seen_outputs = false;
        let mut failed = false;

        loop {
            let clause_span = self.here();
            let res = match self.peek_kind() {
                None => {
                    self.error_here("`}` to close the transition body");
                    return Err(());
                }
                Some(TokenKind::RBrace) => {
                    self.bump();
                    break;
                }
                Some(TokenKind::Keyword(Keyword::Selector)) => {
                    self.bump();
                    let sel = if self.at_kw(Keyword::Resolution) {
                        self.bump();
                        self.ident("a resolution position").map(SelectorAst::Resolution)
                    } else if self.at_kw(Keyword::Proc) {
                        self.bump();
                        self.ident("a procedure name").map(SelectorAst::Proc)
                    } else {
                        self.error_here("`resolution` or `proc`");
                        Err(())
                    };
                    sel.and_then(|s| {
                        self.expect(TokenKind::Semi, "`;`")?;
                        if decl.selector.is_some() {
                            self.duplicate("selector", clause_span);
                        }
                        decl.selector = Some(s);
                        Ok(())
                    })
                }
                Some(TokenKind::Keyword(Keyword::Input | Keyword::Inputs)) => {
                    self.bump();
                    self.ident_list().and_then(|l| {
                        self.expect(TokenKind::Semi, "`;`")?;
                        if seen_inputs {
                            self.duplicate("inputs", clause_span);
                        }
                        seen_inputs = true;
                        decl.inputs = l;
                        Ok(())
                    })
                }
                Some(TokenKind::Keyword(Keyword::Output | Keyword::Outputs)) => {
                    self.bump();
                    self.ident_list().and_then(|l| {
                        self.expect(TokenKind::Semi, "`;`")?;
                        if seen_outputs {
                            self.duplicate("outputs", clause_span);
                        }
                        seen_outputs = true;
                        decl.outputs = l;
                        Ok(())
                    })
                }
                Some(TokenKind::Keyword(Keyword::Proc)) => {
                    self.bump();
                    self.ident("a procedure name").and_then(|p| {
                        self.expect(TokenKind::Semi, "`;`")?;
                        if decl.procedure.is_some() {
                            self.duplicate("proc", clause_span);
                        }
                        decl.procedure = Some(p);
                        Ok(())
                    })
                }
                Some(TokenKind::Keyword(Keyword::Label)) => {
                    self.bump();
                    let branch = match self.peek_kind() {
                        Some(TokenKind::Int(n)) => {
                            let n = *n;
                            Ok(Spanned::new(n, self.bump().unwrap().span))
                        }
                        _ => {
                            self.error_here("a branch index");
                            Err(())
                        }
                    };
                    branch.and_then(|b| {
                        let text = match self.peek_kind() {
                            Some(TokenKind::Str(s)) => {
                                let s = s.clone();
                                self.bump();
                                s
                            }
                            _ => {
                                self.error_here("a label string");
                                return Err(());
                            }
                        };
                        self.expect(TokenKind::Semi, "`;`")?;
                        if decl.labels.iter().any(|(x, _)| x.value == b.value) {
                            self.duplicate(&format!("label {}", b.value), clause_span);
                        }
                        decl.labels.push((b, text));
                        Ok(())
                    })
                }
                Some(TokenKind::Keyword(Keyword::Attr)) => {
                    self.diags.push(Diagnostic::error(
                        "Unsupported",
                        "`attr` clauses are reserved and not supported",
                        clause_span,
                    ));
                    Err(())
                }
                Some(_) => {
                    self.error_here("a transition clause or `}`");
                    Err(())
                }
            };
            if res.is_err() {
                failed = true;
                self.sync(false);
            }
        }

        for (seen, what) in [(seen_inputs, "input"), (seen_outputs, "output")] {
            if !seen && !failed {
                self.diags.push(Diagnostic::error(
                    "MissingClause",
                    format!("transition `{}` has no `{what}` clause", decl.id.value),
                    decl.id.span,
                ));
            }
        }
        Ok(decl)
    }
}

/// Parses `.enet` source. The AST is returned only when there are no errors;
/// the parser recovers at `;` and declaration boundaries to report as many
/// problems as it can.
pub fn parse(source: &str) -> (Option<NetAst>, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let tokens: Vec<LexToken> = tokenize(source)
        .into_iter()
        .filter(|t| match &t.kind {
            TokenKind::Error(msg) => {
                diags.push(Diagnostic::error("InvalidToken", msg.clone(), t.span));
                false
            }
            _ => true,
        })
        .collect();
    let mut p = Parser {
        tokens,
        pos: 0,
        eof: SourceSpan::end_of(source),
        diags,
    };
    let ast = p.net();
    let mut diags = p.diags;
    diags.sort_by_key(|d| d.span);
    if has_errors(&diags) {
        (None, diags)
    } else {
        (ast, diags)
    }
}
