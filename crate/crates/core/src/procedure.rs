//! Transition procedures and their registry.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::token::Token;

/// What a procedure sees when a transition fires (or when a selector is evaluated).
#[derive(Debug, Clone, Copy)]
pub struct ProcCall<'a> {
    /// Transition being fired.
    pub transition: &'a str,
    /// Tokens taken from the input positions, in declared input order.
    /// For a Y transition only the selected input's token is passed.
    pub tokens: &'a [Token],
}

impl<'a> ProcCall<'a> {
    /// The first input token, or an empty token when there is none.
    pub fn token(&self) -> Token {
        self.tokens.first().cloned().unwrap_or_default()
    }

    /// Left-biased union of all input tokens.
    pub fn merged(&self) -> Token {
        self.tokens
            .iter()
            .fold(Token::new(), |acc, t| acc.merged_with(t))
    }
}

/// Result of a procedure: the output token's attributes and an optional selector value.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcOutput {
    pub token: Token,
    pub selector: Option<usize>,
}

impl ProcOutput {
    pub fn token(token: Token) -> Self {
        Self {
            token,
            selector: None,
        }
    }

    pub fn with_selector(token: Token, selector: usize) -> Self {
        Self {
            token,
            selector: Some(selector),
        }
    }
}

type ProcFn = dyn Fn(&ProcCall<'_>) -> ProcOutput + Send + Sync;

/// A named, deterministic attribute transformer.
#[derive(Clone)]
pub struct Procedure {
    name: String,
    effect: Arc<ProcFn>,
}

impl Procedure {
    pub fn new<F>(name: impl Into<String>, effect: F) -> Self
    where
        F: Fn(&ProcCall<'_>) -> ProcOutput + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            effect: Arc::new(effect),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn call(&self, call: &ProcCall<'_>) -> ProcOutput {
        (self.effect)(call)
    }
}

impl fmt::Debug for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Procedure").field(&self.name).finish()
    }
}

/// Name → procedure map. Cloning is cheap; the closures are shared.
#[derive(Debug, Clone, Default)]
pub struct ProcedureRegistry {
    procs: BTreeMap<String, Procedure>,
}

impl ProcedureRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding the generic procedures every net may use: `identity` and `merge`.
    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        r.register(Procedure::new("identity", |c| ProcOutput::token(c.token())));
        r.register(Procedure::new("merge", |c| ProcOutput::token(c.merged())));
        r
    }

    pub fn register(&mut self, proc: Procedure) -> Option<Procedure> {
        self.procs.insert(proc.name.clone(), proc)
    }

    pub fn get(&self, name: &str) -> Option<&Procedure> {
        self.procs.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.procs.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.procs.keys().map(String::as_str)
    }

    /// Adds every procedure of `other`, replacing same-named entries.
    pub fn extend(&mut self, other: &ProcedureRegistry) {
        for p in other.procs.values() {
            self.register(p.clone());
        }
    }
}
