use std::collections::BTreeMap;
use std::fmt;

use crate::net::{Net, PositionId, PositionKind};
use crate::token::Token;

/// Token occupancy plus resolution values.
///
/// At most one token per position; a marked output blocks firing, so safeness
/// holds by construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Marking {
    tokens: BTreeMap<PositionId, Token>,
    resolutions: BTreeMap<PositionId, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MarkingError {
    #[error("position `{0}` does not exist")]
    UnknownPosition(PositionId),
    #[error("resolution position `{0}` cannot hold a token")]
    TokenOnResolution(PositionId),
    #[error("position `{0}` is not a resolution position")]
    NotResolution(PositionId),
    #[error("value {value} is out of range for resolution position `{position}` ({branches} branches)")]
    ResolutionOutOfRange {
        position: PositionId,
        value: usize,
        branches: usize,
    },
}

impl Marking {
    pub fn new() -> Self {
        Self::default()
    }

    /// A fresh empty token on each listed position.
    pub fn with_tokens<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<PositionId>,
    {
        let mut m = Self::new();
        for id in ids {
            m.place(id, Token::new());
        }
        m
    }

    /// Default starting marking for a net: an empty token on every peripheral position.
    pub fn peripheral(net: &Net) -> Self {
        Self::with_tokens(
            net.positions()
                .iter()
                .filter(|p| p.kind == PositionKind::Peripheral)
                .map(|p| p.id.clone()),
        )
    }

    /// Puts a token on `id`, returning any token it replaces.
    pub fn place(&mut self, id: impl Into<PositionId>, token: Token) -> Option<Token> {
        self.tokens.insert(id.into(), token)
    }

    pub fn take(&mut self, id: &str) -> Option<Token> {
        self.tokens.remove(id)
    }

    pub fn token(&self, id: &str) -> Option<&Token> {
        self.tokens.get(id)
    }

    pub fn is_marked(&self, id: &str) -> bool {
        self.tokens.contains_key(id)
    }

    pub fn set_resolution(&mut self, id: impl Into<PositionId>, value: usize) {
        self.resolutions.insert(id.into(), value);
    }

    pub fn clear_resolution(&mut self, id: &str) -> Option<usize> {
        self.resolutions.remove(id)
    }

    pub fn resolution(&self, id: &str) -> Option<usize> {
        self.resolutions.get(id).copied()
    }

    pub fn marked(&self) -> impl Iterator<Item = (&PositionId, &Token)> {
        self.tokens.iter()
    }

    pub fn resolutions(&self) -> impl Iterator<Item = (&PositionId, usize)> {
        self.resolutions.iter().map(|(k, v)| (k, *v))
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    /// Checks the marking against a net's position kinds.
    pub fn check(&self, net: &Net) -> Result<(), MarkingError> {
        for id in self.tokens.keys() {
            match net.position_kind(id.as_str()) {
                None => return Err(MarkingError::UnknownPosition(id.clone())),
                Some(k) if k.is_resolution() => {
                    return Err(MarkingError::TokenOnResolution(id.clone()))
                }
                Some(_) => {}
            }
        }
        for (id, &value) in &self.resolutions {
            match net.position_kind(id.as_str()) {
                None => return Err(MarkingError::UnknownPosition(id.clone())),
                Some(PositionKind::Resolution { branches }) if value >= branches => {
                    return Err(MarkingError::ResolutionOutOfRange {
                        position: id.clone(),
                        value,
                        branches,
                    })
                }
                Some(PositionKind::Resolution { .. }) => {}
                Some(_) => return Err(MarkingError::NotResolution(id.clone())),
            }
        }
        Ok(())
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        let mut first = true;
        for (id, tok) in &self.tokens {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{id}{tok}")?;
        }
        for (id, v) in &self.resolutions {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{id}={v}")?;
        }
        f.write_str("]")
    }
}
