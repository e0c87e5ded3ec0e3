//! Attributed tokens.

use std::collections::BTreeMap;
use std::fmt;

/// A scalar attribute value carried by a token.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Real(f64),
    Text(String),
    List(Vec<String>),
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[String]> {
        match self {
            Value::List(l) => Some(l),
            _ => None,
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Value::Real(r) => r.is_finite(),
            _ => true,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => write!(f, "{r:?}"),
            Value::Text(s) => write!(f, "{s:?}"),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item:?}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<Vec<String>> for Value {
    fn from(v: Vec<String>) -> Self {
        Value::List(v)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AttrError {
    #[error("attribute name must be nonempty")]
    EmptyName,
    #[error("attribute `{0}` has a non-finite value")]
    NonFinite(String),
}

/// A token: an attribute environment keyed by name.
///
/// Attributes iterate in name order, so rendering a token is deterministic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Token {
    attrs: BTreeMap<String, Value>,
}

impl Token {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style setter that panics on an invalid attribute; meant for literals.
    pub fn with(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.set(name, value).expect("invalid token attribute");
        self
    }

    pub fn set(&mut self, name: &str, value: impl Into<Value>) -> Result<(), AttrError> {
        if name.is_empty() {
            return Err(AttrError::EmptyName);
        }
        let value = value.into();
        if !value.is_finite() {
            return Err(AttrError::NonFinite(name.to_owned()));
        }
        self.attrs.insert(name.to_owned(), value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.attrs.get(name)
    }

    pub fn remove(&mut self, name: &str) -> Option<Value> {
        self.attrs.remove(name)
    }

    pub fn attrs(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.attrs.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    /// Left-biased union: keys already present in `self` win.
    pub fn merged_with(&self, other: &Token) -> Token {
        let mut out = self.clone();
        for (k, v) in &other.attrs {
            out.attrs.entry(k.clone()).or_insert_with(|| v.clone());
        }
        out
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.attrs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}
