use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("complex {complex:?}: {msg}")]
    Structure { complex: String, msg: String },

    #[error("map {map:?}: {msg}")]
    Map { map: String, msg: String },

    #[error("cover construction: {0}")]
    Cover(String),

    #[error("graph of complexes {goc:?}: {msg}")]
    Goc { goc: String, msg: String },

    #[error("deck group order exceeds cap {cap} (at least {order} elements)")]
    GroupOrderCap { order: usize, cap: usize },

    #[error("pipeline: {0}")]
    Pipeline(String),

    #[error("certificate: {0}")]
    Certificate(String),

    #[error("{kind} {name:?} not found")]
    NotFound { kind: &'static str, name: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn structure(complex: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Structure { complex: complex.into(), msg: msg.into() }
    }

    pub fn map(map: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Map { map: map.into(), msg: msg.into() }
    }

    pub fn goc(goc: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Goc { goc: goc.into(), msg: msg.into() }
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
