use thiserror::Error;

/// Errors surfaced by enumeration-backed operations and model builders.
///
/// False domains are never errors; they are ordinary values. Errors mark
/// situations where an operation refuses to run (caps, bad parameters,
/// malformed requests), so callers can fall back to another strategy.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("enumeration cap exceeded ({needed} > {cap})")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("unsupported constraint form: {0}")]
    Unsupported(String),
    #[error("atom outside the channel universe: {0}")]
    AtomOutOfUniverse(String),
    #[error("channel is restrictive on the enumerated side")]
    RestrictiveChannel,
    #[error("no search variables configured")]
    NoSearchVars,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("not a pseudo atom: {0}")]
    NotPseudo(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
