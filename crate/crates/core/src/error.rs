use thiserror::Error;

use crate::domain::Calculus;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]: lower endpoint must be strictly below upper")]
    DegenerateInterval { lo: String, hi: String },
    #[error("invalid directed interval: start and end coincide at {0}")]
    DegenerateDirected(String),
    #[error("block dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("calculus mismatch: {left} vs {right}")]
    CalculusMismatch { left: Calculus, right: Calculus },
    #[error("no endpoint definition registered for basic code `{0}`")]
    DefinitionMissing(String),
    #[error("unknown basic code `{code}` for {calculus}")]
    UnknownCode { calculus: Calculus, code: String },
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("arity {arity} exceeds the enumeration cap of {cap}")]
    CapExceeded { arity: usize, cap: usize },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("missing relation formula for `{symbol}` in interpretation `{interpretation}`")]
    MissingFormula { interpretation: String, symbol: String },
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("clause is not ORD-Horn: {0}")]
    NotOrdHorn(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("strategy `{0}` is not applicable to this instance")]
    Inapplicable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
