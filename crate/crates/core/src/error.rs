use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Functor,
    Predicate,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::Functor => "functor",
            SymbolKind::Predicate => "predicate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("{kind} `{symbol}` used with arity {found} but previously with arity {expected}")]
    ArityMismatch { kind: SymbolKind, symbol: String, expected: usize, found: usize },

    #[error("line {line}, column {column}: {inner}")]
    Located { line: usize, column: usize, inner: Box<Error> },

    #[error("variable X{var} is out of range for arity {arity}")]
    VariableOutOfRange { var: u32, arity: usize },

    #[error("arrow has source arity {source_arity} but {found} was required")]
    ArrowMismatch { source_arity: usize, found: usize },

    #[error("clause {clause} is not variable-free")]
    NotGround { clause: usize },

    #[error("atom `{0}` is not in the universe of the coalgebra")]
    UnknownAtom(String),

    #[error("invalid bound: {0}")]
    InvalidBound(String),

    #[error("malformed tree document: {0}")]
    Json(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Syntax { line, column, message: message.into() }
    }

    pub(crate) fn at(self, line: usize, column: usize) -> Error {
        match self {
            e @ (Error::Syntax { .. } | Error::Located { .. }) => e,
            other => Error::Located { line, column, inner: Box::new(other) },
        }
    }

    /// True for errors raised while reading program or goal text.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Syntax { .. } | Error::ArityMismatch { .. } | Error::Located { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
