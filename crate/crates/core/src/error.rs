//! Error types.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("log of zero")]
    LogOfZero,
    #[error("left subtraction undefined: minuend exceeds subtrahend")]
    NotSubtractable,
    #[error("no left quotient exists")]
    NoLeftQuotient,
    #[error("{0} is not additively principal")]
    NotPrincipal(String),
    #[error("υ-index {0} must be countable")]
    UpsilonIndex(String),
    #[error("relativizer {0} must be 1 or an υ-constant (and 1 above level 0)")]
    Relativizer(String),
    #[error("argument {0} has parameters outside the relativized system")]
    ParameterRange(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// Failure of a fine-structure operator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    /// The operator is explicitly left undefined at this point.
    #[error("{op} is undefined at {arg}")]
    Undefined { op: &'static str, arg: String },
    /// The value exists but lies outside the fragment this crate evaluates.
    #[error("{op} at {arg} is outside the supported fragment")]
    Unsupported { op: &'static str, arg: String },
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },
    #[error(transparent)]
    Term(#[from] TermError),
}

impl OpError {
    pub fn undefined(op: &'static str, arg: impl ToString) -> Self {
        OpError::Undefined {
            op,
            arg: arg.to_string(),
        }
    }

    pub fn unsupported(op: &'static str, arg: impl ToString) -> Self {
        OpError::Unsupported {
            op,
            arg: arg.to_string(),
        }
    }

    pub fn domain(op: &'static str, msg: impl ToString) -> Self {
        OpError::Domain {
            op,
            msg: msg.to_string(),
        }
    }

    pub fn is_unsupported(&self) -> bool {
        matches!(self, OpError::Unsupported { .. })
    }
}

/// Failure of a tracking-chain operation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("condition {cond} violated: {msg}")]
    Condition { cond: u8, msg: String },
    #[error("malformed chain: {0}")]
    Malformed(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

impl From<TermError> for ChainError {
    fn from(e: TermError) -> Self {
        ChainError::Op(OpError::Term(e))
    }
}

impl ChainError {
    pub fn is_unsupported(&self) -> bool {
        matches!(self, ChainError::Op(e) if e.is_unsupported())
    }
}
