//! Ordinal notation workbench for the structure R2 = (Ord; ≤, ≤1, ≤2).

pub mod chain;
pub mod closed;
pub mod components;
pub mod error;
pub mod fine;
pub mod notation;
pub mod ord;
pub mod query;
pub mod r1;
pub mod syntax;
pub mod ts;
pub mod verify;

pub use error::{ChainError, OpError, ParseError, SyntaxError, TermError};
pub use ord::{Node, Ordinal, PrincipalClass};
pub use syntax::parse;
