//! Textual model language (`.uq` files).
//!
//! ```text
//! input u1 ~ Normal(0, 1)
//! input u2 ~ Normal(0, 1)
//! output f = cos(u1) + exp(-u2)
//! ```
//!
//! Expressions are lowered to elementary operations left to right, depth
//! first. Literals become constant nodes; nothing is folded.

mod builtin;
mod lexer;
mod lower;
mod parser;
mod printer;

use thiserror::Error;

pub use crate::distribution::Distribution;
pub use builtin::{builtin_model, builtin_source, BUILTIN_NAMES};
pub use lower::parse_model;
pub use printer::pretty_print;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DslError {
    #[error("parse error at {line}:{col}: expected {}, found {found}", expected.join(" or "))]
    Parse {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("undefined name `{name}` at {line}:{col}")]
    UndefinedName { name: String, line: usize, col: usize },
    #[error("duplicate name `{name}` at {line}:{col}")]
    DuplicateName { name: String, line: usize, col: usize },
    #[error("invalid distribution at {line}:{col}: {reason}")]
    InvalidDistribution {
        line: usize,
        col: usize,
        reason: String,
    },
    #[error("unknown model `{0}` (builtins: simple, piston, multipoint)")]
    UnknownModel(String),
}
