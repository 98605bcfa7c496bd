use thiserror::Error;

use crate::term::Var;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresburgerError {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("formula size budget exceeded ({size} nodes > {limit})")]
    BudgetExceeded { size: usize, limit: usize },
    #[error("integer overflow during quantifier elimination")]
    Overflow,
    #[error("sentence has free variables: {}", .0.join(", "))]
    FreeVariables(Vec<Var>),
    #[error("no value assigned to variable `{0}`")]
    MissingVariable(Var),
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
}

pub type Result<T> = std::result::Result<T, PresburgerError>;
