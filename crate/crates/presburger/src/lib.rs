//! Presburger arithmetic over the integers: linear terms, formulas with
//! divisibility atoms, a textual syntax, and a Cooper-style quantifier
//! elimination procedure that decides closed sentences.
//!
//! Natural-number semantics are not built in. Callers that quantify over
//! naturals conjoin `x >= 0` explicitly.

mod error;
mod formula;
mod parse;
mod qe;
mod term;

use std::collections::BTreeMap;

pub use error::{PresburgerError, Result};
pub use formula::{Atom, Formula};
pub use parse::{parse_formula, parse_term};
pub use qe::{eliminate_quantifiers, QeConfig, DEFAULT_INTERVAL_LIMIT, DEFAULT_MAX_NODES};
pub use term::{Term, Var};

/// Quantifier elimination with the default size budget.
pub fn qe_cooper(f: &Formula) -> Result<Formula> {
    eliminate_quantifiers(f, QeConfig::default())
}

/// Decides a closed sentence.
pub fn decide_sentence(f: &Formula) -> Result<bool> {
    decide_sentence_with(f, QeConfig::default())
}

pub fn decide_sentence_with(f: &Formula, config: QeConfig) -> Result<bool> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(PresburgerError::FreeVariables(free.into_iter().collect()));
    }
    let ground = eliminate_quantifiers(f, config)?;
    ground.eval(&|_| None)
}

/// Evaluates a quantifier-free formula under an assignment.
pub fn eval_assignment(f: &Formula, assignment: &BTreeMap<Var, i128>) -> Result<bool> {
    f.eval(&|v| assignment.get(v).copied())
}
