//! Reference engines used to check the restricted recognizer: a dense tabular
//! recognizer for unrestricted TAG and a bounded derivation enumerator. Neither
//! uses the split-tree transformation.

mod baseline;
mod enumerate;

use thiserror::Error;

use crate::grammar::GrammarError;

pub use baseline::{baseline_recognize, Baseline, MAX_LEN};
pub use enumerate::{enumerate_yields, enumerate_yields_with_cap, DEFAULT_FRONTIER_CAP, MAX_ENUM_LEN};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("unknown token `{token}` at position {position}")]
    UnknownToken { token: String, position: usize },
    #[error("input of {0} tokens is too long for the baseline")]
    TooLong(usize),
    #[error("enumeration length {0} exceeds the limit of {MAX_ENUM_LEN}")]
    MaxLen(usize),
    #[error("enumeration visited more than {cap} partial trees")]
    BudgetExceeded { cap: usize },
}
