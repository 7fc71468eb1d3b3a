//! Per-period vocabularies, n-gram tables and the queries over them.

mod ngram;
mod ops;
mod vocabulary;

pub(crate) use ngram::check_order;
pub use ngram::NgramTable;
pub use ops::*;
pub(crate) use vocabulary::count_tokens;
pub use vocabulary::{Level, Vocabulary};
