//! Crate-wide error type.

use crate::instance::{ItemId, ValidationReport};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("instance parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("invalid instance:\n{0}")]
    Validation(ValidationReport),

    #[error("unknown item id {0}")]
    UnknownItem(ItemId),

    #[error("item {0} has no payload entry")]
    MissingPayload(ItemId),

    #[error("item {0} appears more than once in the stream")]
    DuplicateStreamItem(ItemId),

    #[error("base set is not independent (caller contract violation)")]
    NotIndependent,

    #[error("matroid {matroid_index}: no single removal restores independence for item {item} (constraint is not a matroid)")]
    ExchangeStructure { item: ItemId, matroid_index: usize },

    #[error("cannot sample from an empty buffer")]
    EmptyBuffer,

    #[error("buffer entry {0} has a non-positive cached marginal")]
    NonPositiveMarginal(ItemId),

    #[error("forced draw {0} is not in the current candidate set")]
    ForcedDrawMismatch(ItemId),

    #[error("forced draw sequence exhausted before the run finished")]
    ForcedDrawsExhausted,

    #[error("deletion set has {got} items, budget is {budget}")]
    DeletionBudgetExceeded { got: usize, budget: usize },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("ground set of size {n} exceeds the exhaustive-search guard ({limit})")]
    GuardExceeded { n: usize, limit: usize },

    #[error("unsupported generator kind `{0}`")]
    UnsupportedGenerator(String),

    #[error("generator size {n} exceeds the configured maximum ({max})")]
    GeneratorSize { n: usize, max: usize },

    #[error("coreset has {size} items, exceeding the bound {bound}")]
    CoresetSize { size: usize, bound: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
