//! Game sources: the text format, built-in examples and generators.

mod builtin;
mod efg;
mod goofspiel;
mod random;

pub use builtin::{builtin, single_terminal, BUILTIN_NAMES};
pub use efg::{parse_efg, serialize_efg, EfgError, FORMAT_VERSION};
pub use goofspiel::{goofspiel, GoofspielParams};
pub use random::{random_public_chance, RandomGameParams};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SourceError {
    #[error("unknown built-in game `{0}` (expected one of EX1, EX2, EX3)")]
    UnknownBuiltin(String),
    #[error("goofspiel needs 2 <= k <= 6 ranks, got {0}")]
    RanksOutOfRange(usize),
}
