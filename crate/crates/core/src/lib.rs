//! Extensive-form correlation for two-player games.
//!
//! The crate covers the full pipeline from a game tree to optimization over
//! the von Stengel-Forges polytope of correlation plans:
//!
//! - [`game`]: perfect-recall game trees, sequences, connectedness, ranks
//!   and reduced-normal-form plans.
//! - [`io`]: the line-oriented game file format, the three small example
//!   games, limited-information Goofspiel and random public-chance games.
//! - [`polytope`]: the relevance index, the mass-conservation constraint
//!   system, membership checks, payoff objectives and LP export.
//! - [`decomposition`]: triangle-freeness and the scaled-extension
//!   decomposition of the polytope, with evaluation and vertex enumeration.
//! - [`oracle`]: brute-force correlation plans of deterministic plan pairs,
//!   used to cross-check the decomposition.
//! - [`optimizer`]: regret minimization of a linear objective along the
//!   decomposition.

pub mod decomposition;
pub mod game;
pub mod io;
pub mod optimizer;
pub mod oracle;
pub mod polytope;

pub use decomposition::{decompose, is_triangle_free, ScaledExtensionProgram, TriangleWitness};
pub use game::{GameTree, InfosetId, Player, SequenceId};
pub use polytope::{CorrelationPlan, LinearObjective, RelevanceIndex, VsfConstraintSystem};
