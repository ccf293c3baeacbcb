//! Decision procedures, with independently checkable certificates, for the
//! σ-I-small versus I-positive dichotomy on projections of finite-state
//! closed subsets of 𝒩×𝒩.

pub mod cli;
pub mod dichotomy;
pub mod epset;
pub mod error;
pub mod exec;
pub mod ideal;
pub mod ntree;
pub mod pairtree;
pub mod point;
pub mod random;
pub mod snapshot;
pub mod witness;

pub use epset::{ArithClass, EPSet};
pub use error::{Error, Result};
pub use ideal::Ideal;
pub use ntree::{NTree, NTreeBuilder, StateId};
pub use pairtree::{PairRule, PairTree, PairTreeBuilder};
pub use point::EPPoint;
pub use snapshot::{truncate_enumerate, FiniteTreeSnapshot};
pub use dichotomy::{classify, Classification, Method, Verdict};
pub use witness::{CoverScheme, WitnessPairTree};
