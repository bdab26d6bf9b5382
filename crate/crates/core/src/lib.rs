//! Exact permutation-pattern analysis: occurrence counting, exhaustive
//! censuses over S_n, closed forms for the 123/132 classes, the swap map
//! between one-123 and one-132 classes, and recurrence guessing.

pub mod bijection;
pub mod census;
pub mod cli;
pub mod count;
pub mod formulas;
pub mod perm;
pub mod recfit;

pub use census::{CensusConfig, CensusTable, ClassConstraint};
pub use formulas::Sequence;
pub use perm::{standardize, Occurrence, Pattern, Permutation};
pub use recfit::PolyRecurrence;
