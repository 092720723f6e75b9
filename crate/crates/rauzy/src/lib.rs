//! Rauzy-type dynamics on irreducible permutations.
//!
//! The crate implements the matrix-diagram model of interval-exchange
//! combinatorics: permutations as arc diagrams, the cycle/rank/sign
//! invariants that classify the dynamics' orbits, a consistent labelling of
//! the arcs, the extended (Rauzy), sliding, and pivotless operator families,
//! exhaustive class enumeration at small sizes, and explicit path
//! construction between connected permutations with alternation-length
//! accounting.

pub mod classes;
pub mod dynamics;
pub mod error;
pub mod invariants;
pub mod labelling;
pub mod pathfinder;
pub mod perm;
pub mod search_clock;
pub mod word;

pub use error::{Error, Result};
pub use perm::{ArcRef, Colored, Perm, Side};
