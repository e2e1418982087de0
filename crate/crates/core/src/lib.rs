//! Computational companion for sequences whose translates meet the `k`-free integers
//! in prescribed ways.

mod bitset;
pub mod admissible_max;
pub mod constructions;
pub mod error;
pub mod large_sieve;
pub mod properties;
pub mod sieve;

pub use error::{Error, Result};
