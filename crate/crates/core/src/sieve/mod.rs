//! Prime tables, `k`-free sieving and counting, and residue-class arithmetic.
//!
//! Every routine that decides `k`-freeness takes a [`PrimeTable`] and refuses
//! (with [`SieveError::Coverage`]) to answer for integers whose prime `k`-th
//! power divisors could lie beyond the table.

pub mod arith;
mod primes;
mod residue;
mod window;

use thiserror::Error;

pub use primes::{PrimeTable, DEFAULT_PRIME_LIMIT_BUDGET};
pub use residue::{count_class_in_interval, crt_combine, ResidueClass};
pub use window::{
    count_power_free_upto, density_main_term, is_power_free, kfree_window, zeta, KFreeWindow,
    SEGMENT_LEN,
};

pub(crate) use primes::check_power;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SieveError {
    #[error("prime table limit {requested} exceeds the budget of {budget}")]
    Resource { requested: u64, budget: u64 },
    #[error("prime table up to {limit} is too small; primes up to {needed} are required")]
    Coverage { limit: u64, needed: u64 },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),
}
