use thiserror::Error;

use crate::sieve::SieveError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("set is not admissible: every residue class modulo {modulus} = {prime}^k is occupied")]
    NotAdmissible { prime: u64, modulus: u64 },
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("configuration error: {0}")]
    Config(String),
}
