//! Plumbing behind the `sqfree` command: b-file cross-checks, figure data and
//! randomized inequality trials.

pub mod appendix;
pub mod figure;
pub mod oeis;
