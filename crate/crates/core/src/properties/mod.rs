//! Finite checks and certificates for translate properties of integer sets.

mod admissible;
mod named;
mod set;
mod sums;
mod witness;

pub use admissible::{admissibility_certificate, is_admissible, AvoidanceCertificate};
pub use named::NamedSequence;
pub use set::FiniteSet;
pub use sums::{check_squarefree_sums, property_p_evidence, SumsVerdict};
pub use witness::{
    check_q_prefix, find_translate_witness, reverify_full, Certification, Cutoff, QSource,
    QStrategy, TraceEntry, WitnessOutcome, WitnessReport, AUTO_CUTOFF_CAP,
};

pub(crate) use witness::TranslateSieve;
