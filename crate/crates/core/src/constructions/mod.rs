//! The explicit sequence constructions and witness searches.

mod dense_q;
mod greedy;
mod overp;
mod property_p;
mod sampler;
mod suff;

pub use dense_q::{
    dense_q_step, DenseQConfig, DenseQState, DenseQStep, GridPoint, DEFAULT_GRID_CAP,
    DEFAULT_SLICE_CAP,
};
pub use greedy::{greedy_squarefree_sums, GreedySums, Rejection};
pub use overp::{
    max_offset, overp_base_point, overp_sequence, OverPCertification, OverPConfig, OverPPoint,
    OverPSequence, OverPSequenceConfig, ThresholdSchedule, DEFAULT_W_BITS_BUDGET, MAX_THRESHOLD,
};
pub use property_p::{
    property_p_sequence, GrowthFn, PropertyPConfig, PropertyPSequence, DEFAULT_SCAN_BUDGET,
};
pub use sampler::{
    expected_sample_size, inclusion_probability, occupancy_probe, sample_counterexample,
    Occupancy, SamplerConfig,
};
pub use suff::{
    candidate_interval, suff_witness_search, suff_witness_search_with, CandidateOrder,
    IntervalMode, SuffConfig,
};
