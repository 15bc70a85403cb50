//! Edge profiles, co-influences, per-configuration inequalities and Monte
//! Carlo estimators built on them.

pub mod estimator;
pub mod lemmas;
pub mod profile;

pub use estimator::{
    coinfluence_sum, coinfluence_sum_naive, estimate, simulate_batch, sorted_overlap, uncensored, EstimatorReport, FieldBatch, Quantity,
    ReplicateSample, TimePoint,
};
pub use lemmas::{check_lemma_suite, default_eps, default_gamma, LemmaCheck, LemmaId, Outcome};
pub use profile::{co_influence_term, edge_profile, negative_part_term, EdgeProfile};
