//! Guided patch synthesis: distribution-seeded initialization, coarse-to-fine
//! PatchMatch under the three-term objective, and patch voting.

pub mod context;
pub mod field;
pub mod params;
pub mod search;
pub mod transfer;
pub mod vote;

pub use context::{
    appearance_cost, distribution_cost, posterior_weights, psycho_cost, total_cost, LevelContext,
    ScaleLayer,
};
pub use field::NNField;
pub use params::{Mode, SynthesisParams};
pub use search::{init_by_distribution, init_by_distribution_exhaustive, patchmatch_step, upsample_field};
pub use transfer::{
    prepare_source, text_distance, transfer, transfer_with, LevelTrace, SourceContext,
    TransferResult, SCALE_SEARCH_SEED,
};
pub use vote::{vote, vote_weighted};
