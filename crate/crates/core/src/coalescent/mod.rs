//! The finite nested Kingman coalescent and the random m2m spaces built
//! from its gene tree.
//!
//! Individuals are addressed as `(species, individual)`, both 0-based.

mod dendrogram;
mod estimate;
mod simulate;

pub use dendrogram::{BlockCount, GeneDendrogram};
pub use estimate::{
    cross_species_cdf, distance_law_check, distance_pairs, erlang2_cdf, estimate_limit_statistic, estimate_q, exp_cdf,
    hypoexponential_cdf, DistanceLawCheck,
};
pub use simulate::{simulate, simulate_sizes, CoalescentParams};
