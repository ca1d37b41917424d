//! Distances between measures and between m2m spaces.

pub mod cross_block;
pub mod d2gp;
pub mod prokhorov;
pub mod two_level;

pub use cross_block::{validate_cross_block, CrossDistanceBlock, CrossViolation};
pub use d2gp::{d2gp_bounds, d2gp_lower_bound, D2gpOptions, DistanceBound};
pub use prokhorov::{prokhorov, prokhorov_feasible, Bipartite, MAX_ENUMERATED_SUPPORT};
pub use two_level::{two_level_prokhorov, two_level_prokhorov_cross};
