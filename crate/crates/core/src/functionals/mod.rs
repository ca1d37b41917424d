//! Test functionals and the real-valued summaries built on them.

pub mod diagnostics;
pub mod distribution;
pub mod eval;
pub mod modulus;
pub mod sampling;
pub mod spec;

pub use diagnostics::{apply_fk, compactness_profile, g_k, is_in_a_n, ProfileRow};
pub use distribution::{distance_distribution, fmt_f64, mass_distribution, DistributionSummary, RealDistribution};
pub use eval::{distance_matrix, eval_tf, eval_tf_on, EvalMode, EXACT_BUDGET};
pub use modulus::{covering_set, modulus_mass_distribution, thin_mass};
pub use sampling::{reconstruct_two_level, sample_two_level, TwoLevelSample};
pub use spec::{builtin_library, ChiSpec, PhiSpec, PolyTerm, PsiSpec, TestFunctionalSpec, TfKind};
