//! Control-vector algebra: validity rules, standardization, rejection
//! sampling of target vectors and random control subsets.

mod sampler;
mod stats;
mod subset;
mod validity;

pub use sampler::{perturb_raw, sample_control_vector, standardized_l1, DEFAULT_MAX_ATTEMPTS};
pub use stats::{FeatureStats, StandardizationStats};
pub use subset::{project, sample_subset, ControlSubset, ControlVector};
pub use validity::{is_valid, validate, validate_named, Rule, ValidityReport};
