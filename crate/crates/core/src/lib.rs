//! Linguistic-complexity control toolkit.
//!
//! * [`lingfeat`] extracts fourteen handcrafted features from text.
//! * [`controls`] checks, standardizes and samples feature targets.
//! * [`dataset`] turns instruction data into control-tagged prompts.
//! * [`modelclient`] queries model endpoints and offline mocks.
//! * [`eval`] scores controllability and builds sweep reports.
//!
//! The numeric core is generic over [`Scalar`]; the aliases below fix the
//! scalar to `f64`, `f32` or the exact `Rational64`.

// `!(a < b)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controls;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod feature;
pub mod lingfeat;
pub mod modelclient;
pub mod rng;
pub mod scalar;

pub use feature::{Feature, FeatureKind, FeatureSpec, FEATURE_COUNT, FKRE_MAX};
pub use scalar::{FloatScalar, Scalar};

pub use num_rational::Rational64;

pub type Features = feature::FeatureVector<f64>;
pub type Features32 = feature::FeatureVector<f32>;
pub type ExactFeatures = feature::FeatureVector<Rational64>;

pub type Stats = controls::StandardizationStats<f64>;
pub type Stats32 = controls::StandardizationStats<f32>;

pub type Controls = controls::ControlVector<f64>;
pub type ExactControls = controls::ControlVector<Rational64>;

pub type Errors = eval::ErrorMatrix<f64>;
