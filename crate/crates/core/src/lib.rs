//! Solver, simulator and verifier for an infinite-horizon crisis-bargaining
//! game in which a rising power decides when to remove a trade barrier.
//!
//! The closed-form layers ([`params`], [`thresholds`], [`classifier`]) are
//! generic over [`Scalar`]; the aliases below fix them to `f64` or to exact
//! rationals. [`engine`] plays the stage game and [`oracle`] re-derives the
//! thresholds from payoff primitives alone.

pub mod classifier;
pub mod engine;
pub mod oracle;
pub mod params;
pub mod scalar;
pub mod thresholds;

pub use num_rational::BigRational;
pub use scalar::Scalar;

pub use classifier::{classify, EquilibriumReport, Margins, RegionGrid, RegionLabel};
pub use params::{BarrierDistribution, DistributionKind, EliminationMode, ModelParams, Violation, Violations};
pub use thresholds::ThresholdSet;

pub type Params = params::ModelParams<f64>;
pub type ExactParams = params::ModelParams<BigRational>;
pub type Thresholds = thresholds::ThresholdSet<f64>;
pub type ExactThresholds = thresholds::ThresholdSet<BigRational>;
pub type Report = classifier::EquilibriumReport<f64>;
pub type ExactReport = classifier::EquilibriumReport<BigRational>;
