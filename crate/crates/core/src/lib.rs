//! Design and pilot-testing toolkit for formative measurement models.
//!
//! A measurement spec declares constructs, their items and citations. SME
//! judgments give content validity ratios and theoretical weights, pilot
//! responses feed descriptives, collinearity and reliability diagnostics, and
//! a per-construct gate decides whether an iteration is ready for the main
//! study. Numeric code is generic over [`scalar::Value`] / [`scalar::Real`].

pub mod composites;
pub mod config;
pub mod content_validity;
pub mod diagnostics;
pub mod error;
pub mod finding;
pub mod ingest;
pub mod scalar;
pub mod spec;
pub mod synthgen;
pub mod workflow;

mod linalg;
mod stats;

pub use config::Config;
pub use error::{Error, Result};
pub use finding::{Finding, ReasonCode, Severity};
pub use spec::MeasurementSpec;

/// Exact rational scalar for CVR and weight arithmetic.
pub type Rational = num_rational::Ratio<i64>;

pub type Dataset = ingest::PilotDataset<f64>;
pub type Cvr = content_validity::CvrResult<f64>;
pub type ExactCvr = content_validity::CvrResult<Rational>;
pub type Critical = content_validity::CriticalValue<f64>;
pub type ExactCritical = content_validity::CriticalValue<Rational>;
pub type Weights = content_validity::WeightVector<f64>;
pub type Collinearity = diagnostics::CollinearityResult<f64>;
pub type Vif = diagnostics::VifValue<f64>;
pub type Correlations = diagnostics::CorrelationMatrix<f64>;
pub type Composite = composites::CompositeScores<f64>;
pub type IterationReport = workflow::Report<f64>;
