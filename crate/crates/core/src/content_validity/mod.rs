//! Content validity ratios, panel critical values and theoretical weights.

mod critical;
mod cvr;
mod weights;

pub use critical::{cvr_critical_value, CriticalSource, CriticalValue};
pub use cvr::{compute_cvr, cvr_value, researcher_rating_weights, CvrReport, CvrResult, CvrSettings, MeanRating};
pub use weights::{derive_weights, WeightVector};
