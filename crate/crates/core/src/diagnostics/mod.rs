//! Pilot-data diagnostics: descriptives, outliers, correlations, VIF, sample
//! size adequacy and the Cronbach's alpha contrast.

mod adequacy;
mod alpha;
mod correlation;
mod descriptives;
mod outliers;
mod vif;

pub use adequacy::{sample_size_adequacy, Adequacy};
pub use alpha::{cronbach_alpha, AlphaResult, FORMATIVE_ALPHA_NOTE};
pub use correlation::{correlation_matrix, CorrelationMatrix};
pub use descriptives::{item_descriptives, ItemDescriptives};
pub use outliers::{detect_outlier_respondents, OutlierFlag};
pub use vif::{compute_vif, compute_vif_for, CollinearityResult, VifValue};
