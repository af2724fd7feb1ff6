use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PilotDataset;
use crate::scalar::Real;
use crate::spec::{ConstructSpec, ModelType};
use crate::stats::sample_variance;

pub const FORMATIVE_ALPHA_NOTE: &str = "not a validity criterion for formative constructs: \
their indicators need not covary, so a low value is expected";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaResult<T> {
    pub construct_id: String,
    pub k: usize,
    pub alpha: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Cronbach's alpha over the given indicators. Formative constructs get the
/// result annotated as a contrast, never as a criterion.
pub fn cronbach_alpha<T: Real>(
    ds: &PilotDataset<T>,
    construct: &ConstructSpec,
    indicators: &[&str],
) -> Result<AlphaResult<T>> {
    let k = indicators.len();
    if k < 2 {
        return Err(Error::InsufficientData(format!("alpha for `{}` needs at least 2 indicators", construct.id)));
    }
    if ds.n_respondents() < 3 {
        return Err(Error::InsufficientData(format!("alpha for `{}` needs at least 3 respondents", construct.id)));
    }
    let cols = ds.columns(indicators)?;
    let totals: Vec<T> =
        (0..ds.n_respondents()).map(|r| cols.iter().fold(T::zero(), |acc, c| acc + c[r])).collect();
    let total_var = sample_variance(&totals);
    if total_var == T::zero() {
        return Err(Error::ZeroTotalVariance);
    }
    let item_var = cols.iter().fold(T::zero(), |acc, c| acc + sample_variance(c));
    let kk = T::from_count(k);
    let alpha = kk / (kk - T::one()) * (T::one() - item_var / total_var);
    Ok(AlphaResult {
        construct_id: construct.id.clone(),
        k,
        alpha,
        note: (construct.model == ModelType::Formative).then(|| FORMATIVE_ALPHA_NOTE.to_owned()),
    })
}
