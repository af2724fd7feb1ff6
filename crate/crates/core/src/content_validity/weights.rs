use serde::{Deserialize, Serialize};

use super::cvr::{CvrResult, MeanRating};
use crate::error::{Error, Result};
use crate::scalar::Value;
use crate::spec::{ConstructSpec, WeightSource};

/// Normalized theoretical weights over the indicators that survived the
/// content-validity gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector<T> {
    pub construct_id: String,
    pub item_ids: Vec<String>,
    pub weights: Vec<T>,
    pub source: WeightSource,
    /// Indicators left out because they failed the gate.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excluded: Vec<String>,
}

impl<T: Value> WeightVector<T> {
    /// Normalizes raw non-negative weights; fails when they sum to zero.
    pub fn normalized(
        construct_id: impl Into<String>,
        item_ids: Vec<String>,
        raw: Vec<T>,
        source: WeightSource,
    ) -> Result<Self> {
        let construct_id = construct_id.into();
        if raw.len() != item_ids.len() {
            return Err(Error::Weights { construct: construct_id, message: "weights and items differ in length".into() });
        }
        if raw.iter().any(|w| *w < T::zero()) {
            return Err(Error::Weights { construct: construct_id, message: "negative weight".into() });
        }
        let total = raw.iter().fold(T::zero(), |acc, &w| acc + w);
        if total == T::zero() {
            return Err(Error::NoValidItems(construct_id));
        }
        let weights = raw.into_iter().map(|w| w / total).collect();
        Ok(WeightVector { construct_id, item_ids, weights, source, excluded: Vec::new() })
    }

    pub fn total(&self) -> T {
        self.weights.iter().fold(T::zero(), |acc, &w| acc + w)
    }
}

/// Builds the construct's weight vector from its declared weight source.
///
/// CVR weights use the raw CVR of every item that passed the gate; failing
/// items are listed in `excluded` and the rest renormalized. Researcher
/// ratings and manual weights keep every indicator.
pub fn derive_weights<T: Value>(
    construct: &ConstructSpec,
    cvr: Option<&[CvrResult<T>]>,
    means: Option<&[MeanRating<T>]>,
) -> Result<WeightVector<T>> {
    let ids: Vec<String> = construct.indicator_ids().into_iter().map(str::to_owned).collect();
    let missing = |what: &str, id: &str| Error::Weights {
        construct: construct.id.clone(),
        message: format!("no {what} for indicator `{id}`"),
    };
    match construct.weight_source {
        WeightSource::Cvr => {
            let results = cvr.ok_or_else(|| Error::Weights {
                construct: construct.id.clone(),
                message: "weight source is cvr but no CVR results were supplied".into(),
            })?;
            let mut kept = Vec::new();
            let mut raw = Vec::new();
            let mut excluded = Vec::new();
            for id in &ids {
                let r = results.iter().find(|r| &r.item_id == id).ok_or_else(|| missing("CVR result", id))?;
                if r.passed && r.cvr > T::zero() {
                    kept.push(id.clone());
                    raw.push(r.cvr);
                } else {
                    excluded.push(id.clone());
                }
            }
            if kept.is_empty() {
                return Err(Error::NoValidItems(construct.id.clone()));
            }
            let mut w = WeightVector::normalized(&construct.id, kept, raw, WeightSource::Cvr)?;
            w.excluded = excluded;
            Ok(w)
        }
        WeightSource::ResearcherRating => {
            let means = means.ok_or_else(|| Error::Weights {
                construct: construct.id.clone(),
                message: "weight source is researcher_rating but no ratings were supplied".into(),
            })?;
            let raw = ids
                .iter()
                .map(|id| means.iter().find(|m| &m.item_id == id).map(|m| m.mean).ok_or_else(|| missing("mean rating", id)))
                .collect::<Result<Vec<_>>>()?;
            WeightVector::normalized(&construct.id, ids, raw, WeightSource::ResearcherRating)
        }
        WeightSource::Manual => {
            let manual = construct.manual_weights.as_ref().ok_or_else(|| Error::Weights {
                construct: construct.id.clone(),
                message: "weight source is manual but manual_weights is absent".into(),
            })?;
            if manual.iter().any(|w| !w.is_finite()) {
                return Err(Error::Weights { construct: construct.id.clone(), message: "non-finite manual weight".into() });
            }
            let raw = manual.iter().map(|&w| T::from_f64_lossy(w)).collect();
            WeightVector::normalized(&construct.id, ids, raw, WeightSource::Manual)
        }
    }
}
