use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::critical::{cvr_critical_value, override_critical, CriticalValue};
use crate::error::{Error, Result};
use crate::finding::{Finding, ReasonCode};
use crate::ingest::{Category, Judgment, RatingMode, SmeRatingSet};
use crate::scalar::Value;

/// `(n_e - N/2) / (N/2)`.
pub fn cvr_value<T: Value>(n_essential: usize, n_raters: usize) -> T {
    let half = T::from_count(n_raters) * T::half();
    (T::from_count(n_essential) - half) / half
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvrSettings {
    pub alpha: f64,
    /// Panel size → critical CVR, replacing the binomial construction.
    pub overrides: BTreeMap<usize, f64>,
}

impl Default for CvrSettings {
    fn default() -> Self {
        CvrSettings { alpha: 0.05, overrides: BTreeMap::new() }
    }
}

impl CvrSettings {
    pub fn critical<T: Value>(&self, n_raters: usize) -> CriticalValue<T> {
        match self.overrides.get(&n_raters) {
            Some(&v) => override_critical(n_raters, self.alpha, v),
            None => cvr_critical_value(n_raters, self.alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvrResult<T> {
    pub item_id: String,
    pub n_essential: usize,
    pub n_raters: usize,
    pub cvr: T,
    pub critical_value: T,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvrReport<T> {
    pub critical: CriticalValue<T>,
    pub results: Vec<CvrResult<T>>,
    pub findings: Vec<Finding>,
}

pub fn compute_cvr<T: Value>(ratings: &SmeRatingSet, settings: &CvrSettings) -> Result<CvrReport<T>> {
    if ratings.mode() != RatingMode::Cvr3 {
        return Err(Error::WrongRatingMode { expected: "cvr3", found: ratings.mode().as_str() });
    }
    let n = ratings.n_raters();
    if n < 2 {
        return Err(Error::TooFewRaters(n));
    }
    let critical = settings.critical::<T>(n);
    let mut findings = Vec::new();
    if critical.panel_too_small() {
        findings.push(Finding::warning(
            ReasonCode::PanelTooSmall,
            format!("panel too small for significance: {n} raters cannot beat chance at alpha {}", settings.alpha),
        ));
    }
    let results = ratings
        .items()
        .iter()
        .enumerate()
        .map(|(j, item)| {
            let n_essential =
                ratings.item_column(j).filter(|&x| x == Judgment::Category(Category::Essential)).count();
            CvrResult {
                item_id: item.clone(),
                n_essential,
                n_raters: n,
                cvr: cvr_value(n_essential, n),
                critical_value: critical.value,
                passed: critical.passes(n_essential),
            }
        })
        .collect();
    Ok(CvrReport { critical, results, findings })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRating<T> {
    pub item_id: String,
    pub mean: T,
}

/// Per-item arithmetic mean of 1..5 researcher ratings.
pub fn researcher_rating_weights<T: Value>(ratings: &SmeRatingSet) -> Result<Vec<MeanRating<T>>> {
    if ratings.mode() != RatingMode::Scale5 {
        return Err(Error::WrongRatingMode { expected: "scale5", found: ratings.mode().as_str() });
    }
    if ratings.n_raters() == 0 {
        return Err(Error::InsufficientData("no researcher ratings".into()));
    }
    Ok(ratings
        .items()
        .iter()
        .enumerate()
        .map(|(j, item)| {
            let scores: Vec<T> = ratings
                .item_column(j)
                .map(|x| match x {
                    Judgment::Score(s) => T::from_count(s as usize),
                    Judgment::Category(_) => unreachable!("mode checked above"),
                })
                .collect();
            MeanRating { item_id: item.clone(), mean: crate::scalar::mean(&scores) }
        })
        .collect())
}
