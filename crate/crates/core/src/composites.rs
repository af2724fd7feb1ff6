//! Weighted composite scores and higher-order proxy datasets.
//!
//! Composites use the theoretical weights from [`crate::content_validity`];
//! there is no estimated disturbance term. A higher-order construct is
//! validated by treating its children's composite scores as indicators and
//! running the same diagnostics on them, recursively.

use serde::{Deserialize, Serialize};

use crate::content_validity::WeightVector;
use crate::error::{Error, Result};
use crate::ingest::{PilotDataset, ScaleBounds};
use crate::scalar::{min_max, Value};
use crate::spec::ConstructSpec;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositeMethod {
    #[default]
    #[serde(alias = "mean")]
    WeightedMean,
    #[serde(alias = "median")]
    WeightedMedian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeScores<T> {
    pub construct_id: String,
    pub iteration_id: String,
    pub respondent_ids: Vec<String>,
    pub scores: Vec<T>,
    pub method: CompositeMethod,
    /// Widest scale spanned by the weighted indicators.
    pub scale: ScaleBounds<T>,
    pub weights_used: WeightVector<T>,
}

pub fn composite_scores<T: Value>(
    ds: &PilotDataset<T>,
    construct: &ConstructSpec,
    w: &WeightVector<T>,
    method: CompositeMethod,
) -> Result<CompositeScores<T>> {
    match method {
        CompositeMethod::WeightedMean => weighted_mean_scores(ds, construct, w),
        CompositeMethod::WeightedMedian => weighted_median_scores(ds, construct, w),
    }
}

/// `score_r = Σ w_i x_ri` with normalized weights.
pub fn weighted_mean_scores<T: Value>(
    ds: &PilotDataset<T>,
    construct: &ConstructSpec,
    w: &WeightVector<T>,
) -> Result<CompositeScores<T>> {
    score_with(ds, construct, w, CompositeMethod::WeightedMean, |xs, ws| {
        let s = xs.iter().zip(ws).fold(T::zero(), |acc, (&x, &w)| acc + w * x);
        // normalized float weights can sum to 1 ± ulp; keep the result convex
        let (lo, hi) = min_max(xs);
        if s < lo {
            lo
        } else if s > hi {
            hi
        } else {
            s
        }
    })
}

/// Smallest response whose cumulative weight reaches half the total mass;
/// when the mass splits exactly in half, the midpoint of the two adjacent
/// responses. With equal weights this is the ordinary median.
pub fn weighted_median_scores<T: Value>(
    ds: &PilotDataset<T>,
    construct: &ConstructSpec,
    w: &WeightVector<T>,
) -> Result<CompositeScores<T>> {
    score_with(ds, construct, w, CompositeMethod::WeightedMedian, weighted_median)
}

pub fn weighted_median<T: Value>(xs: &[T], ws: &[T]) -> T {
    let mut pairs: Vec<(T, T)> =
        xs.iter().zip(ws).filter(|(_, &w)| w > T::zero()).map(|(&x, &w)| (x, w)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("comparable responses"));
    let n = pairs.len();
    let mut i = 0;
    while i < n {
        let mut end = i + 1;
        while end < n && pairs[end].0 == pairs[i].0 {
            end += 1;
        }
        // cumulative mass through this value vs. the mass strictly above it,
        // both summed left to right so equal-weight splits compare exactly
        let below = pairs[..end].iter().fold(T::zero(), |acc, p| acc + p.1);
        let above = pairs[end..].iter().fold(T::zero(), |acc, p| acc + p.1);
        if below > above || end == n {
            return pairs[i].0;
        }
        if below == above {
            return (pairs[i].0 + pairs[end].0) * T::half();
        }
        i = end;
    }
    unreachable!("weights sum to a positive total")
}

fn score_with<T: Value>(
    ds: &PilotDataset<T>,
    construct: &ConstructSpec,
    w: &WeightVector<T>,
    method: CompositeMethod,
    f: impl Fn(&[T], &[T]) -> T,
) -> Result<CompositeScores<T>> {
    if w.construct_id != construct.id {
        return Err(Error::Weights {
            construct: construct.id.clone(),
            message: format!("weight vector belongs to `{}`", w.construct_id),
        });
    }
    let ids: Vec<&str> = w.item_ids.iter().map(String::as_str).collect();
    let cols = ds.columns(&ids)?;
    let mut row = vec![T::zero(); cols.len()];
    let scores = (0..ds.n_respondents())
        .map(|r| {
            for (slot, c) in row.iter_mut().zip(&cols) {
                *slot = c[r];
            }
            f(&row, &w.weights)
        })
        .collect();
    let mut scale: Option<ScaleBounds<T>> = None;
    for id in &ids {
        let b = ds.scales()[ds.item_index(id).expect("column resolved above")];
        scale = Some(match scale {
            None => b,
            Some(s) => ScaleBounds {
                min: if b.min < s.min { b.min } else { s.min },
                max: if b.max > s.max { b.max } else { s.max },
            },
        });
    }
    Ok(CompositeScores {
        construct_id: construct.id.clone(),
        iteration_id: ds.iteration_id().to_owned(),
        respondent_ids: ds.respondent_ids().to_vec(),
        scores,
        method,
        scale: scale.expect("weight vectors are non-empty"),
        weights_used: w.clone(),
    })
}

/// Assembles child composites into a dataset whose items are the child
/// construct ids, in the parent's declared order.
pub fn build_higher_order_dataset<T: Value>(
    children: &[CompositeScores<T>],
    parent: &ConstructSpec,
) -> Result<PilotDataset<T>> {
    let ordered = parent
        .children
        .iter()
        .map(|id| {
            children.iter().find(|c| &c.construct_id == id).ok_or_else(|| Error::MissingUpstream {
                construct: parent.id.clone(),
                what: format!("composite scores for child `{id}`"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(extra) = children.iter().find(|c| !parent.children.contains(&c.construct_id)) {
        return Err(Error::Reference(format!("`{}` is not a child of `{}`", extra.construct_id, parent.id)));
    }
    let first = ordered.first().ok_or_else(|| Error::InsufficientData(format!("`{}` has no children", parent.id)))?;
    for c in &ordered[1..] {
        if c.respondent_ids != first.respondent_ids {
            return Err(Error::RespondentMismatch(first.construct_id.clone(), c.construct_id.clone()));
        }
    }
    let rows = (0..first.respondent_ids.len()).map(|r| ordered.iter().map(|c| c.scores[r]).collect()).collect();
    PilotDataset::new(
        first.iteration_id.clone(),
        first.respondent_ids.clone(),
        parent.children.clone(),
        ordered.iter().map(|c| c.scale).collect(),
        rows,
    )
}
