//! Per-construct PASS / REVISE / BLOCKED decisions.
//!
//! Formative constructs go through content validity, descriptives and
//! collinearity; reflective constructs go through content validity,
//! descriptives and an alpha floor. Every stage is evaluated and all reasons
//! are reported; nothing short-circuits except that a BLOCKED construct has
//! no data for the later stages.

use serde::{Deserialize, Serialize};

use crate::config::{Config, CorrPreference};
use crate::content_validity::{CvrResult, WeightVector};
use crate::diagnostics::{sample_size_adequacy, AlphaResult, CollinearityResult, CorrelationMatrix, ItemDescriptives, OutlierFlag, VifValue};
use crate::error::{Error, Result};
use crate::finding::ReasonCode;
use crate::scalar::Real;
use crate::spec::{MeasurementSpec, ModelType, WeightSource};

/// Ordered worst to best, so `min` over reasons gives the decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateStatus {
    Blocked,
    Revise,
    Pass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    ContentValidity,
    Descriptives,
    Collinearity,
    Reliability,
}

/// What a reason does to the decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Effect {
    Block,
    Revise,
    Info,
}

impl Effect {
    fn status(self) -> GateStatus {
        match self {
            Effect::Block => GateStatus::Blocked,
            Effect::Revise => GateStatus::Revise,
            Effect::Info => GateStatus::Pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateReason {
    pub stage: Stage,
    pub code: ReasonCode,
    pub effect: Effect,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub items: Vec<String>,
}

impl GateReason {
    fn new(stage: Stage, code: ReasonCode, effect: Effect, message: impl Into<String>, items: Vec<String>) -> Self {
        GateReason { stage, code, effect, message: message.into(), items }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateDecision {
    pub construct_id: String,
    pub model: ModelType,
    pub status: GateStatus,
    /// Earliest stage holding a non-informational reason.
    pub stage: Option<Stage>,
    pub reasons: Vec<GateReason>,
}

/// Folds reasons into a decision: the worst effect wins.
pub fn decide(construct_id: &str, model: ModelType, reasons: Vec<GateReason>) -> GateDecision {
    let status = reasons.iter().map(|r| r.effect.status()).min().unwrap_or(GateStatus::Pass);
    let stage = reasons.iter().filter(|r| r.effect != Effect::Info).map(|r| r.stage).min();
    GateDecision { construct_id: construct_id.to_owned(), model, status, stage, reasons }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum Outcome<V> {
    Computed(V),
    /// Preconditions unmet (too few respondents, constant block, ...).
    NotEstimable(String),
    /// Not run for this construct (wrong branch or a single indicator).
    NotApplicable,
}

impl<V> Outcome<V> {
    pub fn computed(&self) -> Option<&V> {
        match self {
            Outcome::Computed(v) => Some(v),
            _ => None,
        }
    }
}

/// Everything the gate needs to judge one construct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructDiagnostics<T> {
    pub construct_id: String,
    /// CVR results for the construct's indicators (cvr weight source only).
    pub cvr: Option<Vec<CvrResult<T>>>,
    /// `None` when no indicator survived the content-validity gate.
    pub weights: Option<WeightVector<T>>,
    /// Child constructs whose composites could not be formed.
    pub unavailable_children: Vec<String>,
    pub descriptives: Option<Vec<ItemDescriptives<T>>>,
    pub correlation: Option<CorrelationMatrix<T>>,
    pub collinearity: Outcome<Vec<CollinearityResult<T>>>,
    pub alpha: Outcome<AlphaResult<T>>,
    pub outliers: Vec<OutlierFlag>,
    /// Largest number of scale points among the indicators.
    pub scale_points: usize,
}

pub fn evaluate_gates<T: Real>(
    spec: &MeasurementSpec,
    diagnostics: &[ConstructDiagnostics<T>],
    config: &Config,
) -> Result<Vec<GateDecision>> {
    spec.constructs
        .iter()
        .map(|c| {
            let d = diagnostics.iter().find(|d| d.construct_id == c.id).ok_or_else(|| Error::MissingUpstream {
                construct: c.id.clone(),
                what: "diagnostics".into(),
            })?;
            let reasons = construct_reasons(c.model, c.weight_source, &c.indicator_ids(), d, config)?;
            Ok(decide(&c.id, c.model, reasons))
        })
        .collect()
}

fn construct_reasons<T: Real>(
    model: ModelType,
    weight_source: WeightSource,
    indicators: &[&str],
    d: &ConstructDiagnostics<T>,
    config: &Config,
) -> Result<Vec<GateReason>> {
    use ReasonCode as C;
    use Stage as S;
    let missing = |what: &str| Error::MissingUpstream { construct: d.construct_id.clone(), what: what.into() };
    let mut out = Vec::new();

    if !d.unavailable_children.is_empty() {
        out.push(GateReason::new(
            S::ContentValidity,
            C::ChildUnavailable,
            Effect::Block,
            "child construct composites are unavailable",
            d.unavailable_children.clone(),
        ));
    }

    match weight_source {
        WeightSource::Cvr if d.unavailable_children.is_empty() => {
            let cvr = d.cvr.as_ref().ok_or_else(|| missing("CVR results"))?;
            for id in indicators {
                let r = cvr.iter().find(|r| r.item_id == *id).ok_or_else(|| missing("CVR result for an indicator"))?;
                if !r.passed {
                    out.push(GateReason::new(
                        S::ContentValidity,
                        C::CvrBelowCritical,
                        Effect::Revise,
                        format!(
                            "CVR {:.4} ({} of {} essential) does not reach the critical value {:.4}",
                            r.cvr.to_f64().unwrap_or(f64::NAN),
                            r.n_essential,
                            r.n_raters,
                            r.critical_value.to_f64().unwrap_or(f64::NAN)
                        ),
                        vec![r.item_id.clone()],
                    ));
                }
            }
        }
        WeightSource::ResearcherRating => out.push(GateReason::new(
            S::ContentValidity,
            C::ResearcherRatingWeights,
            Effect::Info,
            "weights come from researcher ratings, a last resort when SMEs are unavailable",
            Vec::new(),
        )),
        _ => {}
    }

    let Some(weights) = &d.weights else {
        if d.unavailable_children.is_empty() {
            out.push(GateReason::new(
                S::ContentValidity,
                C::NoContentValidItems,
                Effect::Block,
                "no indicator survived the content-validity gate",
                indicators.iter().map(|s| (*s).to_owned()).collect(),
            ));
        }
        return Ok(out);
    };

    let desc = d.descriptives.as_ref().ok_or_else(|| missing("descriptives"))?;
    let share_max = config.extreme_share_max;
    for item in desc {
        if item.zero_variance {
            out.push(GateReason::new(
                S::Descriptives,
                C::ZeroVariance,
                Effect::Revise,
                "every respondent gave the same answer",
                vec![item.item_id.clone()],
            ));
        }
        for (share, code, label) in
            [(item.ceiling_share, C::CeilingEffect, "scale maximum"), (item.floor_share, C::FloorEffect, "scale minimum")]
        {
            let share = share.to_f64().unwrap_or(0.0);
            if share > share_max {
                out.push(GateReason::new(
                    S::Descriptives,
                    code,
                    Effect::Revise,
                    format!("{:.1}% of responses at the {label} (limit {:.1}%)", share * 100.0, share_max * 100.0),
                    vec![item.item_id.clone()],
                ));
            }
        }
    }
    for o in d.outliers.iter().filter(|o| o.is_outlier) {
        out.push(GateReason::new(
            S::Descriptives,
            C::OutlierRespondent,
            Effect::Info,
            format!(
                "respondent `{}` is outside the fences on {:.0}% of items",
                o.respondent_id,
                o.fraction_flagged * 100.0
            ),
            o.items_flagged.clone(),
        ));
    }

    match model {
        ModelType::Formative => match &d.collinearity {
            Outcome::Computed(results) => {
                let vif_max = T::lit(config.vif_max);
                for r in results {
                    match r.vif {
                        VifValue::ExactDependence => out.push(GateReason::new(
                            S::Collinearity,
                            C::CollinearExact,
                            Effect::Revise,
                            "indicator is an exact linear combination of its siblings",
                            suspects(&r.item_id, &r.predictors, d, config.corr_preference),
                        )),
                        VifValue::Finite(v) if v > vif_max => out.push(GateReason::new(
                            S::Collinearity,
                            C::VifExceeded,
                            Effect::Revise,
                            format!("VIF {:.4} exceeds {}", v.to_f64().unwrap_or(f64::NAN), config.vif_max),
                            suspects(&r.item_id, &r.predictors, d, config.corr_preference),
                        )),
                        VifValue::ConstantItem => out.push(GateReason::new(
                            S::Collinearity,
                            C::VifUndefined,
                            Effect::Info,
                            "VIF undefined for a constant indicator",
                            vec![r.item_id.clone()],
                        )),
                        VifValue::Finite(_) => {}
                    }
                }
                if let Some(r) = results.iter().find(|r| !r.reliable) {
                    let adequacy = sample_size_adequacy(r.n_used, r.predictors.len(), config.sample_ratio_floor);
                    out.push(GateReason::new(
                        S::Collinearity,
                        C::VifUnreliableSample,
                        Effect::Info,
                        adequacy.warning.unwrap_or_else(|| "too few respondents per predictor".into()),
                        Vec::new(),
                    ));
                }
            }
            Outcome::NotEstimable(why) => out.push(GateReason::new(
                S::Collinearity,
                C::VifNotEstimable,
                Effect::Revise,
                why.clone(),
                Vec::new(),
            )),
            Outcome::NotApplicable => {}
        },
        ModelType::Reflective => match &d.alpha {
            Outcome::Computed(a) => {
                if a.alpha < T::lit(config.alpha_floor) {
                    out.push(GateReason::new(
                        S::Reliability,
                        C::AlphaBelowFloor,
                        Effect::Revise,
                        format!(
                            "Cronbach's alpha {:.4} is below {}",
                            a.alpha.to_f64().unwrap_or(f64::NAN),
                            config.alpha_floor
                        ),
                        weights.item_ids.clone(),
                    ));
                }
            }
            Outcome::NotEstimable(why) => out.push(GateReason::new(
                S::Reliability,
                C::AlphaNotEstimable,
                Effect::Revise,
                why.clone(),
                Vec::new(),
            )),
            Outcome::NotApplicable => {}
        },
    }
    Ok(out)
}

/// The flagged item plus the sibling it correlates with most strongly.
fn suspects<T: Real>(item: &str, siblings: &[String], d: &ConstructDiagnostics<T>, pref: CorrPreference) -> Vec<String> {
    let mut out = vec![item.to_owned()];
    let Some(m) = &d.correlation else { return out };
    let use_spearman = match pref {
        CorrPreference::Pearson => false,
        CorrPreference::Spearman => true,
        CorrPreference::Both => d.scale_points <= 7,
    };
    let matrix = if use_spearman { &m.spearman } else { &m.pearson };
    let Some(i) = m.index(item) else { return out };
    let best = siblings
        .iter()
        .filter_map(|s| m.index(s).and_then(|j| matrix[i][j]).map(|r| (s, r.abs())))
        .fold(None::<(&String, T)>, |acc, (s, r)| match acc {
            Some((_, best)) if best >= r => acc,
            _ => Some((s, r)),
        });
    if let Some((s, _)) = best {
        out.push(s.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::fixtures::formative;

    fn clean(id: &str, k: usize) -> ConstructDiagnostics<f64> {
        let items: Vec<String> = (1..=k).map(|j| format!("{id}{j}")).collect();
        ConstructDiagnostics {
            construct_id: id.into(),
            cvr: Some(
                items
                    .iter()
                    .map(|i| CvrResult {
                        item_id: i.clone(),
                        n_essential: 10,
                        n_raters: 10,
                        cvr: 1.0,
                        critical_value: 0.8,
                        passed: true,
                    })
                    .collect(),
            ),
            weights: Some(WeightVector {
                construct_id: id.into(),
                item_ids: items.clone(),
                weights: vec![1.0 / k as f64; k],
                source: WeightSource::Cvr,
                excluded: vec![],
            }),
            unavailable_children: vec![],
            descriptives: Some(
                items
                    .iter()
                    .map(|i| ItemDescriptives {
                        item_id: i.clone(),
                        n: 30,
                        mean: 3.0,
                        median: 3.0,
                        sd: 1.0,
                        q1: 2.0,
                        q3: 4.0,
                        iqr: 2.0,
                        min: 1.0,
                        max: 5.0,
                        floor_share: 0.1,
                        ceiling_share: 0.1,
                        zero_variance: false,
                    })
                    .collect(),
            ),
            correlation: None,
            collinearity: Outcome::Computed(
                items
                    .iter()
                    .map(|i| CollinearityResult {
                        construct_id: id.into(),
                        item_id: i.clone(),
                        r_squared: Some(0.1),
                        vif: VifValue::Finite(1.1),
                        n_used: 30,
                        predictors: items.iter().filter(|o| *o != i).cloned().collect(),
                        reliable: true,
                    })
                    .collect(),
            ),
            alpha: Outcome::Computed(AlphaResult { construct_id: id.into(), k, alpha: 0.1, note: None }),
            outliers: vec![],
            scale_points: 5,
        }
    }

    fn spec() -> MeasurementSpec {
        MeasurementSpec { title: String::new(), constructs: vec![formative("a", 5)] }
    }

    #[test]
    fn clean_construct_passes() {
        let d = evaluate_gates(&spec(), &[clean("a", 5)], &Config::default()).unwrap();
        assert_eq!(d[0].status, GateStatus::Pass);
        assert!(d[0].reasons.is_empty() && d[0].stage.is_none());
    }

    #[test]
    fn exact_dependence_revises() {
        let mut diag = clean("a", 5);
        if let Outcome::Computed(r) = &mut diag.collinearity {
            r[2].vif = VifValue::ExactDependence;
        }
        let d = evaluate_gates(&spec(), &[diag], &Config::default()).unwrap();
        assert_eq!(d[0].status, GateStatus::Revise);
        assert_eq!(d[0].reasons[0].code, ReasonCode::CollinearExact);
        assert_eq!(d[0].stage, Some(Stage::Collinearity));
    }

    #[test]
    fn all_items_failing_cvr_blocks() {
        let mut diag = clean("a", 5);
        for r in diag.cvr.as_mut().unwrap() {
            r.passed = false;
            r.cvr = 0.2;
        }
        diag.weights = None;
        diag.descriptives = None;
        let d = evaluate_gates(&spec(), &[diag], &Config::default()).unwrap();
        assert_eq!(d[0].status, GateStatus::Blocked);
        assert!(d[0].reasons.iter().any(|r| r.code == ReasonCode::NoContentValidItems));
        assert_eq!(d[0].reasons.iter().filter(|r| r.code == ReasonCode::CvrBelowCritical).count(), 5);
    }

    #[test]
    fn vif_suspect_names_most_correlated_sibling() {
        let mut diag = clean("a", 3);
        let ids: Vec<String> = ["a1", "a2", "a3"].map(String::from).to_vec();
        let p = vec![
            vec![Some(1.0), Some(0.2), Some(-0.95)],
            vec![Some(0.2), Some(1.0), Some(0.1)],
            vec![Some(-0.95), Some(0.1), Some(1.0)],
        ];
        diag.correlation =
            Some(CorrelationMatrix { item_ids: ids, pearson: p.clone(), spearman: p, undefined_pairs: vec![] });
        if let Outcome::Computed(r) = &mut diag.collinearity {
            r[0].vif = VifValue::Finite(12.0);
        }
        let mut spec = spec();
        spec.constructs[0] = formative("a", 3);
        let d = evaluate_gates(&spec, &[diag], &Config::default()).unwrap();
        let r = &d[0].reasons[0];
        assert_eq!(r.code, ReasonCode::VifExceeded);
        assert_eq!(r.items, ["a1", "a3"]);
    }

    #[test]
    fn missing_upstream_errors() {
        assert!(matches!(evaluate_gates::<f64>(&spec(), &[], &Config::default()), Err(Error::MissingUpstream { .. })));
        let mut diag = clean("a", 5);
        diag.descriptives = None;
        assert!(evaluate_gates(&spec(), &[diag], &Config::default()).is_err());
    }

    #[test]
    fn reflective_branch_uses_alpha_only() {
        let mut spec = spec();
        spec.constructs[0].model = ModelType::Reflective;
        let mut diag = clean("a", 5);
        if let Outcome::Computed(r) = &mut diag.collinearity {
            r[0].vif = VifValue::Finite(50.0);
        }
        let d = evaluate_gates(&spec, &[diag], &Config::default()).unwrap();
        let codes: Vec<_> = d[0].reasons.iter().map(|r| r.code).collect();
        assert_eq!(codes, [ReasonCode::AlphaBelowFloor]);
    }

    #[test]
    fn status_orders_worst_first() {
        assert!(GateStatus::Blocked < GateStatus::Revise && GateStatus::Revise < GateStatus::Pass);
    }
}
