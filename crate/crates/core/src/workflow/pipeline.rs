//! End-to-end iteration: spec → content validity → weights → diagnostics →
//! composites → gates → report.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::gate::{evaluate_gates, ConstructDiagnostics, Outcome};
use super::iteration::{check_iteration_overlap, IterationRecord};
use super::report::{ConstructReport, ContentValidity, Report, Summary, REPORT_VERSION};
use crate::composites::{build_higher_order_dataset, composite_scores, CompositeScores};
use crate::config::Config;
use crate::content_validity::{compute_cvr, derive_weights, researcher_rating_weights, WeightVector};
use crate::diagnostics::{
    compute_vif_for, correlation_matrix, cronbach_alpha, detect_outlier_respondents, item_descriptives,
};
use crate::error::{Error, Result};
use crate::finding::{Finding, ReasonCode, Severity};
use crate::ingest::{apply_missing_policy, parse_pilot_csv, parse_sme_csv, PilotDataset, RatingMode};
use crate::scalar::Real;
use crate::spec::{classify_construct, parse_spec, validate_spec, ConstructSpec, MeasurementSpec, WeightSource};

/// Raw inputs for one run. Reports embed these verbatim so a run can be
/// replayed from its report alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineInputs {
    pub iteration_id: String,
    pub spec_toml: String,
    pub config: Config,
    /// Label recorded as the pilot's provenance (usually a file name).
    pub pilot_source: String,
    pub pilot_csv: String,
    /// SME judgments in `cvr3` mode.
    #[serde(default)]
    pub sme_csv: Option<String>,
    /// Researcher ratings in `scale5` mode.
    #[serde(default)]
    pub researcher_csv: Option<String>,
    #[serde(default)]
    pub history: Vec<IterationRecord>,
}

pub fn run_pipeline<T: Real>(inputs: &PipelineInputs) -> Result<Report<T>> {
    let config = &inputs.config;
    config.validate()?;
    let spec = parse_spec(&inputs.spec_toml)?;
    let spec_findings = validate_spec(&spec, &config.validation_options());
    if spec_findings.iter().any(|f| f.severity == Severity::Error) {
        return Err(Error::InvalidSpec(spec_findings.into_iter().filter(|f| f.severity == Severity::Error).collect()));
    }
    let spec_hash = spec.content_hash();

    let load = parse_pilot_csv::<T>(&inputs.pilot_csv, &inputs.pilot_source, &spec, &inputs.iteration_id)?;
    let mut ingest_findings = load.findings;
    let current = record_for(&inputs.iteration_id, &spec, &load.dataset);
    let history_findings = check_iteration_overlap(&current, &inputs.history)?;
    let (pilot, dropped) = apply_missing_policy(&load.dataset, config.missing_policy)?;
    if !dropped.is_empty() {
        ingest_findings.push(
            Finding::info(
                ReasonCode::RespondentDropped,
                format!("{} respondent(s) dropped for incomplete responses", dropped.len()),
            )
            .with_subjects(dropped.clone()),
        );
    }

    let content_validity = match &inputs.sme_csv {
        Some(text) => {
            let set = parse_sme_csv(text, "sme", &spec)?;
            if set.mode() != RatingMode::Cvr3 {
                return Err(Error::WrongRatingMode { expected: "cvr3", found: set.mode().as_str() });
            }
            let r = compute_cvr::<T>(&set, &config.cvr_settings()?)?;
            Some(ContentValidity { critical: r.critical, results: r.results, findings: r.findings })
        }
        None => None,
    };
    let researcher_means = match &inputs.researcher_csv {
        Some(text) => Some(researcher_rating_weights::<T>(&parse_sme_csv(text, "researcher", &spec)?)?),
        None => None,
    };

    let order = spec.evaluation_order().ok_or_else(|| Error::Reference("construct hierarchy has a cycle".into()))?;
    let mut composites: BTreeMap<String, CompositeScores<T>> = BTreeMap::new();
    let mut reports: BTreeMap<String, ConstructReport<T>> = BTreeMap::new();
    for c in order {
        let r = analyse_construct(c, &pilot, &composites, &content_validity, researcher_means.as_deref(), config)?;
        if let Some(s) = &r.composite {
            composites.insert(c.id.clone(), s.clone());
        }
        reports.insert(c.id.clone(), r);
    }
    let constructs: Vec<ConstructReport<T>> =
        spec.constructs.iter().map(|c| reports.remove(&c.id).expect("every construct analysed")).collect();

    let diagnostics: Vec<ConstructDiagnostics<T>> = constructs.iter().map(|c| c.diagnostics.clone()).collect();
    let gates = evaluate_gates(&spec, &diagnostics, config)?;
    let summary = Summary::tally(&gates, [&spec_findings, &ingest_findings, &history_findings]);

    Ok(Report {
        report_version: REPORT_VERSION.to_owned(),
        iteration_id: inputs.iteration_id.clone(),
        spec_title: spec.title.clone(),
        spec_hash,
        summary,
        spec_findings,
        ingest_findings,
        history_findings,
        dropped_respondents: dropped,
        content_validity,
        researcher_means,
        constructs,
        gates,
        inputs: inputs.clone(),
    })
}

/// History record for the iteration described by `inputs`. Every respondent
/// in the pilot file counts, including ones later dropped for missing cells.
pub fn iteration_record(inputs: &PipelineInputs) -> Result<IterationRecord> {
    let spec = parse_spec(&inputs.spec_toml)?;
    let load = parse_pilot_csv::<f64>(&inputs.pilot_csv, &inputs.pilot_source, &spec, &inputs.iteration_id)?;
    Ok(record_for(&inputs.iteration_id, &spec, &load.dataset))
}

fn record_for<T>(iteration_id: &str, spec: &MeasurementSpec, ds: &PilotDataset<T>) -> IterationRecord
where
    T: crate::scalar::Value,
{
    IterationRecord {
        iteration_id: iteration_id.to_owned(),
        respondent_ids: ds.respondent_ids().iter().cloned().collect::<BTreeSet<_>>(),
        spec_hash: spec.content_hash(),
        report_path: None,
    }
}

fn analyse_construct<T: Real>(
    c: &ConstructSpec,
    pilot: &PilotDataset<T>,
    done: &BTreeMap<String, CompositeScores<T>>,
    cv: &Option<ContentValidity<T>>,
    means: Option<&[crate::content_validity::MeanRating<T>]>,
    config: &Config,
) -> Result<ConstructReport<T>> {
    let indicators = c.indicator_ids();
    let cvr: Option<Vec<_>> = match c.weight_source {
        WeightSource::Cvr => {
            let cv = cv.as_ref().ok_or_else(|| Error::MissingUpstream {
                construct: c.id.clone(),
                what: "SME ratings (weight source is cvr)".into(),
            })?;
            Some(cv.results.iter().filter(|r| indicators.contains(&r.item_id.as_str())).cloned().collect())
        }
        _ => None,
    };
    let mut diag = ConstructDiagnostics {
        construct_id: c.id.clone(),
        cvr: cvr.clone(),
        weights: None,
        unavailable_children: c.children.iter().filter(|k| !done.contains_key(*k)).cloned().collect(),
        descriptives: None,
        correlation: None,
        collinearity: Outcome::NotApplicable,
        alpha: Outcome::NotApplicable,
        outliers: Vec::new(),
        scale_points: 0,
    };
    let mut report = ConstructReport {
        construct_id: c.id.clone(),
        model: c.model,
        higher_order: c.is_higher_order(),
        recommendation: c.classification.as_ref().map(classify_construct),
        diagnostics: diag.clone(),
        composite: None,
    };
    if !diag.unavailable_children.is_empty() {
        return Ok(report);
    }

    let owned;
    let ds = if c.is_higher_order() {
        let kids: Vec<CompositeScores<T>> = c.children.iter().map(|k| done[k].clone()).collect();
        owned = build_higher_order_dataset(&kids, c)?;
        &owned
    } else {
        pilot
    };

    let weights = match derive_weights(c, cvr.as_deref(), means) {
        Ok(w) => restrict_to_administered(w, ds)?,
        Err(Error::NoValidItems(_)) => None,
        Err(e) => return Err(e),
    };
    let Some(weights) = weights else {
        report.diagnostics = diag;
        return Ok(report);
    };
    let kept: Vec<&str> = weights.item_ids.iter().map(String::as_str).collect();
    let sub = ds.select_items(&kept)?;
    diag.scale_points = sub
        .scales()
        .iter()
        .map(|s| (s.max - s.min).to_f64().map_or(0, |d| d.round() as usize + 1))
        .max()
        .unwrap_or(0);
    diag.descriptives = Some(item_descriptives(&sub)?);
    diag.outliers = detect_outlier_respondents(&sub, config.outlier_fence, config.outlier_fraction)?;
    if kept.len() >= 2 {
        diag.correlation = correlation_matrix(&sub, &kept).ok();
        diag.collinearity = match compute_vif_for(&sub, &c.id, &kept, config.sample_ratio_floor) {
            Ok(v) => Outcome::Computed(v),
            Err(e @ (Error::InsufficientData(_) | Error::ConstantBlock(_))) => Outcome::NotEstimable(e.to_string()),
            Err(e) => return Err(e),
        };
        diag.alpha = match cronbach_alpha(&sub, c, &kept) {
            Ok(a) => Outcome::Computed(a),
            Err(e @ (Error::InsufficientData(_) | Error::ZeroTotalVariance)) => Outcome::NotEstimable(e.to_string()),
            Err(e) => return Err(e),
        };
    }
    report.composite = Some(composite_scores(ds, c, &weights, config.composite_method)?);
    diag.weights = Some(weights);
    report.diagnostics = diag;
    Ok(report)
}

/// Drops indicators that have no column in the dataset and renormalizes.
fn restrict_to_administered<T: Real>(w: WeightVector<T>, ds: &PilotDataset<T>) -> Result<Option<WeightVector<T>>> {
    if w.item_ids.iter().all(|id| ds.item_index(id).is_some()) {
        return Ok(Some(w));
    }
    let (ids, raw): (Vec<String>, Vec<T>) =
        w.item_ids.iter().zip(&w.weights).filter(|(id, _)| ds.item_index(id).is_some()).map(|(i, w)| (i.clone(), *w)).unzip();
    let mut excluded = w.excluded.clone();
    excluded.extend(w.item_ids.iter().filter(|id| ds.item_index(id).is_none()).cloned());
    match WeightVector::normalized(&w.construct_id, ids, raw, w.source) {
        Ok(mut nw) => {
            nw.excluded = excluded;
            Ok(Some(nw))
        }
        Err(Error::NoValidItems(_)) => Ok(None),
        Err(e) => Err(e),
    }
}
