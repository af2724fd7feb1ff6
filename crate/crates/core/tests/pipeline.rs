mod common;

use formval::composites::CompositeMethod;
use formval::finding::ReasonCode;
use formval::workflow::{run_pipeline, GateStatus, PipelineInputs, REPORT_VERSION};
use formval::Error;

fn demo_with(edit: impl FnOnce(&mut PipelineInputs)) -> PipelineInputs {
    let mut inputs = common::demo_inputs();
    edit(&mut inputs);
    inputs
}

#[test]
fn demo_report_shape() {
    let report = run_pipeline::<f64>(&common::demo_inputs()).unwrap();
    assert_eq!(report.report_version, REPORT_VERSION);
    let status: Vec<_> = report.gates.iter().map(|g| (g.construct_id.as_str(), g.status)).collect();
    assert_eq!(
        status,
        [("resp", GateStatus::Pass), ("assur", GateStatus::Revise), ("sat", GateStatus::Pass), ("sq", GateStatus::Pass)]
    );
    assert_eq!(report.dropped_respondents, ["p0007", "p0012"]);
    assert_eq!(report.history_findings.len(), 3);
    let assur = &report.constructs[1].diagnostics.weights.as_ref().unwrap();
    assert_eq!(assur.excluded, ["assur4"]);
    assert!(!report.summary.proceed);
}

#[test]
fn replay_from_embedded_inputs_is_byte_identical() {
    let first = run_pipeline::<f64>(&common::demo_inputs()).unwrap().to_json().unwrap();
    let doc: serde_json::Value = serde_json::from_str(&first).unwrap();
    let inputs: PipelineInputs = serde_json::from_value(doc["inputs"].clone()).unwrap();
    let again = run_pipeline::<f64>(&inputs).unwrap().to_json().unwrap();
    assert_eq!(first, again);
}

#[test]
fn markdown_is_deterministic_and_names_reasons() {
    let a = run_pipeline::<f64>(&common::demo_inputs()).unwrap().to_markdown();
    let b = run_pipeline::<f64>(&common::demo_inputs()).unwrap().to_markdown();
    assert_eq!(a, b);
    assert!(a.contains("CVR_BELOW_CRITICAL"));
    assert!(a.contains("| assur | Formative | Revise | ContentValidity |"));
}

#[test]
fn pass_only_report_has_no_revise_codes() {
    let inputs = demo_with(|i| {
        // make assur4 essential for every rater
        i.sme_csv = Some(
            i.sme_csv
                .as_ref()
                .unwrap()
                .lines()
                .enumerate()
                .map(|(n, l)| {
                    if n < 2 {
                        return l.to_owned();
                    }
                    let mut cells: Vec<&str> = l.split(',').collect();
                    cells[9] = "essential";
                    cells.join(",")
                })
                .collect::<Vec<_>>()
                .join("\n"),
        );
    });
    let report = run_pipeline::<f64>(&inputs).unwrap();
    assert!(report.summary.proceed, "{:?}", report.gates);
    let doc: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    for g in doc["gates"].as_array().unwrap() {
        assert_eq!(g["status"], "PASS");
        assert!(g["reasons"].as_array().unwrap().iter().all(|r| r["effect"] == "info"));
    }
}

#[test]
fn failing_every_item_blocks_the_construct_and_its_parent() {
    let inputs = demo_with(|i| {
        i.sme_csv = Some(i.sme_csv.as_ref().unwrap().replace("essential", "useful"));
    });
    let report = run_pipeline::<f64>(&inputs).unwrap();
    for g in &report.gates[..3] {
        assert_eq!(g.status, GateStatus::Blocked, "{}", g.construct_id);
        assert!(g.reasons.iter().any(|r| r.code == ReasonCode::NoContentValidItems));
    }
    let sq = &report.gates[3];
    assert_eq!(sq.status, GateStatus::Blocked);
    assert_eq!(sq.reasons[0].code, ReasonCode::ChildUnavailable);
    assert_eq!(sq.reasons[0].items, ["resp", "assur"]);
}

#[test]
fn median_composites_stay_on_the_response_grid() {
    let inputs = demo_with(|i| i.config.composite_method = CompositeMethod::WeightedMedian);
    let report = run_pipeline::<f64>(&inputs).unwrap();
    let resp = report.constructs[0].composite.as_ref().unwrap();
    assert_eq!(resp.method, CompositeMethod::WeightedMedian);
    assert!(resp.scores.iter().all(|s| (s * 2.0).fract() == 0.0));
}

#[test]
fn researcher_ratings_feed_weights_when_selected() {
    let inputs = demo_with(|i| {
        i.spec_toml = i.spec_toml.replacen("weight_source = \"cvr\"", "weight_source = \"researcher_rating\"", 1);
        i.researcher_csv = Some("# mode=scale5\nrater_id,resp1,resp2,resp3,resp4,resp5\nme,5,4,5,3,2\nyou,5,4,3,3,2\n".into());
    });
    let report = run_pipeline::<f64>(&inputs).unwrap();
    let w = report.constructs[0].diagnostics.weights.as_ref().unwrap();
    let total: f64 = [5.0, 4.0, 4.0, 3.0, 2.0].iter().sum();
    assert_eq!(w.weights, [5.0 / total, 4.0 / total, 4.0 / total, 3.0 / total, 2.0 / total]);
    assert!(report.gates[0].reasons.iter().any(|r| r.code == ReasonCode::ResearcherRatingWeights));
}

#[test]
fn missing_sme_ratings_is_an_upstream_error() {
    let inputs = demo_with(|i| i.sme_csv = None);
    assert!(matches!(run_pipeline::<f64>(&inputs), Err(Error::MissingUpstream { .. })));
}

#[test]
fn invalid_spec_is_rejected_with_its_findings() {
    let inputs = demo_with(|i| i.spec_toml = i.spec_toml.replace("manual_weights = [0.6, 0.4]", "manual_weights = [0.6]"));
    match run_pipeline::<f64>(&inputs) {
        Err(Error::InvalidSpec(f)) => assert_eq!(f[0].code, ReasonCode::ManualWeightsLength),
        other => panic!("{other:?}"),
    }
}

#[test]
fn reusing_an_iteration_id_is_an_error() {
    let inputs = demo_with(|i| i.iteration_id = "pilot-1".into());
    assert!(matches!(run_pipeline::<f64>(&inputs), Err(Error::DuplicateIteration(_))));
}

#[test]
fn single_precision_agrees_with_double_on_decisions() {
    let inputs = common::demo_inputs();
    let d = run_pipeline::<f64>(&inputs).unwrap();
    let s = run_pipeline::<f32>(&inputs).unwrap();
    let status = |g: &[formval::workflow::GateDecision]| g.iter().map(|g| g.status).collect::<Vec<_>>();
    assert_eq!(status(&d.gates), status(&s.gates));
}
