//! Structured (JSON) and human (markdown) iteration reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::gate::{ConstructDiagnostics, GateDecision, GateStatus, Outcome};
use super::pipeline::PipelineInputs;
use crate::composites::CompositeScores;
use crate::content_validity::{CriticalValue, CvrResult, MeanRating};
use crate::diagnostics::VifValue;
use crate::error::Result;
use crate::finding::{Finding, Severity};
use crate::scalar::Real;
use crate::spec::{ModelType, Recommendation};

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentValidity<T> {
    pub critical: CriticalValue<T>,
    pub results: Vec<CvrResult<T>>,
    pub findings: Vec<Finding>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructReport<T> {
    pub construct_id: String,
    pub model: ModelType,
    pub higher_order: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recommendation: Option<Recommendation>,
    pub diagnostics: ConstructDiagnostics<T>,
    pub composite: Option<CompositeScores<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub constructs: usize,
    pub pass: usize,
    pub revise: usize,
    pub blocked: usize,
    pub warnings: usize,
    /// True when every construct passed its gate.
    pub proceed: bool,
}

impl Summary {
    pub fn tally<'a>(gates: &[GateDecision], findings: impl IntoIterator<Item = &'a Vec<Finding>>) -> Self {
        let count = |s| gates.iter().filter(|g| g.status == s).count();
        let warnings =
            findings.into_iter().flat_map(|v| v.iter()).filter(|f| f.severity == Severity::Warning).count();
        Summary {
            constructs: gates.len(),
            pass: count(GateStatus::Pass),
            revise: count(GateStatus::Revise),
            blocked: count(GateStatus::Blocked),
            warnings,
            proceed: gates.iter().all(|g| g.status == GateStatus::Pass),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub report_version: String,
    pub iteration_id: String,
    pub spec_title: String,
    pub spec_hash: String,
    pub summary: Summary,
    pub gates: Vec<GateDecision>,
    pub spec_findings: Vec<Finding>,
    pub ingest_findings: Vec<Finding>,
    pub history_findings: Vec<Finding>,
    pub dropped_respondents: Vec<String>,
    pub content_validity: Option<ContentValidity<T>>,
    pub researcher_means: Option<Vec<MeanRating<T>>>,
    pub constructs: Vec<ConstructReport<T>>,
    pub inputs: PipelineInputs,
}

impl<T: Real + Serialize> Report<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn to_markdown(&self) -> String {
        let mut md = String::new();
        let title = if self.spec_title.is_empty() { "Measurement model" } else { &self.spec_title };
        let _ = writeln!(md, "# {title}: iteration `{}`\n", self.iteration_id);
        let s = &self.summary;
        let _ = writeln!(
            md,
            "{} construct(s): {} pass, {} revise, {} blocked. {}\n",
            s.constructs,
            s.pass,
            s.revise,
            s.blocked,
            if s.proceed { "Ready for the main study." } else { "Revise and run another pilot iteration." }
        );

        md.push_str("## Gate decisions\n\n| Construct | Model | Status | Stage |\n|---|---|---|---|\n");
        for g in &self.gates {
            let stage = g.stage.map_or("-".to_owned(), |s| format!("{s:?}"));
            let _ = writeln!(md, "| {} | {:?} | {:?} | {stage} |", g.construct_id, g.model, g.status);
        }
        md.push('\n');
        for g in self.gates.iter().filter(|g| !g.reasons.is_empty()) {
            let _ = writeln!(md, "### {}\n", g.construct_id);
            for r in &g.reasons {
                let items = if r.items.is_empty() { String::new() } else { format!(" [{}]", r.items.join(", ")) };
                let _ = writeln!(md, "- {:?} `{}`: {}{items}", r.effect, r.code, r.message);
            }
            md.push('\n');
        }

        if let Some(cv) = &self.content_validity {
            let _ = writeln!(
                md,
                "## Content validity\n\n{} raters, alpha {}, critical CVR {}\n",
                cv.critical.n_raters,
                cv.critical.alpha,
                num(cv.critical.value)
            );
            md.push_str("| Item | Essential | CVR | Passed |\n|---|---|---|---|\n");
            for r in &cv.results {
                let _ = writeln!(md, "| {} | {}/{} | {} | {} |", r.item_id, r.n_essential, r.n_raters, num(r.cvr), r.passed);
            }
            md.push('\n');
        }

        md.push_str("## Constructs\n\n");
        for c in &self.constructs {
            let d = &c.diagnostics;
            let _ = writeln!(md, "### {} ({:?}{})\n", c.construct_id, c.model, if c.higher_order { ", higher-order" } else { "" });
            if let Some(rec) = c.recommendation {
                let _ = writeln!(md, "Classification guide: {rec:?}\n");
            }
            match &d.weights {
                Some(w) => {
                    md.push_str("| Indicator | Weight | Mean | SD | VIF |\n|---|---|---|---|---|\n");
                    for (id, wt) in w.item_ids.iter().zip(&w.weights) {
                        let desc = d.descriptives.iter().flatten().find(|x| &x.item_id == id);
                        let vif = d
                            .collinearity
                            .computed()
                            .and_then(|v| v.iter().find(|r| &r.item_id == id))
                            .map_or("-".to_owned(), |r| match r.vif {
                                VifValue::Finite(v) => num(v),
                                VifValue::ExactDependence => "exact dependence".into(),
                                VifValue::ConstantItem => "undefined".into(),
                            });
                        let _ = writeln!(
                            md,
                            "| {id} | {} | {} | {} | {vif} |",
                            num(*wt),
                            desc.map_or("-".into(), |x| num(x.mean)),
                            desc.map_or("-".into(), |x| num(x.sd)),
                        );
                    }
                    if !w.excluded.is_empty() {
                        let _ = writeln!(md, "\nExcluded: {}", w.excluded.join(", "));
                    }
                    md.push('\n');
                }
                None => md.push_str("No usable indicators.\n\n"),
            }
            match &d.alpha {
                Outcome::Computed(a) => {
                    let _ = writeln!(md, "Cronbach's alpha: {}", num(a.alpha));
                    if let Some(note) = &a.note {
                        let _ = writeln!(md, "  ({note})");
                    }
                    md.push('\n');
                }
                Outcome::NotEstimable(why) => {
                    let _ = writeln!(md, "Cronbach's alpha: not estimable ({why})\n");
                }
                Outcome::NotApplicable => {}
            }
            if let Some(s) = &c.composite {
                let _ = writeln!(md, "Composite: {:?} over {} respondents\n", s.method, s.scores.len());
            }
        }

        let findings: Vec<&Finding> =
            self.spec_findings.iter().chain(&self.ingest_findings).chain(&self.history_findings).collect();
        if !findings.is_empty() {
            md.push_str("## Findings\n\n");
            for f in findings {
                let _ = writeln!(md, "- {f}");
            }
            md.push('\n');
        }
        md
    }
}

fn num<T: Real>(x: T) -> String {
    format!("{:.4}", x.to_f64().unwrap_or(f64::NAN))
}
