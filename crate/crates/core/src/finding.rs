//! Structured findings shared by spec validation, ingestion and the gate.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

/// Stable, machine-readable reason codes. Serialized in SCREAMING_SNAKE_CASE;
/// downstream scripts key on these strings, so existing names never change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReasonCode {
    // spec validation
    InvalidScale,
    ItemsAndChildren,
    EmptyConstruct,
    ManualWeightsLength,
    ManualWeightsNegative,
    ManualWeightsAllZero,
    ManualWeightsMissing,
    HierarchyCycle,
    MultipleParents,
    BelowItemFloor,
    SingleSource,
    MissingCitation,
    ClassificationMismatch,
    ClassificationAmbiguous,
    // ingestion
    ItemNeverAdministered,
    OutOfRange,
    NonNumeric,
    EmptyCell,
    RespondentDropped,
    // content validity
    CvrBelowCritical,
    NoContentValidItems,
    PanelTooSmall,
    ResearcherRatingWeights,
    // descriptives
    ZeroVariance,
    CeilingEffect,
    FloorEffect,
    OutlierRespondent,
    // collinearity
    VifExceeded,
    CollinearExact,
    VifUndefined,
    VifNotEstimable,
    VifUnreliableSample,
    // reflective branch
    AlphaBelowFloor,
    AlphaNotEstimable,
    // hierarchy
    ChildUnavailable,
    // iteration hygiene
    RespondentReused,
}

impl ReasonCode {
    pub fn as_str(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }
}

impl fmt::Display for ReasonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: ReasonCode,
    pub message: String,
    /// Offending item, construct or respondent ids.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subjects: Vec<String>,
}

impl Finding {
    pub fn new(severity: Severity, code: ReasonCode, message: impl Into<String>) -> Self {
        Finding { severity, code, message: message.into(), subjects: Vec::new() }
    }

    pub fn error(code: ReasonCode, message: impl Into<String>) -> Self {
        Self::new(Severity::Error, code, message)
    }

    pub fn warning(code: ReasonCode, message: impl Into<String>) -> Self {
        Self::new(Severity::Warning, code, message)
    }

    pub fn info(code: ReasonCode, message: impl Into<String>) -> Self {
        Self::new(Severity::Info, code, message)
    }

    pub fn with_subjects<I, S>(mut self, subjects: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.subjects = subjects.into_iter().map(Into::into).collect();
        self
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Info => "INFO",
            Severity::Warning => "WARNING",
            Severity::Error => "ERROR",
        };
        write!(f, "{sev} [{}] {}", self.code, self.message)?;
        if !self.subjects.is_empty() {
            write!(f, " ({})", self.subjects.join(", "))?;
        }
        Ok(())
    }
}
