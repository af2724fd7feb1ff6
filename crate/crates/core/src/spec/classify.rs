//! Reflective/formative decision guide.
//!
//! Priority is causality, then interchangeability, then covariation; a later
//! question is consulted only when every earlier one is inconclusive.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Causality {
    ConstructCausesItems,
    ItemsCauseConstruct,
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
    Unsure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassificationAnswers {
    pub causality: Causality,
    /// Would dropping any single item leave the construct's meaning intact?
    pub items_interchangeable: Answer,
    /// Must responses across items move together?
    pub covariation_necessary: Answer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recommendation {
    Formative,
    Reflective,
    /// Every answer was inconclusive; defer to the construct's definition in
    /// the literature.
    FollowDefinition,
}

pub fn classify_construct(answers: &ClassificationAnswers) -> Recommendation {
    use Recommendation::*;
    match answers.causality {
        Causality::ItemsCauseConstruct => return Formative,
        Causality::ConstructCausesItems => return Reflective,
        Causality::Ambiguous => {}
    }
    match answers.items_interchangeable {
        Answer::No => return Formative,
        Answer::Yes => return Reflective,
        Answer::Unsure => {}
    }
    match answers.covariation_necessary {
        Answer::Yes => Reflective,
        Answer::No => Formative,
        Answer::Unsure => FollowDefinition,
    }
}
