use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{classify_construct, MeasurementSpec, ModelType, Recommendation, WeightSource};
use crate::finding::{Finding, ReasonCode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    /// Minimum number of items per item-level construct before a warning.
    pub item_floor: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions { item_floor: 5 }
    }
}

/// Structural errors and methodological warnings for a parsed spec.
///
/// Findings come out in construct declaration order, then hierarchy-level
/// findings last, so repeated calls on the same spec are identical.
pub fn validate_spec(spec: &MeasurementSpec, opts: &ValidationOptions) -> Vec<Finding> {
    let mut out = Vec::new();

    for c in &spec.constructs {
        for item in &c.items {
            if item.scale_min >= item.scale_max {
                out.push(
                    Finding::error(
                        ReasonCode::InvalidScale,
                        format!(
                            "item `{}` has scale_min {} >= scale_max {}",
                            item.id, item.scale_min, item.scale_max
                        ),
                    )
                    .with_subjects([item.id.as_str()]),
                );
            }
        }

        match (c.items.is_empty(), c.children.is_empty()) {
            (false, false) => out.push(
                Finding::error(
                    ReasonCode::ItemsAndChildren,
                    format!("construct `{}` lists both items and child constructs", c.id),
                )
                .with_subjects([c.id.as_str()]),
            ),
            (true, true) => out.push(
                Finding::error(ReasonCode::EmptyConstruct, format!("construct `{}` has no indicators", c.id))
                    .with_subjects([c.id.as_str()]),
            ),
            _ => {}
        }

        let n_indicators = c.indicator_ids().len();
        match (&c.manual_weights, c.weight_source) {
            (None, WeightSource::Manual) => out.push(
                Finding::error(
                    ReasonCode::ManualWeightsMissing,
                    format!("construct `{}` uses manual weights but declares none", c.id),
                )
                .with_subjects([c.id.as_str()]),
            ),
            (Some(w), _) => {
                if w.len() != n_indicators {
                    out.push(
                        Finding::error(
                            ReasonCode::ManualWeightsLength,
                            format!(
                                "construct `{}` has {} manual weights for {} indicators",
                                c.id,
                                w.len(),
                                n_indicators
                            ),
                        )
                        .with_subjects([c.id.as_str()]),
                    );
                }
                if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    out.push(
                        Finding::error(
                            ReasonCode::ManualWeightsNegative,
                            format!("construct `{}` has a negative or non-finite manual weight", c.id),
                        )
                        .with_subjects([c.id.as_str()]),
                    );
                } else if w.iter().all(|x| *x == 0.0) {
                    out.push(
                        Finding::error(
                            ReasonCode::ManualWeightsAllZero,
                            format!("construct `{}` has all-zero manual weights", c.id),
                        )
                        .with_subjects([c.id.as_str()]),
                    );
                }
            }
            _ => {}
        }

        if !c.items.is_empty() && c.items.len() < opts.item_floor {
            out.push(
                Finding::warning(
                    ReasonCode::BelowItemFloor,
                    format!("construct `{}` has {} items, below item floor {}", c.id, c.items.len(), opts.item_floor),
                )
                .with_subjects([c.id.as_str()]),
            );
        }

        if c.model == ModelType::Formative && c.items.len() >= 2 {
            let sources: BTreeSet<&str> = c.items.iter().map(|i| i.citation.trim()).collect();
            if sources.len() == 1 && !sources.contains("") {
                out.push(
                    Finding::warning(
                        ReasonCode::SingleSource,
                        format!("all items of formative construct `{}` cite a single source", c.id),
                    )
                    .with_subjects([c.id.as_str()]),
                );
            }
        }

        let uncited: Vec<&str> =
            c.items.iter().filter(|i| i.citation.trim().is_empty()).map(|i| i.id.as_str()).collect();
        if !uncited.is_empty() {
            out.push(
                Finding::warning(
                    ReasonCode::MissingCitation,
                    format!("construct `{}` has {} item(s) without a citation", c.id, uncited.len()),
                )
                .with_subjects(uncited),
            );
        }

        if let Some(answers) = &c.classification {
            let declared = match c.model {
                ModelType::Formative => Recommendation::Formative,
                ModelType::Reflective => Recommendation::Reflective,
            };
            match classify_construct(answers) {
                Recommendation::FollowDefinition => out.push(
                    Finding::info(
                        ReasonCode::ClassificationAmbiguous,
                        format!(
                            "classification guide is inconclusive for `{}`; the declared {:?} model follows the construct definition",
                            c.id, c.model
                        ),
                    )
                    .with_subjects([c.id.as_str()]),
                ),
                r if r != declared => out.push(
                    Finding::warning(
                        ReasonCode::ClassificationMismatch,
                        format!("construct `{}` is declared {:?} but the classification guide suggests {:?}", c.id, c.model, r),
                    )
                    .with_subjects([c.id.as_str()]),
                ),
                _ => {}
            }
        }
    }

    for c in &spec.constructs {
        let parents = spec.parents_of(&c.id);
        if parents.len() > 1 {
            out.push(
                Finding::error(
                    ReasonCode::MultipleParents,
                    format!("construct `{}` has {} parents: {}", c.id, parents.len(), parents.join(", ")),
                )
                .with_subjects([c.id.as_str()]),
            );
        }
    }

    if spec.evaluation_order().is_none() {
        let cyclic = cycle_members(spec);
        out.push(
            Finding::error(ReasonCode::HierarchyCycle, "hierarchy cycle among child links".to_string())
                .with_subjects(cyclic),
        );
    }

    out
}

/// Constructs left over once every construct reachable from a leaf is peeled off.
fn cycle_members(spec: &MeasurementSpec) -> Vec<String> {
    let mut resolved: BTreeSet<&str> = BTreeSet::new();
    loop {
        let before = resolved.len();
        for c in &spec.constructs {
            if c.children.iter().all(|ch| resolved.contains(ch.as_str())) {
                resolved.insert(&c.id);
            }
        }
        if resolved.len() == before {
            break;
        }
    }
    spec.constructs.iter().filter(|c| !resolved.contains(c.id.as_str())).map(|c| c.id.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::fixtures::{construct, formative, item};
    use crate::spec::{Answer, Causality, ClassificationAnswers};

    fn spec_of(constructs: Vec<crate::spec::ConstructSpec>) -> MeasurementSpec {
        MeasurementSpec { title: String::new(), constructs }
    }

    fn codes(f: &[Finding]) -> Vec<ReasonCode> {
        f.iter().map(|x| x.code).collect()
    }

    #[test]
    fn five_cited_items_have_no_findings() {
        let spec = spec_of(vec![formative("a", 5)]);
        assert!(validate_spec(&spec, &ValidationOptions::default()).is_empty());
    }

    #[test]
    fn three_items_warn_below_floor() {
        let spec = spec_of(vec![formative("a", 3)]);
        let f = validate_spec(&spec, &ValidationOptions::default());
        assert_eq!(codes(&f), [ReasonCode::BelowItemFloor]);
        assert!(f[0].message.contains("below item floor 5"));
        assert!(validate_spec(&spec, &ValidationOptions { item_floor: 3 }).is_empty());
    }

    #[test]
    fn cyclic_children_are_an_error() {
        let mut a = construct("a", ModelType::Formative, vec![]);
        let mut b = construct("b", ModelType::Formative, vec![]);
        a.children = vec!["b".into()];
        b.children = vec!["a".into()];
        let spec = spec_of(vec![formative("leaf", 5), a, b]);
        let f = validate_spec(&spec, &ValidationOptions::default());
        let cycle = f.iter().find(|x| x.code == ReasonCode::HierarchyCycle).unwrap();
        assert_eq!(cycle.subjects, ["a", "b"]);
        assert!(cycle.message.contains("hierarchy cycle"));
    }

    #[test]
    fn structural_errors() {
        let mut both = formative("x", 5);
        both.children = vec!["y".into()];
        let mut bad_w = formative("y", 5);
        bad_w.manual_weights = Some(vec![1.0, -1.0]);
        let mut zero_w = formative("z", 5);
        zero_w.manual_weights = Some(vec![0.0; 5]);
        let mut missing = formative("m", 5);
        missing.weight_source = WeightSource::Manual;
        let mut scale = formative("s", 5);
        scale.items[2].scale_max = 1;
        let mut other = construct("o", ModelType::Formative, vec![]);
        other.children = vec!["y".into()];
        let spec = spec_of(vec![both, bad_w, zero_w, missing, scale, other]);
        let got = codes(&validate_spec(&spec, &ValidationOptions::default()));
        for want in [
            ReasonCode::ItemsAndChildren,
            ReasonCode::ManualWeightsLength,
            ReasonCode::ManualWeightsNegative,
            ReasonCode::ManualWeightsAllZero,
            ReasonCode::ManualWeightsMissing,
            ReasonCode::InvalidScale,
            ReasonCode::MultipleParents,
        ] {
            assert!(got.contains(&want), "missing {want:?} in {got:?}");
        }
    }

    #[test]
    fn citation_warnings() {
        let items = (1..=5).map(|k| item(&format!("q{k}"), "Same (2020)")).collect();
        let single = construct("single", ModelType::Formative, items);
        let mut uncited = formative("u", 5);
        uncited.items[1].citation.clear();
        let spec = spec_of(vec![single, uncited]);
        let f = validate_spec(&spec, &ValidationOptions::default());
        assert_eq!(codes(&f), [ReasonCode::SingleSource, ReasonCode::MissingCitation]);
        assert_eq!(f[1].subjects, ["u2"]);
    }

    #[test]
    fn classification_disagreement_is_flagged() {
        let mut c = formative("a", 5);
        c.classification = Some(ClassificationAnswers {
            causality: Causality::ConstructCausesItems,
            items_interchangeable: Answer::Unsure,
            covariation_necessary: Answer::Unsure,
        });
        let f = validate_spec(&spec_of(vec![c.clone()]), &ValidationOptions::default());
        assert_eq!(codes(&f), [ReasonCode::ClassificationMismatch]);
        c.classification.as_mut().unwrap().causality = Causality::Ambiguous;
        let f = validate_spec(&spec_of(vec![c]), &ValidationOptions::default());
        assert_eq!(codes(&f), [ReasonCode::ClassificationAmbiguous]);
    }

    #[test]
    fn validation_is_deterministic_and_pure() {
        let mut spec = spec_of(vec![formative("a", 3), formative("b", 2)]);
        spec.constructs[1].items[0].citation.clear();
        let copy = spec.clone();
        let first = validate_spec(&spec, &ValidationOptions::default());
        let second = validate_spec(&spec, &ValidationOptions::default());
        assert_eq!(first, second);
        assert_eq!(spec, copy);
    }
}
