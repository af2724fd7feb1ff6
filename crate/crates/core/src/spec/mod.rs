//! Measurement-model specification.
//!
//! Specs are TOML documents. Each `[[constructs]]` table lists either its
//! `[[constructs.items]]` or the ids of its `children` (higher-order
//! constructs), never both. Parent links are not written in the file; they are
//! materialized from the `children` lists when the document is parsed.
//!
//! ```toml
//! title = "Service quality instrument"
//!
//! [[constructs]]
//! id = "reliability"
//! name = "Service reliability"
//! model = "formative"
//! weight_source = "cvr"
//!
//! [[constructs.items]]
//! id = "rel1"
//! prompt = "Orders arrive on the promised date."
//! scale_min = 1
//! scale_max = 5
//! source_kind = "definitional"
//! citation = "Parasuraman et al. (1988)"
//! ```

mod classify;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use classify::{classify_construct, Answer, Causality, ClassificationAnswers, Recommendation};
pub use validate::{validate_spec, ValidationOptions};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// The cited work defines the construct and its aspects.
    Definitional,
    /// The cited work supplies the item wording itself.
    Mirror,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelType {
    Formative,
    Reflective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    Cvr,
    ResearcherRating,
    Manual,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemSpec {
    pub id: String,
    #[serde(default)]
    pub prompt: String,
    pub scale_min: i64,
    pub scale_max: i64,
    pub source_kind: SourceKind,
    #[serde(default)]
    pub citation: String,
    /// Responses are remapped `v -> scale_max + scale_min - v` at ingestion.
    #[serde(default, skip_serializing_if = "is_false")]
    pub reverse_coded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructSpec {
    pub id: String,
    #[serde(default)]
    pub name: String,
    pub model: ModelType,
    pub weight_source: WeightSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manual_weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationAnswers>,
    /// Free-text notes (e.g. face-validity feedback), passed through to reports.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub items: Vec<ItemSpec>,
    #[serde(skip)]
    pub parent: Option<String>,
}

impl ConstructSpec {
    pub fn is_higher_order(&self) -> bool {
        !self.children.is_empty()
    }

    /// Ids of this construct's indicators: its items, or its child constructs.
    pub fn indicator_ids(&self) -> Vec<&str> {
        if self.items.is_empty() {
            self.children.iter().map(String::as_str).collect()
        } else {
            self.items.iter().map(|i| i.id.as_str()).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSpec {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub title: String,
    pub constructs: Vec<ConstructSpec>,
}

impl MeasurementSpec {
    pub fn construct(&self, id: &str) -> Option<&ConstructSpec> {
        self.constructs.iter().find(|c| c.id == id)
    }

    pub fn item(&self, id: &str) -> Option<&ItemSpec> {
        self.items().find(|i| i.id == id)
    }

    /// All items in declaration order.
    pub fn items(&self) -> impl Iterator<Item = &ItemSpec> {
        self.constructs.iter().flat_map(|c| c.items.iter())
    }

    /// Every construct id that lists `id` among its children.
    pub fn parents_of(&self, id: &str) -> Vec<&str> {
        self.constructs
            .iter()
            .filter(|c| c.children.iter().any(|ch| ch == id))
            .map(|c| c.id.as_str())
            .collect()
    }

    /// Constructs ordered so that every child precedes its parent; ties keep
    /// declaration order. Returns `None` when the hierarchy has a cycle.
    pub fn evaluation_order(&self) -> Option<Vec<&ConstructSpec>> {
        let mut done: BTreeSet<&str> = BTreeSet::new();
        let mut order = Vec::with_capacity(self.constructs.len());
        while order.len() < self.constructs.len() {
            let before = order.len();
            for c in &self.constructs {
                if done.contains(c.id.as_str()) {
                    continue;
                }
                if c.children.iter().all(|ch| done.contains(ch.as_str())) {
                    done.insert(&c.id);
                    order.push(c);
                }
            }
            if order.len() == before {
                return None;
            }
        }
        Some(order)
    }

    /// Number of levels in the deepest chain (a flat spec has depth 1).
    pub fn depth(&self) -> Option<usize> {
        let order = self.evaluation_order()?;
        let mut level: BTreeMap<&str, usize> = BTreeMap::new();
        for c in order {
            let d = 1 + c.children.iter().map(|ch| level[ch.as_str()]).max().unwrap_or(0);
            level.insert(&c.id, d);
        }
        level.values().copied().max()
    }

    /// SHA-256 over the canonical TOML serialization.
    pub fn content_hash(&self) -> String {
        let doc = serialize_spec(self).unwrap_or_default();
        let digest = Sha256::digest(doc.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn parse_spec(document: &str) -> Result<MeasurementSpec> {
    let mut spec: MeasurementSpec = toml::from_str(document)
        .map_err(|e| Error::Syntax { what: "spec".into(), message: e.to_string() })?;
    resolve_links(&mut spec)?;
    Ok(spec)
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<MeasurementSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spec(&text)
}

pub fn serialize_spec(spec: &MeasurementSpec) -> Result<String> {
    toml::to_string(spec).map_err(|e| Error::Syntax { what: "spec".into(), message: e.to_string() })
}

fn resolve_links(spec: &mut MeasurementSpec) -> Result<()> {
    let mut ids = BTreeSet::new();
    for c in &spec.constructs {
        if !ids.insert(c.id.clone()) {
            return Err(Error::Reference(format!("duplicate construct id `{}`", c.id)));
        }
    }
    let mut items = BTreeSet::new();
    for item in spec.items() {
        if ids.contains(&item.id) {
            return Err(Error::Reference(format!("item id `{}` collides with a construct id", item.id)));
        }
        if !items.insert(item.id.clone()) {
            return Err(Error::Reference(format!("duplicate item id `{}`", item.id)));
        }
    }
    let mut parent_of: BTreeMap<String, String> = BTreeMap::new();
    for c in &spec.constructs {
        for child in &c.children {
            if !ids.contains(child) {
                return Err(Error::Reference(format!(
                    "construct `{}` lists unknown child `{child}`",
                    c.id
                )));
            }
            parent_of.entry(child.clone()).or_insert_with(|| c.id.clone());
        }
    }
    for c in &mut spec.constructs {
        c.parent = parent_of.get(&c.id).cloned();
    }
    Ok(())
}
