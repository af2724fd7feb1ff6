use std::collections::BTreeSet;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{csv_records, read_text};
use crate::error::{Error, Result};
use crate::finding::{Finding, ReasonCode};
use crate::scalar::Value;
use crate::spec::MeasurementSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleBounds<T> {
    pub min: T,
    pub max: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingReason {
    Empty,
    NonNumeric,
    OutOfRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingCell {
    pub respondent: String,
    pub item: String,
    pub raw: String,
    pub reason: MissingReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    /// Load time; kept out of serialized output so reports stay reproducible.
    #[serde(skip)]
    pub loaded_at_unix: Option<u64>,
}

/// Respondent × item response matrix for one pilot iteration.
///
/// Rows follow file order, columns follow header order. A cell is `None` when
/// the raw value was blank, non-numeric or outside its item's scale; each such
/// cell has a matching entry in [`PilotDataset::missing`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PilotDataset<T> {
    iteration_id: String,
    respondent_ids: Vec<String>,
    items: Vec<String>,
    scales: Vec<ScaleBounds<T>>,
    values: Vec<Vec<Option<T>>>,
    missing: Vec<MissingCell>,
    provenance: Provenance,
}

impl<T: Value> PilotDataset<T> {
    /// Builds a complete dataset from row-major values.
    pub fn new(
        iteration_id: impl Into<String>,
        respondent_ids: Vec<String>,
        items: Vec<String>,
        scales: Vec<ScaleBounds<T>>,
        rows: Vec<Vec<T>>,
    ) -> Result<Self> {
        let values = rows.into_iter().map(|r| r.into_iter().map(Some).collect()).collect();
        Self::from_parts(iteration_id.into(), respondent_ids, items, scales, values, Vec::new(), Provenance::default())
    }

    pub(crate) fn from_parts(
        iteration_id: String,
        respondent_ids: Vec<String>,
        items: Vec<String>,
        scales: Vec<ScaleBounds<T>>,
        values: Vec<Vec<Option<T>>>,
        missing: Vec<MissingCell>,
        provenance: Provenance,
    ) -> Result<Self> {
        if items.len() != scales.len() {
            return Err(Error::InsufficientData(format!("{} items but {} scales", items.len(), scales.len())));
        }
        if values.len() != respondent_ids.len() || values.iter().any(|r| r.len() != items.len()) {
            return Err(Error::InsufficientData("matrix dimensions do not match id lists".into()));
        }
        let mut seen = BTreeSet::new();
        for r in &respondent_ids {
            if !seen.insert(r.as_str()) {
                return Err(Error::DuplicateRespondent(r.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for i in &items {
            if !seen.insert(i.as_str()) {
                return Err(Error::Reference(format!("duplicate item column `{i}`")));
            }
        }
        Ok(PilotDataset { iteration_id, respondent_ids, items, scales, values, missing, provenance })
    }

    pub fn iteration_id(&self) -> &str {
        &self.iteration_id
    }

    pub fn respondent_ids(&self) -> &[String] {
        &self.respondent_ids
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn scales(&self) -> &[ScaleBounds<T>] {
        &self.scales
    }

    pub fn missing(&self) -> &[MissingCell] {
        &self.missing
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn n_respondents(&self) -> usize {
        self.respondent_ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.items.iter().position(|i| i == id)
    }

    pub fn value(&self, respondent: usize, item: usize) -> Option<T> {
        self.values[respondent][item]
    }

    pub fn rows(&self) -> &[Vec<Option<T>>] {
        &self.values
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(|r| r.iter().all(Option::is_some))
    }

    fn missing_cells(&self) -> usize {
        self.values.iter().map(|r| r.iter().filter(|v| v.is_none()).count()).sum()
    }

    /// Full columns for the requested items, in request order.
    pub fn columns(&self, ids: &[&str]) -> Result<Vec<Vec<T>>> {
        let idx = ids
            .iter()
            .map(|id| self.item_index(id).ok_or_else(|| Error::ItemNotInDataset { item: (*id).to_owned() }))
            .collect::<Result<Vec<_>>>()?;
        let mut cols = vec![Vec::with_capacity(self.n_respondents()); idx.len()];
        for row in &self.values {
            for (col, &j) in cols.iter_mut().zip(&idx) {
                col.push(row[j].ok_or_else(|| Error::IncompleteData(self.missing_cells()))?);
            }
        }
        Ok(cols)
    }

    pub fn all_columns(&self) -> Result<Vec<Vec<T>>> {
        let ids: Vec<&str> = self.items.iter().map(String::as_str).collect();
        self.columns(&ids)
    }

    /// Dataset restricted to the given items, in the given order.
    pub fn select_items(&self, ids: &[&str]) -> Result<Self> {
        let idx = ids
            .iter()
            .map(|id| self.item_index(id).ok_or_else(|| Error::ItemNotInDataset { item: (*id).to_owned() }))
            .collect::<Result<Vec<_>>>()?;
        let keep: BTreeSet<&str> = ids.iter().copied().collect();
        Ok(PilotDataset {
            iteration_id: self.iteration_id.clone(),
            respondent_ids: self.respondent_ids.clone(),
            items: idx.iter().map(|&j| self.items[j].clone()).collect(),
            scales: idx.iter().map(|&j| self.scales[j]).collect(),
            values: self.values.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect(),
            missing: self.missing.iter().filter(|m| keep.contains(m.item.as_str())).cloned().collect(),
            provenance: self.provenance.clone(),
        })
    }

    /// Same data with respondent rows reordered by `order` (a permutation).
    pub fn permute_respondents(&self, order: &[usize]) -> Self {
        let mut out = self.clone();
        out.respondent_ids = order.iter().map(|&i| self.respondent_ids[i].clone()).collect();
        out.values = order.iter().map(|&i| self.values[i].clone()).collect();
        out
    }

    /// Writes the dataset as a pilot CSV (`respondent_id` + item columns).
    /// Missing cells are written blank.
    pub fn to_csv(&self) -> String
    where
        T: std::fmt::Display,
    {
        let mut out = String::from("respondent_id");
        for i in &self.items {
            out.push(',');
            out.push_str(i);
        }
        out.push('\n');
        for (id, row) in self.respondent_ids.iter().zip(&self.values) {
            out.push_str(id);
            for v in row {
                out.push(',');
                if let Some(v) = v {
                    out.push_str(&v.to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct PilotLoad<T> {
    pub dataset: PilotDataset<T>,
    /// Schema warnings such as spec items missing from the header.
    pub findings: Vec<Finding>,
}

pub fn load_pilot_csv<T: Value>(
    path: impl AsRef<Path>,
    spec: &MeasurementSpec,
    iteration_id: &str,
) -> Result<PilotLoad<T>> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut load = parse_pilot_csv(&text, &path.display().to_string(), spec, iteration_id)?;
    load.dataset.provenance.loaded_at_unix = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
    Ok(load)
}

pub fn parse_pilot_csv<T: Value>(
    text: &str,
    source: &str,
    spec: &MeasurementSpec,
    iteration_id: &str,
) -> Result<PilotLoad<T>> {
    if text.trim().is_empty() {
        return Err(Error::EmptyFile(source.into()));
    }
    let (header, rows) = csv_records(text, source)?;
    if header.first().map(String::as_str) != Some("respondent_id") {
        return Err(Error::Csv { path: source.into(), message: "first column must be `respondent_id`".into() });
    }
    let item_ids = &header[1..];
    let mut specs = Vec::with_capacity(item_ids.len());
    for id in item_ids {
        let item = spec.item(id).ok_or_else(|| Error::UnknownItem(id.clone()))?;
        specs.push(item);
    }

    let mut findings = Vec::new();
    for item in spec.items() {
        if !item_ids.contains(&item.id) {
            findings.push(
                Finding::warning(ReasonCode::ItemNeverAdministered, format!("item `{}` never administered", item.id))
                    .with_subjects([item.id.as_str()]),
            );
        }
    }

    let mut respondent_ids = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    let mut missing = Vec::new();
    for row in rows {
        let rid = row[0].clone();
        let mut out = Vec::with_capacity(specs.len());
        for (raw, item) in row[1..].iter().zip(&specs) {
            let lo = item.scale_min as f64;
            let hi = item.scale_max as f64;
            let parsed = if raw.is_empty() {
                Err(MissingReason::Empty)
            } else {
                match raw.parse::<f64>() {
                    Ok(v) if !v.is_finite() => Err(MissingReason::NonNumeric),
                    Ok(v) if v < lo || v > hi => Err(MissingReason::OutOfRange),
                    Ok(v) => Ok(if item.reverse_coded { hi + lo - v } else { v }),
                    Err(_) => Err(MissingReason::NonNumeric),
                }
            };
            match parsed {
                Ok(v) => out.push(Some(T::from_f64_lossy(v))),
                Err(reason) => {
                    missing.push(MissingCell { respondent: rid.clone(), item: item.id.clone(), raw: raw.clone(), reason });
                    out.push(None);
                }
            }
        }
        respondent_ids.push(rid);
        values.push(out);
    }
    if respondent_ids.is_empty() {
        return Err(Error::EmptyFile(source.into()));
    }
    for m in &missing {
        let f = match m.reason {
            MissingReason::Empty => Finding::info(ReasonCode::EmptyCell, format!("blank response from `{}`", m.respondent)),
            MissingReason::NonNumeric => Finding::warning(
                ReasonCode::NonNumeric,
                format!("non-numeric response `{}` from `{}` treated as missing", m.raw, m.respondent),
            ),
            MissingReason::OutOfRange => Finding::warning(
                ReasonCode::OutOfRange,
                format!("response `{}` from `{}` is outside the item scale; treated as missing", m.raw, m.respondent),
            ),
        };
        findings.push(f.with_subjects([m.respondent.as_str(), m.item.as_str()]));
    }

    let scales = specs
        .iter()
        .map(|i| ScaleBounds { min: T::from_f64_lossy(i.scale_min as f64), max: T::from_f64_lossy(i.scale_max as f64) })
        .collect();
    let dataset = PilotDataset::from_parts(
        iteration_id.to_owned(),
        respondent_ids,
        item_ids.to_vec(),
        scales,
        values,
        missing,
        Provenance { source: source.to_owned(), loaded_at_unix: None },
    )?;
    Ok(PilotLoad { dataset, findings })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// Drop every respondent with at least one missing cell.
    #[default]
    Listwise,
    /// Refuse to continue when any cell is missing.
    Error,
}

/// Returns the cleaned dataset and the ids of dropped respondents.
pub fn apply_missing_policy<T: Value>(
    ds: &PilotDataset<T>,
    policy: MissingPolicy,
) -> Result<(PilotDataset<T>, Vec<String>)> {
    match policy {
        MissingPolicy::Error => {
            for (rid, row) in ds.respondent_ids.iter().zip(&ds.values) {
                if let Some(j) = row.iter().position(Option::is_none) {
                    return Err(Error::MissingCell { respondent: rid.clone(), item: ds.items[j].clone() });
                }
            }
            let mut out = ds.clone();
            out.missing.clear();
            Ok((out, Vec::new()))
        }
        MissingPolicy::Listwise => {
            let mut out = ds.clone();
            out.respondent_ids.clear();
            out.values.clear();
            out.missing.clear();
            let mut dropped = Vec::new();
            for (rid, row) in ds.respondent_ids.iter().zip(&ds.values) {
                if row.iter().all(Option::is_some) {
                    out.respondent_ids.push(rid.clone());
                    out.values.push(row.clone());
                } else {
                    dropped.push(rid.clone());
                }
            }
            Ok((out, dropped))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::fixtures::formative;
    use proptest::prelude::*;

    fn spec() -> MeasurementSpec {
        MeasurementSpec { title: String::new(), constructs: vec![formative("q", 5)] }
    }

    fn csv_of(rows: &[[&str; 5]]) -> String {
        let mut s = String::from("respondent_id,q1,q2,q3,q4,q5\n");
        for (k, r) in rows.iter().enumerate() {
            s.push_str(&format!("r{k},{}\n", r.join(",")));
        }
        s
    }

    #[test]
    fn clean_load() {
        let rows: Vec<[&str; 5]> = (0..10).map(|_| ["1", "2", "3", "4", "5"]).collect();
        let load = parse_pilot_csv::<f64>(&csv_of(&rows), "mem", &spec(), "it1").unwrap();
        assert_eq!((load.dataset.n_respondents(), load.dataset.n_items()), (10, 5));
        assert!(load.dataset.is_complete());
        assert!(load.findings.is_empty());
        assert_eq!(load.dataset.value(3, 4), Some(5.0));
    }

    #[test]
    fn out_of_range_and_junk_become_missing() {
        let rows = [["1", "7", "3", "x", ""]];
        let ds = parse_pilot_csv::<f64>(&csv_of(&rows), "mem", &spec(), "it1").unwrap().dataset;
        let reasons: Vec<_> = ds.missing().iter().map(|m| (m.item.as_str(), m.reason)).collect();
        assert_eq!(
            reasons,
            [("q2", MissingReason::OutOfRange), ("q4", MissingReason::NonNumeric), ("q5", MissingReason::Empty)]
        );
        assert_eq!(ds.value(0, 1), None);
    }

    #[test]
    fn schema_errors() {
        let s = spec();
        let unknown = "respondent_id,q1,zz\nr1,1,2\n";
        assert!(matches!(parse_pilot_csv::<f64>(unknown, "m", &s, "i"), Err(Error::UnknownItem(c)) if c == "zz"));
        let dup = "respondent_id,q1\nr1,1\nr1,2\n";
        assert!(matches!(parse_pilot_csv::<f64>(dup, "m", &s, "i"), Err(Error::DuplicateRespondent(_))));
        assert!(matches!(parse_pilot_csv::<f64>("", "m", &s, "i"), Err(Error::EmptyFile(_))));
        assert!(matches!(
            parse_pilot_csv::<f64>("respondent_id,q1\n", "m", &s, "i"),
            Err(Error::EmptyFile(_))
        ));
    }

    #[test]
    fn missing_header_item_is_warned() {
        let text = "respondent_id,q1,q2,q3,q4\nr1,1,2,3,4\n";
        let load = parse_pilot_csv::<f64>(text, "m", &spec(), "i").unwrap();
        assert_eq!(load.findings.len(), 1);
        assert_eq!(load.findings[0].code, ReasonCode::ItemNeverAdministered);
        assert!(load.findings[0].message.contains("never administered"));
    }

    #[test]
    fn reverse_coded_items_are_remapped() {
        let mut s = spec();
        s.constructs[0].items[0].reverse_coded = true;
        let ds = parse_pilot_csv::<f64>("respondent_id,q1\nr1,2\nr2,5\n", "m", &s, "i").unwrap().dataset;
        assert_eq!(ds.columns(&["q1"]).unwrap()[0], [4.0, 1.0]);
    }

    #[test]
    fn listwise_drops_and_reports() {
        let mut rows: Vec<[&str; 5]> = (0..10).map(|_| ["1", "2", "3", "4", "5"]).collect();
        let ds = parse_pilot_csv::<f64>(&csv_of(&rows), "m", &spec(), "i").unwrap().dataset;
        let (same, dropped) = apply_missing_policy(&ds, MissingPolicy::Listwise).unwrap();
        assert_eq!(same, ds);
        assert!(dropped.is_empty());

        rows[6][2] = "";
        let ds = parse_pilot_csv::<f64>(&csv_of(&rows), "m", &spec(), "i").unwrap().dataset;
        let (clean, dropped) = apply_missing_policy(&ds, MissingPolicy::Listwise).unwrap();
        assert_eq!(clean.n_respondents(), 9);
        assert_eq!(dropped, ["r6"]);
        assert!(clean.is_complete() && clean.missing().is_empty());

        match apply_missing_policy(&ds, MissingPolicy::Error) {
            Err(Error::MissingCell { respondent, item }) => assert_eq!((respondent.as_str(), item.as_str()), ("r6", "q3")),
            other => panic!("expected missing-cell error, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn listwise_output_is_complete_and_ordered(cells in prop::collection::vec(prop::collection::vec(0u8..7, 5), 1..30)) {
            let mut text = String::from("respondent_id,q1,q2,q3,q4,q5\n");
            for (k, row) in cells.iter().enumerate() {
                let vals: Vec<String> = row.iter().map(|&v| if v == 0 { String::new() } else { v.to_string() }).collect();
                text.push_str(&format!("r{k},{}\n", vals.join(",")));
            }
            let ds = parse_pilot_csv::<f64>(&text, "m", &spec(), "i").unwrap().dataset;
            let again = parse_pilot_csv::<f64>(&text, "m", &spec(), "i").unwrap().dataset;
            prop_assert_eq!(&ds, &again);
            let (clean, dropped) = apply_missing_policy(&ds, MissingPolicy::Listwise).unwrap();
            prop_assert!(clean.is_complete());
            prop_assert_eq!(clean.n_respondents() + dropped.len(), ds.n_respondents());
            let kept: Vec<&String> = ds.respondent_ids().iter().filter(|r| !dropped.contains(r)).collect();
            prop_assert_eq!(kept, clean.respondent_ids().iter().collect::<Vec<_>>());
        }
    }
}
