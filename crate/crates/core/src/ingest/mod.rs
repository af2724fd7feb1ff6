//! Pilot response and SME rating ingestion.

mod pilot;
mod sme;

pub use pilot::{
    apply_missing_policy, load_pilot_csv, parse_pilot_csv, MissingCell, MissingPolicy, MissingReason, PilotDataset,
    PilotLoad, Provenance, ScaleBounds,
};
pub use sme::{load_sme_ratings, parse_sme_csv, Category, Judgment, RatingMode, SmeRatingSet};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_text(path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim().is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    Ok(text)
}

pub(crate) fn csv_records(text: &str, source: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| Error::Csv { path: source.into(), message: e.to_string() };
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        rows.push(rec.iter().map(str::to_owned).collect());
    }
    Ok((header, rows))
}
