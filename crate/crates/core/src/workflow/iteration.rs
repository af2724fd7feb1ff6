//! Project history: one JSON record per analysed pilot iteration.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finding::{Finding, ReasonCode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration_id: String,
    pub respondent_ids: BTreeSet<String>,
    pub spec_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_path: Option<String>,
}

/// One warning per respondent id that already appeared in an earlier
/// iteration. Reusing an iteration id is an error.
pub fn check_iteration_overlap(current: &IterationRecord, history: &[IterationRecord]) -> Result<Vec<Finding>> {
    if history.iter().any(|h| h.iteration_id == current.iteration_id) {
        return Err(Error::DuplicateIteration(current.iteration_id.clone()));
    }
    Ok(current
        .respondent_ids
        .iter()
        .filter_map(|id| {
            let seen: Vec<&str> = history
                .iter()
                .filter(|h| h.respondent_ids.contains(id))
                .map(|h| h.iteration_id.as_str())
                .collect();
            (!seen.is_empty()).then(|| {
                Finding::warning(
                    ReasonCode::RespondentReused,
                    format!("respondent `{id}` also answered iteration(s) {}", seen.join(", ")),
                )
                .with_subjects(vec![id.clone()])
            })
        })
        .collect())
}

/// Reads every `*.json` record in `dir`, sorted by iteration id. A missing
/// directory is an empty history.
pub fn load_history(dir: impl AsRef<Path>) -> Result<Vec<IterationRecord>> {
    let dir = dir.as_ref();
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "json") {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            out.push(serde_json::from_str::<IterationRecord>(&text)?);
        }
    }
    out.sort_by(|a, b| a.iteration_id.cmp(&b.iteration_id));
    Ok(out)
}

pub fn save_record(dir: impl AsRef<Path>, record: &IterationRecord) -> Result<PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(format!("{}.json", record.iteration_id));
    if path.exists() {
        return Err(Error::DuplicateIteration(record.iteration_id.clone()));
    }
    let text = serde_json::to_string_pretty(record)? + "\n";
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, resp: &[&str]) -> IterationRecord {
        IterationRecord {
            iteration_id: id.into(),
            respondent_ids: resp.iter().map(|s| s.to_string()).collect(),
            spec_hash: "h".into(),
            report_path: None,
        }
    }

    #[test]
    fn one_warning_per_shared_id() {
        let hist = [record("it1", &["a", "b", "c"]), record("it2", &["b", "d"])];
        let f = check_iteration_overlap(&record("it3", &["b", "c", "e"]), &hist).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].subjects, ["b"]);
        assert!(f[0].message.contains("it1, it2"));
        assert_eq!(f[1].subjects, ["c"]);
    }

    #[test]
    fn reused_iteration_id_is_rejected() {
        let hist = [record("it1", &["a"])];
        assert!(matches!(check_iteration_overlap(&record("it1", &["z"]), &hist), Err(Error::DuplicateIteration(_))));
    }

    #[test]
    fn history_round_trips_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        save_record(dir.path(), &record("b", &["x"])).unwrap();
        save_record(dir.path(), &record("a", &["y"])).unwrap();
        assert!(save_record(dir.path(), &record("a", &["y"])).is_err());
        let h = load_history(dir.path()).unwrap();
        assert_eq!(h.iter().map(|r| r.iteration_id.as_str()).collect::<Vec<_>>(), ["a", "b"]);
        assert!(load_history(dir.path().join("absent")).unwrap().is_empty());
    }
}
