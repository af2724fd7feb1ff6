#![allow(dead_code)]

use std::path::PathBuf;

use formval::config::Config;
use formval::ingest::{PilotDataset, ScaleBounds};
use formval::spec::{parse_spec, MeasurementSpec};
use formval::workflow::{load_history, PipelineInputs};

pub fn demo_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../demo")
}

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/demo_report.json")
}

/// The same inputs the CLI assembles for
/// `--config demo/config.toml --iteration pilot-2 report --spec ... --sme ... --history demo/history`.
pub fn demo_inputs() -> PipelineInputs {
    let dir = demo_dir();
    let read = |name: &str| std::fs::read_to_string(dir.join(name)).unwrap();
    PipelineInputs {
        iteration_id: "pilot-2".into(),
        spec_toml: read("spec.toml"),
        config: Config::load(dir.join("config.toml")).unwrap(),
        pilot_source: "pilot.csv".into(),
        pilot_csv: read("pilot.csv"),
        sme_csv: Some(read("sme.csv")),
        researcher_csv: None,
        history: load_history(dir.join("history")).unwrap(),
    }
}

/// Spec text with one item construct per `(id, model, n_items, scale_max)`.
pub fn spec_text(constructs: &[(&str, &str, usize, i64)]) -> String {
    let mut s = String::new();
    for (id, model, k, hi) in constructs {
        s += &format!("[[constructs]]\nid = \"{id}\"\nmodel = \"{model}\"\nweight_source = \"cvr\"\n");
        for j in 1..=*k {
            s += &format!(
                "[[constructs.items]]\nid = \"{id}{j}\"\nscale_min = 1\nscale_max = {hi}\nsource_kind = \"mirror\"\ncitation = \"Source {j}\"\n"
            );
        }
    }
    s
}

pub fn spec(constructs: &[(&str, &str, usize, i64)]) -> MeasurementSpec {
    parse_spec(&spec_text(constructs)).unwrap()
}

/// Complete dataset from columns; items are named `{prefix}1..`.
pub fn dataset(prefix: &str, cols: &[Vec<f64>], lo: f64, hi: f64) -> PilotDataset<f64> {
    let n = cols[0].len();
    PilotDataset::new(
        "t",
        (0..n).map(|r| format!("r{r:03}")).collect(),
        (1..=cols.len()).map(|j| format!("{prefix}{j}")).collect(),
        vec![ScaleBounds { min: lo, max: hi }; cols.len()],
        (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect(),
    )
    .unwrap()
}
