use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{csv_records, read_text};
use crate::error::{Error, Result};
use crate::spec::MeasurementSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatingMode {
    /// Three-category essentiality judgments (`mode=cvr3`).
    Cvr3,
    /// Integer scores 1 (not essential) .. 5 (essential) (`mode=scale5`).
    Scale5,
}

impl RatingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RatingMode::Cvr3 => "cvr3",
            RatingMode::Scale5 => "scale5",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Essential,
    UsefulNotEssential,
    NotNecessary,
}

impl Category {
    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "essential" | "e" => Some(Category::Essential),
            "useful_not_essential" | "useful" | "u" => Some(Category::UsefulNotEssential),
            "not_necessary" | "n" => Some(Category::NotNecessary),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Essential => "essential",
            Category::UsefulNotEssential => "useful_not_essential",
            Category::NotNecessary => "not_necessary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Judgment {
    Category(Category),
    Score(u8),
}

/// Rater × item judgments in a single, file-declared mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmeRatingSet {
    mode: RatingMode,
    rater_ids: Vec<String>,
    items: Vec<String>,
    judgments: Vec<Vec<Judgment>>,
}

impl SmeRatingSet {
    pub fn new(mode: RatingMode, rater_ids: Vec<String>, items: Vec<String>, judgments: Vec<Vec<Judgment>>) -> Result<Self> {
        if judgments.len() != rater_ids.len() || judgments.iter().any(|r| r.len() != items.len()) {
            return Err(Error::InsufficientData("judgment matrix does not match id lists".into()));
        }
        let mut seen = BTreeSet::new();
        for r in &rater_ids {
            if !seen.insert(r.as_str()) {
                return Err(Error::DuplicateRater(r.clone()));
            }
        }
        for row in &judgments {
            for j in row {
                let ok = match (mode, j) {
                    (RatingMode::Cvr3, Judgment::Category(_)) => true,
                    (RatingMode::Scale5, Judgment::Score(s)) => (1..=5).contains(s),
                    _ => false,
                };
                if !ok {
                    return Err(Error::MixedModes(format!("{j:?} in a {} rating set", mode.as_str())));
                }
            }
        }
        if mode == RatingMode::Cvr3 && rater_ids.len() < 2 {
            return Err(Error::TooFewRaters(rater_ids.len()));
        }
        Ok(SmeRatingSet { mode, rater_ids, items, judgments })
    }

    pub fn mode(&self) -> RatingMode {
        self.mode
    }

    pub fn rater_ids(&self) -> &[String] {
        &self.rater_ids
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn judgments(&self) -> &[Vec<Judgment>] {
        &self.judgments
    }

    pub fn n_raters(&self) -> usize {
        self.rater_ids.len()
    }

    /// Column of judgments for one item.
    pub fn item_column(&self, j: usize) -> impl Iterator<Item = Judgment> + '_ {
        self.judgments.iter().map(move |r| r[j])
    }

    /// Pilot-CSV-like text with the mode header line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# mode={}\nrater_id", self.mode.as_str());
        for i in &self.items {
            out.push(',');
            out.push_str(i);
        }
        out.push('\n');
        for (id, row) in self.rater_ids.iter().zip(&self.judgments) {
            out.push_str(id);
            for j in row {
                out.push(',');
                match j {
                    Judgment::Category(c) => out.push_str(c.as_str()),
                    Judgment::Score(s) => out.push_str(&s.to_string()),
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn load_sme_ratings(path: impl AsRef<Path>, spec: &MeasurementSpec) -> Result<SmeRatingSet> {
    let path = path.as_ref();
    let text = read_text(path)?;
    parse_sme_csv(&text, &path.display().to_string(), spec)
}

/// Parses an SME CSV. The first non-blank line must be a comment declaring
/// the mode, e.g. `# mode=cvr3`. Columns may name items or construct ids
/// (the latter rate child constructs of a higher-order construct) and are
/// reordered to spec declaration order.
pub fn parse_sme_csv(text: &str, source: &str, spec: &MeasurementSpec) -> Result<SmeRatingSet> {
    let mut lines = text.lines().skip_while(|l| l.trim().is_empty());
    let first = lines.next().ok_or_else(|| Error::EmptyFile(source.into()))?;
    let mode = parse_mode_line(first)?;
    let body: Vec<&str> = lines.collect();
    let body = body.join("\n");
    if body.trim().is_empty() {
        return Err(Error::EmptyFile(source.into()));
    }
    let (header, rows) = csv_records(&body, source)?;
    if header.first().map(String::as_str) != Some("rater_id") {
        return Err(Error::Csv { path: source.into(), message: "first column must be `rater_id`".into() });
    }

    let spec_order: Vec<&str> =
        spec.items().map(|i| i.id.as_str()).chain(spec.constructs.iter().map(|c| c.id.as_str())).collect();
    let file_items = &header[1..];
    let mut seen = BTreeSet::new();
    for id in file_items {
        if !spec_order.contains(&id.as_str()) {
            return Err(Error::UnknownItem(id.clone()));
        }
        if !seen.insert(id.as_str()) {
            return Err(Error::Csv { path: source.into(), message: format!("duplicate column `{id}`") });
        }
    }
    let order: Vec<usize> = spec_order
        .iter()
        .filter_map(|id| file_items.iter().position(|f| f == id))
        .collect();

    let mut rater_ids = Vec::with_capacity(rows.len());
    let mut judgments = Vec::with_capacity(rows.len());
    for row in rows {
        let cells = &row[1..];
        let mut out = Vec::with_capacity(order.len());
        for &j in &order {
            out.push(parse_judgment(mode, &cells[j], &row[0], &file_items[j], source)?);
        }
        rater_ids.push(row[0].clone());
        judgments.push(out);
    }
    let items = order.iter().map(|&j| file_items[j].clone()).collect();
    SmeRatingSet::new(mode, rater_ids, items, judgments)
}

fn parse_mode_line(line: &str) -> Result<RatingMode> {
    let rest = line.trim().strip_prefix('#').ok_or(Error::MissingMode)?;
    for token in rest.split(|c: char| c.is_whitespace() || c == ',' || c == ';') {
        if let Some(v) = token.strip_prefix("mode=") {
            return match v {
                "cvr3" => Ok(RatingMode::Cvr3),
                "scale5" => Ok(RatingMode::Scale5),
                other => Err(Error::Syntax { what: "SME mode".into(), message: format!("unknown mode `{other}`") }),
            };
        }
    }
    Err(Error::MissingMode)
}

fn parse_judgment(mode: RatingMode, raw: &str, rater: &str, item: &str, source: &str) -> Result<Judgment> {
    let as_score = raw.parse::<u8>().ok();
    let as_cat = Category::parse(raw);
    let bad = |msg: &str| Error::Syntax {
        what: source.to_owned(),
        message: format!("rater `{rater}`, item `{item}`: {msg} `{raw}`"),
    };
    match mode {
        RatingMode::Cvr3 => match (as_cat, as_score) {
            (Some(c), _) => Ok(Judgment::Category(c)),
            (None, Some(_)) => Err(Error::MixedModes(format!("numeric score `{raw}` in cvr3 file ({rater}, {item})"))),
            _ => Err(bad("unrecognized judgment")),
        },
        RatingMode::Scale5 => match (as_score, as_cat) {
            (Some(s), _) if (1..=5).contains(&s) => Ok(Judgment::Score(s)),
            (None, Some(_)) => Err(Error::MixedModes(format!("category `{raw}` in scale5 file ({rater}, {item})"))),
            _ => Err(bad("score outside 1..5")),
        },
    }
}
