//! Run configuration (`--config <file.toml>`). Every key is optional.
//!
//! ```toml
//! cvr_alpha = 0.05
//! vif_max = 5.0            # 3.3 and 10 are common alternates
//! outlier_fence = 1.5
//! outlier_fraction = 0.25
//! sample_ratio_floor = 5.0
//! corr_preference = "both" # pearson | spearman | both
//! item_floor = 5
//! alpha_floor = 0.7
//! extreme_share_max = 0.8
//! missing_policy = "listwise"
//! composite_method = "weighted_mean"
//!
//! [cvr_critical_override]
//! "10" = 0.62
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::composites::CompositeMethod;
use crate::content_validity::CvrSettings;
use crate::error::{Error, Result};
use crate::ingest::MissingPolicy;
use crate::spec::ValidationOptions;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrPreference {
    Pearson,
    Spearman,
    /// Report both; prefer Spearman for scales with at most 7 points.
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub cvr_alpha: f64,
    pub cvr_critical_override: BTreeMap<String, f64>,
    pub vif_max: f64,
    pub outlier_fence: f64,
    pub outlier_fraction: f64,
    pub sample_ratio_floor: f64,
    pub corr_preference: CorrPreference,
    pub item_floor: usize,
    /// Reflective constructs need alpha at or above this.
    pub alpha_floor: f64,
    /// Floor/ceiling share above which an item is flagged.
    pub extreme_share_max: f64,
    pub missing_policy: MissingPolicy,
    pub composite_method: CompositeMethod,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            cvr_alpha: 0.05,
            cvr_critical_override: BTreeMap::new(),
            vif_max: 5.0,
            outlier_fence: 1.5,
            outlier_fraction: 0.25,
            sample_ratio_floor: 5.0,
            corr_preference: CorrPreference::Both,
            item_floor: 5,
            alpha_floor: 0.7,
            extreme_share_max: 0.8,
            missing_policy: MissingPolicy::Listwise,
            composite_method: CompositeMethod::WeightedMean,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config =
            toml::from_str(text).map_err(|e| Error::Syntax { what: "config".into(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.cvr_alpha > 0.0 && self.cvr_alpha < 0.5) {
            return bad(format!("cvr_alpha must lie in (0, 0.5), got {}", self.cvr_alpha));
        }
        if self.vif_max.is_nan() || self.vif_max < 1.0 {
            return bad(format!("vif_max must be at least 1, got {}", self.vif_max));
        }
        if self.outlier_fence.is_nan() || self.outlier_fence < 0.0 {
            return bad("outlier_fence must be non-negative".into());
        }
        if !(self.outlier_fraction > 0.0 && self.outlier_fraction <= 1.0) {
            return bad("outlier_fraction must lie in (0, 1]".into());
        }
        if self.sample_ratio_floor.is_nan() || self.sample_ratio_floor <= 0.0 {
            return bad("sample_ratio_floor must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.extreme_share_max) {
            return bad("extreme_share_max must lie in [0, 1]".into());
        }
        self.cvr_settings().map(|_| ())
    }

    pub fn cvr_settings(&self) -> Result<CvrSettings> {
        let mut overrides = BTreeMap::new();
        for (k, &v) in &self.cvr_critical_override {
            let n: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("cvr_critical_override key `{k}` is not a panel size")))?;
            if n < 2 || !(-1.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("cvr_critical_override {n} = {v} is out of range")));
            }
            overrides.insert(n, v);
        }
        Ok(CvrSettings { alpha: self.cvr_alpha, overrides })
    }

    pub fn validation_options(&self) -> ValidationOptions {
        ValidationOptions { item_floor: self.item_floor }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn overrides_and_round_trip() {
        let cfg = Config::parse("vif_max = 3.3\ncomposite_method = \"median\"\n[cvr_critical_override]\n\"10\" = 0.62\n").unwrap();
        assert_eq!(cfg.vif_max, 3.3);
        assert_eq!(cfg.composite_method, CompositeMethod::WeightedMedian);
        assert_eq!(cfg.cvr_settings().unwrap().overrides[&10], 0.62);
        assert_eq!(Config::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Config::parse("cvr_alpha = 0.7").is_err());
        assert!(Config::parse("[cvr_critical_override]\nten = 0.5").is_err());
        assert!(Config::parse("unknown_key = 1").is_err());
    }
}
