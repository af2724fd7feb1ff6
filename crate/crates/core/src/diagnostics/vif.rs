use serde::{Deserialize, Serialize};

use super::adequacy::sample_size_adequacy;
use crate::error::{Error, Result};
use crate::ingest::PilotDataset;
use crate::linalg::least_squares;
use crate::scalar::Real;
use crate::spec::ConstructSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VifValue<T> {
    /// The item is (numerically) an exact affine function of its siblings.
    ExactDependence,
    /// The item column is constant, so R² is undefined.
    ConstantItem,
    #[serde(untagged)]
    Finite(T),
}

impl<T: Real> VifValue<T> {
    pub fn finite(&self) -> Option<T> {
        match self {
            VifValue::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollinearityResult<T> {
    pub construct_id: String,
    pub item_id: String,
    pub r_squared: Option<T>,
    pub vif: VifValue<T>,
    pub n_used: usize,
    pub predictors: Vec<String>,
    /// Whether the sample meets the observations-per-predictor floor.
    pub reliable: bool,
}

/// VIF for every indicator of `construct`, each regressed on all siblings.
pub fn compute_vif<T: Real>(
    ds: &PilotDataset<T>,
    construct: &ConstructSpec,
    ratio_floor: f64,
) -> Result<Vec<CollinearityResult<T>>> {
    compute_vif_for(ds, &construct.id, &construct.indicator_ids(), ratio_floor)
}

/// VIF over an explicit indicator list (e.g. the items that survived the
/// content-validity gate).
///
/// Each auxiliary regression includes an intercept and is solved by pivoted
/// QR. When `SSE / SST` falls to the scalar's dependence tolerance (1e-10
/// for `f64`) the item is reported as [`VifValue::ExactDependence`] instead
/// of a huge, unstable number.
pub fn compute_vif_for<T: Real>(
    ds: &PilotDataset<T>,
    construct_id: &str,
    indicators: &[&str],
    ratio_floor: f64,
) -> Result<Vec<CollinearityResult<T>>> {
    let k = indicators.len();
    if k < 2 {
        return Err(Error::InsufficientData(format!("construct `{construct_id}` needs at least 2 indicators for VIF")));
    }
    let n = ds.n_respondents();
    let predictors = k - 1;
    if n < predictors + 2 {
        return Err(Error::InsufficientData(format!(
            "construct `{construct_id}`: {n} respondents cannot estimate a regression on {predictors} predictors"
        )));
    }
    let cols = ds.columns(indicators)?;
    if cols.iter().all(|c| c.iter().all(|&x| x == c[0])) {
        return Err(Error::ConstantBlock(construct_id.to_owned()));
    }
    let reliable = sample_size_adequacy(n, predictors, ratio_floor).reliable;
    let tol = T::dependence_tol();

    Ok((0..k)
        .map(|j| {
            let others: Vec<Vec<T>> = (0..k).filter(|&i| i != j).map(|i| cols[i].clone()).collect();
            let fit = least_squares(&cols[j], &others);
            let (r_squared, vif) = match fit.r_squared() {
                None => (None, VifValue::ConstantItem),
                Some(_) if fit.sse <= tol * fit.sst => (Some(T::one()), VifValue::ExactDependence),
                Some(r2) => (Some(r2), VifValue::Finite(T::one() / (T::one() - r2))),
            };
            CollinearityResult {
                construct_id: construct_id.to_owned(),
                item_id: indicators[j].to_owned(),
                r_squared,
                vif,
                n_used: n,
                predictors: indicators.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, s)| (*s).to_owned()).collect(),
                reliable,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ScaleBounds;

    fn dataset(cols: &[Vec<f64>]) -> PilotDataset<f64> {
        let n = cols[0].len();
        PilotDataset::new(
            "t",
            (0..n).map(|r| format!("r{r}")).collect(),
            (0..cols.len()).map(|j| format!("x{}", j + 1)).collect(),
            vec![ScaleBounds { min: 1.0, max: 10.0 }; cols.len()],
            (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn uncorrelated_pair_has_unit_vif() {
        // centered dot product is zero by construction
        let ds = dataset(&[vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 3.0, 3.0, 1.0]]);
        let res = compute_vif_for(&ds, "c", &["x1", "x2"], 5.0).unwrap();
        for r in &res {
            assert!((r.vif.finite().unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(!res[0].reliable);
    }

    #[test]
    fn doubled_column_is_exact_dependence() {
        let x1 = vec![1.0, 2.0, 4.0, 3.0, 5.0];
        let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v).collect();
        let res = compute_vif_for(&dataset(&[x1, x2]), "c", &["x1", "x2"], 5.0).unwrap();
        assert!(res.iter().all(|r| r.vif == VifValue::ExactDependence && r.r_squared == Some(1.0)));
    }

    #[test]
    fn two_item_identity() {
        let x1 = vec![1.0, 2.0, 4.0, 3.0, 5.0, 2.0];
        let x2 = vec![2.0, 2.0, 5.0, 3.0, 4.0, 1.0];
        let r = crate::stats::pearson(&x1, &x2).unwrap();
        let res = compute_vif_for(&dataset(&[x1, x2]), "c", &["x1", "x2"], 5.0).unwrap();
        for item in res {
            assert!((item.vif.finite().unwrap() - 1.0 / (1.0 - r * r)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_item_and_block() {
        let ds = dataset(&[vec![1.0, 2.0, 3.0, 5.0], vec![2.0; 4], vec![2.0, 1.0, 3.0, 3.0]]);
        let res = compute_vif_for(&ds, "c", &["x1", "x2", "x3"], 5.0).unwrap();
        assert_eq!(res[1].vif, VifValue::ConstantItem);
        assert!(res[0].vif.finite().is_some());
        let ds = dataset(&[vec![2.0; 4], vec![3.0; 4]]);
        assert!(matches!(compute_vif_for(&ds, "c", &["x1", "x2"], 5.0), Err(Error::ConstantBlock(_))));
    }

    #[test]
    fn too_few_respondents() {
        let ds = dataset(&[vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 3.0], vec![3.0, 3.0, 1.0]]);
        assert!(matches!(compute_vif_for(&ds, "c", &["x1", "x2", "x3"], 5.0), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn serializes_flags_as_strings() {
        let json = serde_json::to_string(&[VifValue::Finite(1.5), VifValue::ExactDependence]).unwrap();
        assert_eq!(json, r#"[1.5,"EXACT_DEPENDENCE"]"#);
        let back: Vec<VifValue<f64>> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, [VifValue::Finite(1.5), VifValue::ExactDependence]);
    }
}
