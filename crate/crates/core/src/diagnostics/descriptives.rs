use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PilotDataset;
use crate::scalar::{mean, Real};
use crate::stats::{quantile_sorted, sample_variance, sorted};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemDescriptives<T> {
    pub item_id: String,
    pub n: usize,
    pub mean: T,
    pub median: T,
    /// Sample standard deviation (`n - 1` denominator).
    pub sd: T,
    pub q1: T,
    pub q3: T,
    pub iqr: T,
    pub min: T,
    pub max: T,
    pub floor_share: T,
    pub ceiling_share: T,
    pub zero_variance: bool,
}

/// Location and spread for every item column. Quartiles use type-7 linear
/// interpolation; floor/ceiling shares are measured against each item's scale.
pub fn item_descriptives<T: Real>(ds: &PilotDataset<T>) -> Result<Vec<ItemDescriptives<T>>> {
    let n = ds.n_respondents();
    if n < 2 {
        return Err(Error::InsufficientData(format!("descriptives need at least 2 respondents, found {n}")));
    }
    let cols = ds.all_columns()?;
    Ok(cols
        .iter()
        .zip(ds.items())
        .zip(ds.scales())
        .map(|((col, id), scale)| {
            let s = sorted(col);
            let q1 = quantile_sorted(&s, T::lit(0.25));
            let q3 = quantile_sorted(&s, T::lit(0.75));
            let share = |target: T| T::from_count(col.iter().filter(|&&x| x == target).count()) / T::from_count(n);
            let sd = sample_variance(col).sqrt();
            ItemDescriptives {
                item_id: id.clone(),
                n,
                mean: mean(col),
                median: quantile_sorted(&s, T::half()),
                sd,
                q1,
                q3,
                iqr: q3 - q1,
                min: s[0],
                max: s[n - 1],
                floor_share: share(scale.min),
                ceiling_share: share(scale.max),
                zero_variance: s[0] == s[n - 1],
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ScaleBounds;
    use proptest::prelude::*;

    fn one_item(vals: &[f64]) -> PilotDataset<f64> {
        PilotDataset::new(
            "t",
            (0..vals.len()).map(|r| format!("r{r}")).collect(),
            vec!["x".into()],
            vec![ScaleBounds { min: 1.0, max: 5.0 }],
            vals.iter().map(|&v| vec![v]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn one_to_five() {
        let d = &item_descriptives(&one_item(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap()[0];
        assert_eq!((d.mean, d.median, d.iqr, d.q1, d.q3), (3.0, 3.0, 2.0, 2.0, 4.0));
        assert!((d.sd - 2.5f64.sqrt()).abs() < 1e-15);
        assert!((d.sd - 1.5811).abs() < 1e-4);
        assert_eq!((d.floor_share, d.ceiling_share), (0.2, 0.2));
        assert!(!d.zero_variance);
    }

    #[test]
    fn constant_and_ceiling() {
        let d = &item_descriptives(&one_item(&[3.0; 4])).unwrap()[0];
        assert_eq!((d.sd, d.iqr), (0.0, 0.0));
        assert!(d.zero_variance);
        let d = &item_descriptives(&one_item(&[5.0; 6])).unwrap()[0];
        assert_eq!(d.ceiling_share, 1.0);
    }

    #[test]
    fn too_few_respondents() {
        assert!(matches!(item_descriptives(&one_item(&[2.0])), Err(Error::InsufficientData(_))));
    }

    proptest! {
        #[test]
        fn translation_equivariant_and_ordered(vals in prop::collection::vec(1u8..=5, 2..40), shift in -3i8..4) {
            let xs: Vec<f64> = vals.iter().map(|&v| v as f64).collect();
            let d = item_descriptives(&one_item(&xs)).unwrap().remove(0);
            prop_assert!(d.min <= d.median && d.median <= d.max);
            prop_assert!(d.sd >= 0.0 && d.iqr >= 0.0);
            prop_assert!((0.0..=1.0).contains(&d.floor_share) && (0.0..=1.0).contains(&d.ceiling_share));
            let c = shift as f64;
            let moved: Vec<f64> = xs.iter().map(|x| x + c).collect();
            let e = item_descriptives(&one_item(&moved)).unwrap().remove(0);
            prop_assert!((e.mean - (d.mean + c)).abs() < 1e-12);
            prop_assert!((e.median - (d.median + c)).abs() < 1e-12);
        }
    }
}
