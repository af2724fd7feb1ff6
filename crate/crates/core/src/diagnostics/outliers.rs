use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ingest::PilotDataset;
use crate::scalar::Real;
use crate::stats::{quantile_sorted, sorted};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierFlag {
    pub respondent_id: String,
    pub items_flagged: Vec<String>,
    pub fraction_flagged: f64,
    pub is_outlier: bool,
}

/// Per-item Tukey fences `[Q1 - fence·IQR, Q3 + fence·IQR]`; a respondent is
/// an outlier when at least `fraction_threshold` of their items fall outside.
/// Returns one flag per respondent in dataset order.
pub fn detect_outlier_respondents<T: Real>(
    ds: &PilotDataset<T>,
    fence: f64,
    fraction_threshold: f64,
) -> Result<Vec<OutlierFlag>> {
    let cols = ds.all_columns()?;
    let k = T::lit(fence);
    let bounds: Vec<(T, T)> = cols
        .iter()
        .map(|c| {
            let s = sorted(c);
            let q1 = quantile_sorted(&s, T::lit(0.25));
            let q3 = quantile_sorted(&s, T::lit(0.75));
            let iqr = q3 - q1;
            (q1 - k * iqr, q3 + k * iqr)
        })
        .collect();
    let n_items = ds.n_items().max(1);
    Ok(ds
        .respondent_ids()
        .iter()
        .enumerate()
        .map(|(r, id)| {
            let items_flagged: Vec<String> = cols
                .iter()
                .zip(&bounds)
                .zip(ds.items())
                .filter(|((c, (lo, hi)), _)| c[r] < *lo || c[r] > *hi)
                .map(|(_, item)| item.clone())
                .collect();
            let fraction_flagged = items_flagged.len() as f64 / n_items as f64;
            OutlierFlag {
                respondent_id: id.clone(),
                is_outlier: !items_flagged.is_empty() && fraction_flagged >= fraction_threshold,
                items_flagged,
                fraction_flagged,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ScaleBounds;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn dataset(rows: Vec<Vec<f64>>) -> PilotDataset<f64> {
        let k = rows[0].len();
        PilotDataset::new(
            "t",
            (0..rows.len()).map(|r| format!("r{r}")).collect(),
            (0..k).map(|j| format!("i{j}")).collect(),
            vec![ScaleBounds { min: 1.0, max: 5.0 }; k],
            rows,
        )
        .unwrap()
    }

    #[test]
    fn identical_respondents_are_never_outliers() {
        let flags = detect_outlier_respondents(&dataset(vec![vec![3.0; 4]; 8]), 1.5, 0.25).unwrap();
        assert!(flags.iter().all(|f| !f.is_outlier && f.items_flagged.is_empty()));
    }

    #[test]
    fn floor_responder_among_high_cluster() {
        // Brute-force fences for a column of nine 4/5 answers and one 1:
        // sorted [1,4,4,4,4,5,5,5,5,5]: Q1 = 4, Q3 = 5, IQR = 1, fences [2.5, 6.5]
        let mut rows: Vec<Vec<f64>> = (0..9).map(|r| vec![if r % 2 == 0 { 5.0 } else { 4.0 }; 5]).collect();
        rows.push(vec![1.0; 5]);
        let flags = detect_outlier_respondents(&dataset(rows), 1.5, 0.25).unwrap();
        let last = flags.last().unwrap();
        assert_eq!(last.fraction_flagged, 1.0);
        assert!(last.is_outlier);
        assert!(flags[..9].iter().all(|f| !f.is_outlier));
    }

    #[test]
    fn below_fraction_threshold() {
        let mut rows = vec![vec![3.0; 10]; 9];
        rows[0][0] = 2.0;
        rows[1][0] = 4.0;
        let mut odd = vec![3.0; 10];
        odd[3] = 5.0;
        rows.push(odd);
        let flags = detect_outlier_respondents(&dataset(rows), 1.5, 0.25).unwrap();
        let last = flags.last().unwrap();
        assert_eq!(last.items_flagged, ["i3"]);
        assert_eq!(last.fraction_flagged, 0.1);
        assert!(!last.is_outlier);
    }

    proptest! {
        #[test]
        fn permutation_invariant(
            rows in prop::collection::vec(prop::collection::vec(1u8..=5, 4), 4..25),
            seed in any::<u64>(),
        ) {
            let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let ds = dataset(rows);
            let mut order: Vec<usize> = (0..ds.n_respondents()).collect();
            // deterministic shuffle from the seed
            let mut s = seed | 1;
            for i in (1..order.len()).rev() {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                order.swap(i, (s % (i as u64 + 1)) as usize);
            }
            let by_id = |flags: Vec<OutlierFlag>| flags.into_iter().map(|f| (f.respondent_id.clone(), f)).collect::<BTreeMap<_, _>>();
            let a = by_id(detect_outlier_respondents(&ds, 1.5, 0.25).unwrap());
            let b = by_id(detect_outlier_respondents(&ds.permute_respondents(&order), 1.5, 0.25).unwrap());
            prop_assert_eq!(a, b);
        }
    }
}
