use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PilotDataset;
use crate::scalar::Real;
use crate::stats::{average_ranks, pearson};

/// Pearson and Spearman matrices over an item subset. Coefficients involving
/// a constant column are `None` (serialized as `null`) and listed in
/// `undefined_pairs` as `(i, j)` index pairs with `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix<T> {
    pub item_ids: Vec<String>,
    pub pearson: Vec<Vec<Option<T>>>,
    pub spearman: Vec<Vec<Option<T>>>,
    pub undefined_pairs: Vec<(usize, usize)>,
}

impl<T: Real> CorrelationMatrix<T> {
    pub fn index(&self, id: &str) -> Option<usize> {
        self.item_ids.iter().position(|i| i == id)
    }

    pub fn pearson_between(&self, a: &str, b: &str) -> Option<T> {
        self.pearson[self.index(a)?][self.index(b)?]
    }
}

pub fn correlation_matrix<T: Real>(ds: &PilotDataset<T>, item_subset: &[&str]) -> Result<CorrelationMatrix<T>> {
    if ds.n_respondents() < 3 {
        return Err(Error::InsufficientData(format!(
            "correlations need at least 3 respondents, found {}",
            ds.n_respondents()
        )));
    }
    let cols = ds.columns(item_subset)?;
    let ranks: Vec<Vec<T>> = cols.iter().map(|c| average_ranks(c)).collect();
    let k = cols.len();
    let mut p = vec![vec![None; k]; k];
    let mut s = vec![vec![None; k]; k];
    let mut undefined_pairs = Vec::new();
    for i in 0..k {
        p[i][i] = Some(T::one());
        s[i][i] = Some(T::one());
        for j in (i + 1)..k {
            let r = pearson(&cols[i], &cols[j]);
            let rho = pearson(&ranks[i], &ranks[j]);
            if r.is_none() {
                undefined_pairs.push((i, j));
            }
            p[i][j] = r;
            p[j][i] = r;
            s[i][j] = rho;
            s[j][i] = rho;
        }
    }
    Ok(CorrelationMatrix {
        item_ids: item_subset.iter().map(|s| (*s).to_owned()).collect(),
        pearson: p,
        spearman: s,
        undefined_pairs,
    })
}
