//! Seeded synthetic pilot and SME data.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, with standard normals from `rand_distr`'s ziggurat
//! sampler; both are platform independent, so a seed reproduces the same
//! data everywhere. Latent rows are `L z` where `L` is a lower-triangular
//! factor of the target correlation matrix (zero pivots are allowed, so
//! singular PSD targets work).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::ingest::{Category, Judgment, PilotDataset, RatingMode, ScaleBounds, SmeRatingSet};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    /// `round(mid + z · range/4)` clamped to the scale.
    #[default]
    RoundClamp,
    /// Equal-probability bins of the standard normal.
    Quantile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthItem {
    pub id: String,
    pub scale_min: i64,
    pub scale_max: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_respondents: usize,
    pub items: Vec<SynthItem>,
    pub target_correlation: Vec<Vec<f64>>,
    pub discretization: Discretization,
    pub respondent_prefix: String,
}

impl SynthConfig {
    pub fn new(seed: u64, n_respondents: usize, items: Vec<SynthItem>, target_correlation: Vec<Vec<f64>>) -> Self {
        SynthConfig {
            seed,
            n_respondents,
            items,
            target_correlation,
            discretization: Discretization::RoundClamp,
            respondent_prefix: "s".into(),
        }
    }
}

/// `k × k` matrix with unit diagonal and `rho` everywhere else.
pub fn equicorrelation(k: usize, rho: f64) -> Vec<Vec<f64>> {
    (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { rho }).collect()).collect()
}

/// Block-diagonal matrix from square blocks.
pub fn block_diagonal(blocks: &[Vec<Vec<f64>>]) -> Vec<Vec<f64>> {
    let k: usize = blocks.iter().map(Vec::len).sum();
    let mut m = vec![vec![0.0; k]; k];
    let mut off = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[off + i][off + j] = v;
            }
        }
        off += b.len();
    }
    m
}

/// Validates symmetry, unit diagonal and positive semi-definiteness
/// (eigenvalues ≥ −1e-10).
pub fn check_correlation(m: &[Vec<f64>]) -> Result<()> {
    let k = m.len();
    if m.iter().any(|r| r.len() != k) {
        return Err(Error::Config("target correlation matrix is not square".into()));
    }
    for (i, row) in m.iter().enumerate() {
        if (row[i] - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("diagonal entry {i} is {} (must be 1)", row[i])));
        }
        for (j, &v) in row.iter().enumerate().take(i) {
            if !v.is_finite() || (v - m[j][i]).abs() > 1e-12 {
                return Err(Error::Config(format!("entries ({i},{j}) and ({j},{i}) differ")));
            }
        }
    }
    if k == 0 {
        return Ok(());
    }
    let mat = DMatrix::from_fn(k, k, |i, j| m[i][j]);
    let min_eig = mat.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < -1e-10 {
        return Err(Error::NotPsd(min_eig));
    }
    Ok(())
}

/// Lower-triangular `L` with `L Lᵀ = m` for a PSD `m`.
pub fn psd_factor(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = m.len();
    let mut l = vec![vec![0.0; k]; k];
    for j in 0..k {
        let d = m[j][j] - (0..j).map(|p| l[j][p] * l[j][p]).sum::<f64>();
        if d <= 1e-12 {
            continue;
        }
        let pivot = d.sqrt();
        l[j][j] = pivot;
        for i in (j + 1)..k {
            let s = m[i][j] - (0..j).map(|p| l[i][p] * l[j][p]).sum::<f64>();
            l[i][j] = s / pivot;
        }
    }
    l
}

/// Latent multivariate-normal rows before discretization.
pub fn generate_latent(cfg: &SynthConfig) -> Result<Vec<Vec<f64>>> {
    if cfg.target_correlation.len() != cfg.items.len() {
        return Err(Error::Config(format!(
            "{} items but a {}×{} target matrix",
            cfg.items.len(),
            cfg.target_correlation.len(),
            cfg.target_correlation.len()
        )));
    }
    check_correlation(&cfg.target_correlation)?;
    let l = psd_factor(&cfg.target_correlation);
    let k = cfg.items.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut z = vec![0.0; k];
    Ok((0..cfg.n_respondents)
        .map(|_| {
            for zi in z.iter_mut() {
                *zi = rng.sample(StandardNormal);
            }
            (0..k).map(|i| (0..=i).map(|p| l[i][p] * z[p]).sum()).collect()
        })
        .collect())
}

pub fn generate_pilot_data(cfg: &SynthConfig) -> Result<PilotDataset<f64>> {
    for it in &cfg.items {
        if it.scale_min >= it.scale_max {
            return Err(Error::Config(format!("item `{}` has an empty scale", it.id)));
        }
    }
    let latent = generate_latent(cfg)?;
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let rows = latent
        .iter()
        .map(|row| {
            row.iter()
                .zip(&cfg.items)
                .map(|(&z, it)| {
                    let (lo, hi) = (it.scale_min as f64, it.scale_max as f64);
                    match cfg.discretization {
                        Discretization::RoundClamp => {
                            let mid = (lo + hi) / 2.0;
                            (mid + z * (hi - lo) / 4.0).round().clamp(lo, hi)
                        }
                        Discretization::Quantile => {
                            let k = hi - lo + 1.0;
                            lo + (normal.cdf(z) * k).floor().min(k - 1.0)
                        }
                    }
                })
                .collect()
        })
        .collect();
    PilotDataset::new(
        format!("synthetic-{}", cfg.seed),
        (1..=cfg.n_respondents).map(|r| format!("{}{r:04}", cfg.respondent_prefix)).collect(),
        cfg.items.iter().map(|i| i.id.clone()).collect(),
        cfg.items.iter().map(|i| ScaleBounds { min: i.scale_min as f64, max: i.scale_max as f64 }).collect(),
        rows,
    )
}

/// Independent three-category judgments: `essential` with the item's
/// probability, otherwise `useful_not_essential` or `not_necessary` evenly.
pub fn generate_sme_ratings(seed: u64, n_raters: usize, items: &[&str], essential_prob: &[f64]) -> Result<SmeRatingSet> {
    if items.len() != essential_prob.len() {
        return Err(Error::Config("one essential probability per item is required".into()));
    }
    if let Some(p) = essential_prob.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Config(format!("probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let judgments = (0..n_raters)
        .map(|_| {
            essential_prob
                .iter()
                .map(|&p| {
                    let u: f64 = rng.random();
                    let c = if u < p {
                        Category::Essential
                    } else if rng.random::<bool>() {
                        Category::UsefulNotEssential
                    } else {
                        Category::NotNecessary
                    };
                    Judgment::Category(c)
                })
                .collect()
        })
        .collect();
    SmeRatingSet::new(
        RatingMode::Cvr3,
        (1..=n_raters).map(|r| format!("sme{r:02}")).collect(),
        items.iter().map(|s| (*s).to_owned()).collect(),
        judgments,
    )
}
