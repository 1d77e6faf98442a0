//! Consistency-based model selection.
//!
//! A one-class model trained with rejection rate `fracrej` should reject about
//! that fraction of held-out targets. With `M` validation samples the
//! rejection count is binomial, so a model is *consistent* while its
//! cross-validated rejection stays below
//! `fracrej + sigma_thr·sqrt(fracrej·(1 − fracrej)/M)`. Among consistent
//! candidates the most complex one wins.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{squared_distance, Matrix};

pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_SIGMA_THR: f64 = 2.0;
pub const DEFAULT_SIGMA_COUNT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    pub folds: usize,
    pub sigma_thr: f64,
    pub fracrej: f64,
    pub seed: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            folds: DEFAULT_FOLDS,
            sigma_thr: DEFAULT_SIGMA_THR,
            fracrej: crate::threshold::DEFAULT_FRACREJ,
            seed: 0,
        }
    }
}

/// Largest acceptable validation rejection rate for `m` validation samples.
pub fn error_threshold(fracrej: f64, sigma_thr: f64, m: usize) -> f64 {
    fracrej + sigma_thr * libm::sqrt(fracrej * (1.0 - fracrej) / m as f64)
}

/// `{1e-8, 1e-7, …, 1e8}`.
pub fn c_grid() -> Vec<f64> {
    (-8..=8).map(|e| libm::pow(10.0, e as f64)).collect()
}

/// Minimum and maximum nonzero pairwise distance between rows.
pub fn distance_range(x: &Matrix) -> Result<(f64, f64)> {
    if x.rows() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            found: x.rows(),
        });
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    for i in 0..x.rows() {
        for j in i + 1..x.rows() {
            let d2 = squared_distance(x.row(i), x.row(j));
            if d2 > 0.0 {
                lo = lo.min(d2);
                hi = hi.max(d2);
            }
        }
    }
    if hi == 0.0 {
        return Err(Error::AllPointsIdentical);
    }
    Ok((libm::sqrt(lo), libm::sqrt(hi)))
}

/// `count` geometrically spaced kernel widths from the smallest to the
/// largest nonzero pairwise distance.
pub fn sigma_grid(x: &Matrix, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidParameter("sigma grid needs at least two values"));
    }
    let (lo, hi) = distance_range(x)?;
    Ok(geometric(lo, hi, count))
}

fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let ratio = hi / lo;
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                lo * libm::pow(ratio, i as f64 / (count - 1) as f64)
            }
        })
        .collect()
}

/// Fold index of every row: a seeded shuffle dealt round-robin.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = alloc::vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        fold[row] = pos % folds;
    }
    fold
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial<P> {
    pub params: P,
    /// Fold-averaged target rejection rate; `NaN` when training failed.
    pub rejection: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection<P> {
    pub chosen: P,
    pub chosen_index: usize,
    pub rejection: f64,
    pub err_thr: f64,
    /// `false` when no candidate met the bound and the least-rejecting one
    /// was returned instead.
    pub consistent: bool,
    /// Index of the first consistent candidate in scan order.
    pub first_consistent: Option<usize>,
    pub trials: Vec<Trial<P>>,
}

/// Cross-validated search over `candidates`, ordered from most to least
/// complex.
///
/// `rejection_of(params, train, validation)` trains on `train` and returns
/// the fraction of `validation` rows it rejects. Every candidate is
/// evaluated (the full table is kept in `trials`); the first consistent one
/// is chosen.
pub fn select<P: Clone>(
    x: &Matrix,
    candidates: &[P],
    cfg: &SelectionConfig,
    mut rejection_of: impl FnMut(&P, &Matrix, &Matrix) -> Result<f64>,
) -> Result<Selection<P>> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("empty parameter grid"));
    }
    if cfg.folds < 2 {
        return Err(Error::InvalidParameter("need at least two folds"));
    }
    if x.rows() < cfg.folds {
        return Err(Error::TooFewSamples {
            needed: cfg.folds,
            found: x.rows(),
        });
    }
    let err_thr = error_threshold(cfg.fracrej, cfg.sigma_thr, x.rows() / cfg.folds);
    let assignment = fold_assignment(x.rows(), cfg.folds, cfg.seed);
    let splits: Vec<(Matrix, Matrix)> = (0..cfg.folds)
        .map(|f| {
            let (val, train): (Vec<usize>, Vec<usize>) = (0..x.rows()).partition(|&i| assignment[i] == f);
            (x.select_rows(&train), x.select_rows(&val))
        })
        .collect();

    let mut trials = Vec::with_capacity(candidates.len());
    let mut last_err = None;
    for p in candidates {
        let mut total = 0.0;
        let mut failed = false;
        for (train, val) in &splits {
            match rejection_of(p, train, val) {
                Ok(r) => total += r,
                Err(e) => {
                    last_err = Some(e);
                    failed = true;
                    break;
                }
            }
        }
        let rejection = if failed { f64::NAN } else { total / cfg.folds as f64 };
        trials.push(Trial {
            params: p.clone(),
            rejection,
            consistent: rejection <= err_thr,
        });
    }

    let first_consistent = trials.iter().position(|t| t.consistent);
    let chosen_index = match first_consistent {
        Some(i) => i,
        None => trials
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.rejection.is_nan())
            .min_by(|a, b| a.1.rejection.total_cmp(&b.1.rejection))
            .map(|(i, _)| i)
            .ok_or_else(|| last_err.unwrap_or(Error::InvalidParameter("no candidate could be trained")))?,
    };
    Ok(Selection {
        chosen: trials[chosen_index].params.clone(),
        chosen_index,
        rejection: trials[chosen_index].rejection,
        err_thr,
        consistent: first_consistent.is_some(),
        first_consistent,
        trials,
    })
}
