//! Cross-validated partial log-likelihood (CVPL) selection of tuning values.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};
use crate::estimators::{cre, fit_penalized_standardized, lambda_max, wme, Penalty};
use crate::optim::{FitResult, SolverOptions};
use crate::rng::{derive_seed, rng_from_seed, tags};
use crate::survival::{log_partial_likelihood, SurvivalDataset};
use crate::synthesis::{CatalyticPrior, SyntheticDataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub grid: Vec<f64>,
    pub seed: u64,
}

impl CvConfig {
    pub fn new(folds: usize, grid: Vec<f64>, seed: u64) -> Result<Self> {
        let cfg = Self { folds, grid, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(CoxError::InvalidArgument("cross-validation needs at least 2 folds".into()));
        }
        if self.grid.is_empty() || self.grid.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(CoxError::InvalidArgument("grid must be nonempty and strictly positive".into()));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoxError::InvalidArgument("grid must be strictly increasing".into()));
        }
        Ok(())
    }
}

pub const DEFAULT_FOLDS: usize = 10;

/// `{p/8, p/4, p/2, p, 2p, 4p, 8p}`.
pub fn default_tau_grid(p: usize) -> Vec<f64> {
    [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0].iter().map(|f| f * p as f64).collect()
}

/// 30 log-spaced values from `1e-4 lambda_max` to `1e2 lambda_max`.
pub fn default_lambda_grid(lambda_max: f64) -> Vec<f64> {
    let (lo, hi) = ((1e-4f64).ln(), (1e2f64).ln());
    (0..30)
        .map(|k| lambda_max * (lo + (hi - lo) * k as f64 / 29.0).exp())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CvResult {
    pub best_value: f64,
    pub grid: Vec<f64>,
    /// CVPL total per grid value; `-inf` where some fold fit failed.
    pub scores: Vec<f64>,
    /// Fold of each subject.
    pub fold_of: Vec<usize>,
}

/// Fold of each subject from a seeded permutation cut into `k` near-equal
/// contiguous parts.
pub fn assign_folds(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng_from_seed(seed));
    let mut fold_of = vec![0; n];
    for (pos, &i) in perm.iter().enumerate() {
        fold_of[i] = pos * k / n;
    }
    fold_of
}

/// Fold `k` of `fold_of` is usable: its training complement has an event,
/// and, unless there are fewer events than folds, the fold itself has one.
fn folds_usable(data: &SurvivalDataset, fold_of: &[usize], k: usize) -> Option<usize> {
    let total = data.event_count();
    let mut fold_events = vec![0usize; k];
    for (i, &d) in data.status().iter().enumerate() {
        if d {
            fold_events[fold_of[i]] += 1;
        }
    }
    (0..k).find(|&f| total - fold_events[f] == 0 || (total >= k && fold_events[f] == 0))
}

fn fold_assignment(data: &SurvivalDataset, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = data.n();
    if k > n {
        return Err(CoxError::InvalidArgument(format!("{k} folds for {n} subjects")));
    }
    let mut last_bad = 0;
    for attempt in 0..2u64 {
        let fold_of = assign_folds(n, k, derive_seed(seed, &[tags::CV_FOLDS, attempt]));
        match folds_usable(data, &fold_of, k) {
            None => return Ok(fold_of),
            Some(f) => last_bad = f,
        }
    }
    Err(CoxError::EmptyFold { fold: last_bad })
}

/// All subjects outside fold `f`.
fn training_part(data: &SurvivalDataset, fold_of: &[usize], f: usize) -> Result<SurvivalDataset> {
    let keep: Vec<usize> = (0..data.n()).filter(|&i| fold_of[i] != f).collect();
    data.subset(&keep)
}

/// CVPL of `fit_fn` over `config.grid`.
///
/// For each grid value and fold `i`, the estimator is fitted without fold
/// `i` and scored by `log PL_full(b) - log PL_{-i}(b)`. Grid values are
/// compared by the sum over folds; ties go to the smallest value.
pub fn cvpl<F>(data: &SurvivalDataset, fit_fn: F, config: &CvConfig) -> Result<CvResult>
where
    F: Fn(&SurvivalDataset, f64) -> Result<FitResult> + Sync,
{
    config.validate()?;
    let fold_of = fold_assignment(data, config.folds, config.seed)?;
    cvpl_with_folds(data, fit_fn, &config.grid, fold_of)
}

/// CVPL over `grid` with a given fold of each subject (folds `0..k`).
pub fn cvpl_with_folds<F>(data: &SurvivalDataset, fit_fn: F, grid: &[f64], fold_of: Vec<usize>) -> Result<CvResult>
where
    F: Fn(&SurvivalDataset, f64) -> Result<FitResult> + Sync,
{
    if fold_of.len() != data.n() {
        return Err(CoxError::DimensionMismatch {
            expected: data.n(),
            got: fold_of.len(),
        });
    }
    if grid.is_empty() {
        return Err(CoxError::InvalidArgument("grid must be nonempty".into()));
    }
    let k = fold_of.iter().max().map_or(0, |m| m + 1);
    if let Some(f) = folds_usable(data, &fold_of, k) {
        return Err(CoxError::EmptyFold { fold: f });
    }
    let trains: Vec<SurvivalDataset> = (0..k)
        .map(|f| training_part(data, &fold_of, f))
        .collect::<Result<_>>()?;
    let g = grid.len();
    let cell_scores: Vec<f64> = (0..g * k)
        .into_par_iter()
        .map(|cell| {
            let (gi, f) = (cell / k, cell % k);
            let score = fit_fn(&trains[f], grid[gi]).and_then(|fit| {
                Ok(log_partial_likelihood(&fit.beta, data)? - log_partial_likelihood(&fit.beta, &trains[f])?)
            });
            match score {
                Ok(s) if s.is_finite() => s,
                _ => f64::NEG_INFINITY,
            }
        })
        .collect();
    let scores: Vec<f64> = cell_scores.chunks(k).map(|c| c.iter().sum()).collect();
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    Ok(CvResult {
        best_value: grid[best],
        grid: grid.to_vec(),
        scores,
        fold_of,
    })
}

/// Select `tau` for the WME; the synthetic data is shared across folds.
pub fn cv_wme(data: &SurvivalDataset, synth: &SyntheticDataset, config: &CvConfig, opts: &SolverOptions) -> Result<CvResult> {
    cvpl(data, |train, tau| wme(train, synth, tau, opts), config)
}

/// Select `tau` for the CRE with the given prior (its own `tau` is ignored).
pub fn cv_cre(data: &SurvivalDataset, prior: &CatalyticPrior, config: &CvConfig, opts: &SolverOptions) -> Result<CvResult> {
    cvpl(data, |train, tau| cre(train, &prior.with_tau(tau)?, opts), config)
}

/// Select the penalty level for ridge or lasso on standardized covariates.
/// A `grid` of `None` uses [`default_lambda_grid`].
pub fn cv_penalized(
    data: &SurvivalDataset,
    ridge: bool,
    folds: usize,
    grid: Option<Vec<f64>>,
    seed: u64,
    opts: &SolverOptions,
) -> Result<CvResult> {
    let grid = match grid {
        Some(g) => g,
        None => default_lambda_grid(lambda_max(&data.standardized().0)?),
    };
    let config = CvConfig::new(folds, grid, seed)?;
    cvpl(
        data,
        |train, lambda| {
            let penalty = if ridge { Penalty::Ridge(lambda) } else { Penalty::Lasso(lambda) };
            fit_penalized_standardized(train, penalty, opts).map(|(fit, _)| fit)
        },
        &config,
    )
}
