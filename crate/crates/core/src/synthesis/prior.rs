use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};
use crate::optim::{newton_maximize, ConcaveObjective, FitResult, SolverOptions};
use crate::rng::{derive_seed, rng_from_seed, tags};
use crate::survival::SurvivalDataset;
use crate::synthesis::covariates::{generate_synthetic_covariates, CovariateGenSchema};
use crate::synthesis::exponential::{fit_exponential, generate_synthetic_times};

/// Provenance of a synthetic dataset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMeta {
    pub scheme: String,
    pub seed: Option<u64>,
    /// Rate of the exponential model the times were drawn from.
    pub psi_hat: Option<f64>,
    pub blend: Option<f64>,
    /// Columns whose spread was degenerate and were purely resampled.
    pub fallback_columns: Vec<usize>,
}

/// Uncensored synthetic pairs `(x*_i, y*_i)`, row-major covariates.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    x: Vec<f64>,
    m: usize,
    p: usize,
    times: Vec<f64>,
    pub meta: GeneratorMeta,
}

impl SyntheticDataset {
    pub fn new(covariates: Vec<f64>, p: usize, times: Vec<f64>) -> Result<Self> {
        let m = times.len();
        if m == 0 || p == 0 {
            return Err(CoxError::InvalidData("synthetic data needs M >= 1 and p >= 1".into()));
        }
        if covariates.len() != m * p {
            return Err(CoxError::DimensionMismatch {
                expected: m * p,
                got: covariates.len(),
            });
        }
        if times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(CoxError::InvalidData("synthetic times must be positive and finite".into()));
        }
        if covariates.iter().any(|v| !v.is_finite()) {
            return Err(CoxError::InvalidData("synthetic covariates must be finite".into()));
        }
        Ok(Self {
            x: covariates,
            m,
            p,
            times,
            meta: GeneratorMeta::default(),
        })
    }

    /// Generate `m` synthetic units from `data`: covariates by `schema`,
    /// times from the exponential model fitted to `data`. The two parts use
    /// independent streams derived from `seed`.
    pub fn generate(data: &SurvivalDataset, m: usize, schema: &CovariateGenSchema, seed: u64) -> Result<Self> {
        let psi = fit_exponential(data)?;
        let draw = generate_synthetic_covariates(data, m, schema, derive_seed(seed, &[tags::SYNTH_COVARIATES]))?;
        let times = generate_synthetic_times(m, psi, derive_seed(seed, &[tags::SYNTH_TIMES]))?;
        let mut out = Self::new(draw.values, data.p(), times)?;
        out.meta = GeneratorMeta {
            scheme: "marginal-resample+exponential".into(),
            seed: Some(seed),
            psi_hat: Some(psi),
            blend: Some(schema.blend),
            fallback_columns: draw.fallback_columns,
        };
        Ok(out)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn covariates(&self) -> &[f64] {
        &self.x
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// The synthetic units as an all-event survival dataset.
    pub fn as_survival(&self) -> Result<SurvivalDataset> {
        SurvivalDataset::new(self.x.clone(), self.p, self.times.clone(), vec![true; self.m])
    }

    /// Sum of `x*'b + log h0 - y* h0 e^{x*'b}` over the synthetic units.
    pub fn log_likelihood(&self, beta: &[f64], h0_plus: f64) -> f64 {
        let log_h0 = h0_plus.ln();
        self.x
            .chunks_exact(self.p)
            .zip(&self.times)
            .map(|(row, &y)| {
                let eta = crate::util::dot(row, beta);
                eta + log_h0 - y * h0_plus * eta.exp()
            })
            .sum()
    }
}

/// Default synthetic sample size `max(1000, 4p)`.
pub fn default_synthetic_size(p: usize) -> usize {
    1000.max(4 * p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveHyper {
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for AdaptiveHyper {
    fn default() -> Self {
        Self { alpha: 2.0, gamma: 1.0 }
    }
}

/// The Cox catalytic prior: the synthetic likelihood under the surrogate
/// constant hazard `h0_plus`, raised to the power `tau / M`.
#[derive(Debug, Clone)]
pub struct CatalyticPrior {
    pub synth: SyntheticDataset,
    pub tau: f64,
    pub h0_plus: f64,
    kappa: Option<f64>,
    kappa_argmax: Option<Vec<f64>>,
    pub adaptive: Option<AdaptiveHyper>,
}

impl CatalyticPrior {
    pub fn new(synth: SyntheticDataset, tau: f64, h0_plus: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(CoxError::InvalidArgument(format!("tau must be positive, got {tau}")));
        }
        if !(h0_plus.is_finite() && h0_plus > 0.0) {
            return Err(CoxError::InvalidArgument(format!("h0_plus must be positive, got {h0_plus}")));
        }
        Ok(Self {
            synth,
            tau,
            h0_plus,
            kappa: None,
            kappa_argmax: None,
            adaptive: None,
        })
    }

    /// Prior using the synthetic data's own exponential rate as `h0_plus`.
    pub fn with_fitted_hazard(synth: SyntheticDataset, tau: f64) -> Result<Self> {
        let h0 = synth
            .meta
            .psi_hat
            .ok_or_else(|| CoxError::InvalidArgument("synthetic data carries no fitted rate".into()))?;
        Self::new(synth, tau, h0)
    }

    /// Same synthetic data and surrogate hazard, different total weight.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        let mut out = Self::new(self.synth.clone(), tau, self.h0_plus)?;
        out.kappa = self.kappa;
        out.kappa_argmax = self.kappa_argmax.clone();
        out.adaptive = self.adaptive;
        Ok(out)
    }

    /// Compute and cache `kappa` and its maximizer.
    pub fn with_kappa(mut self, opts: &SolverOptions) -> Result<Self> {
        let (kappa, argmax) = kappa_and_argmax(&self, opts)?;
        self.kappa = Some(kappa);
        self.kappa_argmax = Some(argmax);
        Ok(self)
    }

    /// Turn into the adaptive prior on `(tau, beta)`; computes `kappa`.
    pub fn into_adaptive(self, hyper: AdaptiveHyper, opts: &SolverOptions) -> Result<Self> {
        if !(hyper.alpha > 0.0 && hyper.gamma > 0.0) {
            return Err(CoxError::InvalidArgument("alpha and gamma must be positive".into()));
        }
        let mut out = if self.kappa.is_some() { self } else { self.with_kappa(opts)? };
        out.adaptive = Some(hyper);
        Ok(out)
    }

    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    pub fn kappa_argmax(&self) -> Option<&[f64]> {
        self.kappa_argmax.as_deref()
    }

    pub fn p(&self) -> usize {
        self.synth.p()
    }

    /// Mean synthetic log-likelihood `(1/M) log L(beta, h0_plus | synth)`.
    pub fn mean_synthetic_loglik(&self, beta: &[f64]) -> f64 {
        self.synth.log_likelihood(beta, self.h0_plus) / self.synth.m() as f64
    }
}

/// The synthetic log-likelihood times a constant weight, as a Newton objective.
pub(crate) struct WeightedSyntheticLikelihood<'a> {
    pub synth: &'a SyntheticDataset,
    pub h0_plus: f64,
    pub weight: f64,
}

impl WeightedSyntheticLikelihood<'_> {
    pub fn derivatives_raw(&self, beta: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let p = self.synth.p();
        let log_h0 = self.h0_plus.ln();
        let mut value = 0.0;
        let mut grad = DVector::zeros(p);
        let mut hess = DMatrix::zeros(p, p);
        for (row, &y) in self.synth.covariates().chunks_exact(p).zip(self.synth.times()) {
            let eta = crate::util::dot(row, beta);
            let r = y * self.h0_plus * eta.exp();
            value += eta + log_h0 - r;
            for a in 0..p {
                grad[a] += row[a] * (1.0 - r);
                let ra = r * row[a];
                for b in a..p {
                    hess[(a, b)] += ra * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                hess[(a, b)] = hess[(b, a)];
            }
        }
        (self.weight * value, grad * self.weight, hess * self.weight)
    }
}

impl ConcaveObjective for WeightedSyntheticLikelihood<'_> {
    fn dim(&self) -> usize {
        self.synth.p()
    }

    fn value(&self, beta: &[f64]) -> Result<f64> {
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(CoxError::NonFinite("coefficient vector"));
        }
        Ok(self.weight * self.synth.log_likelihood(beta, self.h0_plus))
    }

    fn derivatives(&self, beta: &[f64]) -> Result<(f64, DVector<f64>, DMatrix<f64>)> {
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(CoxError::NonFinite("coefficient vector"));
        }
        let out = self.derivatives_raw(beta);
        if !out.0.is_finite() || out.1.iter().any(|g| !g.is_finite()) {
            return Err(CoxError::NonFinite("catalytic prior derivatives"));
        }
        Ok(out)
    }

    fn gradient_scale(&self) -> f64 {
        self.weight * self.synth.m() as f64
    }
}

fn check_beta(beta: &[f64], p: usize) -> Result<()> {
    if beta.len() != p {
        return Err(CoxError::DimensionMismatch {
            expected: p,
            got: beta.len(),
        });
    }
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(CoxError::NonFinite("coefficient vector"));
    }
    Ok(())
}

/// Unnormalized log density of the catalytic prior, additive constants kept:
/// `(tau/M) sum_i [x*_i'b + log h0 - y*_i h0 e^{x*_i'b}]`.
///
/// Returns `-inf` when `exp` overflows (the density is zero there).
pub fn log_catalytic_prior(beta: &[f64], prior: &CatalyticPrior) -> Result<f64> {
    check_beta(beta, prior.p())?;
    let v = prior.tau * prior.mean_synthetic_loglik(beta);
    Ok(if v.is_nan() { f64::NEG_INFINITY } else { v })
}

/// Gradient and negative Hessian of [`log_catalytic_prior`].
pub fn log_catalytic_prior_derivatives(beta: &[f64], prior: &CatalyticPrior) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_beta(beta, prior.p())?;
    let obj = WeightedSyntheticLikelihood {
        synth: &prior.synth,
        h0_plus: prior.h0_plus,
        weight: prior.tau / prior.synth.m() as f64,
    };
    let (_, g, h) = obj.derivatives(beta)?;
    Ok((g, h))
}

/// Numerical column rank of a row-major `m x p` matrix.
pub fn column_rank(x: &[f64], m: usize, p: usize) -> usize {
    let mat = DMatrix::from_row_slice(m, p, x);
    let sv = mat.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    let tol = smax * (m.max(p) as f64) * f64::EPSILON;
    sv.iter().filter(|&&s| s > tol).count()
}

fn kappa_and_argmax(prior: &CatalyticPrior, opts: &SolverOptions) -> Result<(f64, Vec<f64>)> {
    let (m, p) = (prior.synth.m(), prior.p());
    let rank = column_rank(prior.synth.covariates(), m, p);
    if rank < p {
        return Err(CoxError::RankDeficient { rank, p });
    }
    let obj = WeightedSyntheticLikelihood {
        synth: &prior.synth,
        h0_plus: prior.h0_plus,
        weight: 1.0 / m as f64,
    };
    let fit: FitResult = newton_maximize(&obj, &vec![0.0; p], opts)?;
    if !fit.converged {
        return Err(CoxError::NoConvergence {
            iterations: fit.iterations,
            gradient_norm: fit.gradient_norm,
        });
    }
    Ok((fit.objective, fit.beta))
}

/// `kappa = sup_b (1/M) log L(b, h0_plus | synth)`, found by Newton from 0.
///
/// Refuses rank-deficient synthetic covariates: the maximizer is then not
/// unique and the supremum may not be attained.
pub fn compute_kappa(prior: &CatalyticPrior) -> Result<f64> {
    if let Some(k) = prior.kappa {
        return Ok(k);
    }
    kappa_and_argmax(prior, &SolverOptions::default()).map(|(k, _)| k)
}

/// Unnormalized log density of the adaptive prior on `(tau, beta)`:
/// `(p+alpha-1) log tau - tau (kappa + 1/gamma) + tau * lbar(beta)` where
/// `lbar` is the mean synthetic log-likelihood.
pub fn log_adaptive_prior(tau: f64, beta: &[f64], prior: &CatalyticPrior) -> Result<f64> {
    let hyper = prior
        .adaptive
        .ok_or_else(|| CoxError::InvalidArgument("prior has no adaptive hyperparameters".into()))?;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(CoxError::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    check_beta(beta, prior.p())?;
    let kappa = prior
        .kappa
        .ok_or_else(|| CoxError::InvalidArgument("adaptive prior requires a cached kappa".into()))?;
    let p = prior.p() as f64;
    let lbar = prior.mean_synthetic_loglik(beta);
    let v = (p + hyper.alpha - 1.0) * tau.ln() - tau * (kappa + 1.0 / hyper.gamma) + tau * lbar;
    Ok(if v.is_nan() { f64::NEG_INFINITY } else { v })
}

/// Norm-recoverability diagnostics for synthetic covariates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormRecoverability {
    /// Full column rank, equivalent to `min_{|b|=1} (1/M) sum |x*_i'b| > 0`.
    pub is_recoverable: bool,
    /// Smallest `(1/M) sum |x*_i'b|` over the probed unit directions. An upper
    /// bound on the true constant, reported as an estimate.
    pub c1_estimate: f64,
}

/// Check full column rank and probe the norm-recovery constant along the
/// canonical axes plus `samples` random unit directions.
pub fn norm_recoverability_check(x_star: &[f64], m: usize, p: usize, samples: usize, seed: u64) -> Result<NormRecoverability> {
    if m == 0 || p == 0 || x_star.len() != m * p {
        return Err(CoxError::InvalidArgument("x_star must be a non-empty m x p matrix".into()));
    }
    let rank = column_rank(x_star, m, p);
    let mean_abs = |dir: &[f64]| -> f64 {
        x_star
            .chunks_exact(p)
            .map(|row| crate::util::dot(row, dir).abs())
            .sum::<f64>()
            / m as f64
    };
    let mut best = f64::INFINITY;
    let mut dir = vec![0.0; p];
    for j in 0..p {
        dir.iter_mut().for_each(|v| *v = 0.0);
        dir[j] = 1.0;
        best = best.min(mean_abs(&dir));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..samples {
        for v in dir.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        dir.iter_mut().for_each(|v| *v /= norm);
        best = best.min(mean_abs(&dir));
    }
    let is_recoverable = rank == p;
    Ok(NormRecoverability {
        is_recoverable,
        c1_estimate: if is_recoverable { best } else { 0.0 },
    })
}
