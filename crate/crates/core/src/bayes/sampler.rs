//! Metropolis-within-Gibbs sampler for the joint posterior of the
//! coefficients, the hazard increments and, optionally, `tau`.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};
use crate::estimators::{cre, ridge};
use crate::optim::SolverOptions;
use crate::rng::{derive_rng, tags, Rng};
use crate::survival::{mple, pl_derivatives, SurvivalDataset};
use crate::synthesis::{log_catalytic_prior_derivatives, CatalyticPrior};
use crate::util::log1m_exp_neg;

use super::likelihood::{BetaPrior, GroupedData};
use super::partition::{GammaProcessConfig, PartitionGrid};

const BETA_TARGET: f64 = 0.23;
const H_TARGET: f64 = 0.44;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Iterations per chain, burn-in included.
    pub iterations: usize,
    pub burnin: usize,
    pub chains: usize,
    pub adaptive_tau: bool,
    pub seed: u64,
    /// Starting coefficients; `None` uses the point estimate matching the prior.
    pub init_beta: Option<Vec<f64>>,
    /// Hold the coefficients at `init_beta` and only update `h` (and `tau`).
    pub fix_beta: bool,
}

impl SamplerConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            iterations: 4000,
            burnin: 2000,
            chains: 1,
            adaptive_tau: false,
            seed,
            init_beta: None,
            fix_beta: false,
        }
    }

    fn validate(&self, prior: &BetaPrior, p: usize) -> Result<()> {
        if self.iterations <= self.burnin {
            return Err(CoxError::InvalidArgument("iterations must exceed burn-in".into()));
        }
        if self.chains == 0 {
            return Err(CoxError::InvalidArgument("need at least one chain".into()));
        }
        if self.adaptive_tau != matches!(prior, BetaPrior::Adaptive(_)) {
            return Err(CoxError::InvalidArgument(
                "adaptive_tau must be set exactly when the prior is adaptive".into(),
            ));
        }
        if let BetaPrior::Adaptive(cp) = prior {
            if cp.adaptive.is_none() || cp.kappa().is_none() {
                return Err(CoxError::InvalidArgument("adaptive prior needs hyperparameters and kappa".into()));
            }
        }
        if let BetaPrior::Gaussian { variance } = prior {
            if !(variance.is_finite() && *variance > 0.0) {
                return Err(CoxError::InvalidArgument("Gaussian prior variance must be positive".into()));
            }
        }
        if let Some(b) = &self.init_beta {
            if b.len() != p {
                return Err(CoxError::DimensionMismatch { expected: p, got: b.len() });
            }
        } else if self.fix_beta {
            return Err(CoxError::InvalidArgument("fix_beta requires init_beta".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Acceptance {
    pub beta: f64,
    /// Per hazard increment.
    pub h: Vec<f64>,
}

/// Retained draws of all chains, stacked chain after chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosteriorSamples {
    pub p: usize,
    pub j: usize,
    pub chains: usize,
    pub draws_per_chain: usize,
    pub burnin: usize,
    pub seed: u64,
    /// Row-major `S x p`.
    pub beta: Vec<f64>,
    /// Row-major `S x J`.
    pub h: Vec<f64>,
    pub tau: Option<Vec<f64>>,
    /// Post-burn-in acceptance rates, averaged over chains.
    pub acceptance: Acceptance,
}

impl PosteriorSamples {
    pub fn len(&self) -> usize {
        self.chains * self.draws_per_chain
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn beta_draw(&self, s: usize) -> &[f64] {
        &self.beta[s * self.p..(s + 1) * self.p]
    }

    pub fn h_draw(&self, s: usize) -> &[f64] {
        &self.h[s * self.j..(s + 1) * self.j]
    }

    /// Draws of coefficient `k` for every chain, in order.
    pub fn beta_column(&self, k: usize) -> Vec<f64> {
        (0..self.len()).map(|s| self.beta[s * self.p + k]).collect()
    }

    /// Per-chain slices of a scalar series of length `len()`.
    pub fn split_by_chain<'a>(&self, series: &'a [f64]) -> Vec<&'a [f64]> {
        series.chunks(self.draws_per_chain).collect()
    }
}

/// One draw of `tau` from its Gamma conditional
/// `Gamma(p + alpha, rate kappa + 1/gamma - lbar(beta))`.
pub fn sample_tau_conditional(beta: &[f64], prior: &CatalyticPrior, rng: &mut Rng) -> Result<f64> {
    let (shape, rate) = tau_conditional_parameters(beta, prior)?;
    let g = Gamma::new(shape, 1.0 / rate).map_err(|e| CoxError::InvalidArgument(e.to_string()))?;
    Ok(g.sample(rng))
}

/// Shape and rate of the conditional law of `tau` given `beta`.
pub fn tau_conditional_parameters(beta: &[f64], prior: &CatalyticPrior) -> Result<(f64, f64)> {
    let hyper = prior
        .adaptive
        .ok_or_else(|| CoxError::InvalidArgument("prior has no adaptive hyperparameters".into()))?;
    let kappa = prior
        .kappa()
        .ok_or_else(|| CoxError::InvalidArgument("adaptive prior requires a cached kappa".into()))?;
    let shape = prior.p() as f64 + hyper.alpha;
    let rate = kappa + 1.0 / hyper.gamma - prior.mean_synthetic_loglik(beta);
    if !(rate.is_finite() && rate > 0.0) {
        return Err(CoxError::InvalidArgument(format!("tau conditional rate is not positive ({rate})")));
    }
    Ok((shape, rate))
}

/// Starting coefficients matching the prior: the CRE for catalytic priors,
/// the ridge fit with `lambda = 1/(2 variance)` for the Gaussian prior, the
/// MPLE (zero if it diverges) for a flat prior.
pub fn initial_beta(data: &SurvivalDataset, prior: &BetaPrior) -> Result<Vec<f64>> {
    let opts = SolverOptions::default();
    let fit = match prior {
        BetaPrior::Catalytic(cp) | BetaPrior::Adaptive(cp) => cre(data, cp, &opts)?,
        BetaPrior::Gaussian { variance } => ridge(data, 1.0 / (2.0 * variance), &opts)?,
        BetaPrior::Flat => match mple(data, &opts) {
            Ok(f) if !f.diverged => f,
            _ => return Ok(vec![0.0; data.p()]),
        },
    };
    Ok(fit.beta)
}

/// Cholesky factor of `2.38^2/p` times the inverse curvature of the
/// log partial likelihood plus log prior at `beta`.
fn proposal_factor(data: &SurvivalDataset, prior: &BetaPrior, beta: &[f64], tau: f64) -> Result<DMatrix<f64>> {
    let p = data.p();
    let (_, mut h) = pl_derivatives(beta, data)?;
    match prior {
        BetaPrior::Catalytic(cp) => h += log_catalytic_prior_derivatives(beta, cp)?.1,
        BetaPrior::Adaptive(cp) => h += log_catalytic_prior_derivatives(beta, &cp.with_tau(tau)?)?.1,
        BetaPrior::Gaussian { variance } => h += DMatrix::identity(p, p) / *variance,
        BetaPrior::Flat => {}
    }
    covariance_factor(&h, true, 2.38 * 2.38 / p as f64)
}

/// Cholesky factor of `scale * m^-1` (if `invert`) or `scale * m`, with a
/// growing ridge when `m` is not numerically positive definite.
fn covariance_factor(m: &DMatrix<f64>, invert: bool, scale: f64) -> Result<DMatrix<f64>> {
    let p = m.nrows();
    let base = (m.trace() / p as f64).abs().max(1e-12);
    let mut ridge = 0.0;
    for _ in 0..40 {
        let mm = m + DMatrix::identity(p, p) * ridge;
        if let Some(ch) = mm.clone().cholesky() {
            let cov = if invert { ch.inverse() } else { mm };
            if let Some(c) = (cov * scale).cholesky() {
                let l = c.l();
                if l.iter().all(|v| v.is_finite()) {
                    return Ok(l);
                }
            }
        }
        ridge = if ridge == 0.0 { 1e-10 * base } else { ridge * 10.0 };
    }
    Err(CoxError::Singular)
}

struct Chain<'a> {
    data: &'a SurvivalDataset,
    grouped: &'a GroupedData,
    prior: &'a BetaPrior,
    shapes: &'a [f64],
    c0: f64,
}

struct ChainOutput {
    beta: Vec<f64>,
    h: Vec<f64>,
    tau: Vec<f64>,
    beta_accept: f64,
    h_accept: Vec<f64>,
}

impl Chain<'_> {
    fn theta(&self, beta: &[f64]) -> Vec<f64> {
        self.data.linear_predictor(beta).into_iter().map(f64::exp).collect()
    }

    fn beta_target(&self, beta: &[f64], theta: &[f64], h: &[f64], tau: f64) -> f64 {
        let v = self.grouped.log_likelihood_theta(theta, h) + self.prior.log_beta_kernel(beta, tau);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }

    /// Log target of `u = log h_j` given everything else.
    fn h_target(&self, u: f64, j: usize, survive: f64, events: &[usize], theta: &[f64]) -> f64 {
        let h = u.exp();
        let mut v = -h * survive + self.shapes[j] * u - self.c0 * h;
        for &l in events {
            v += log1m_exp_neg(h * theta[l]);
        }
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }

    fn run(&self, cfg: &SamplerConfig, init_beta: &[f64], factor: &DMatrix<f64>, tau0: f64, rng: &mut Rng) -> Result<ChainOutput> {
        let p = init_beta.len();
        let jn = self.shapes.len();
        let mut beta = init_beta.to_vec();
        let mut theta = self.theta(&beta);
        let mut h: Vec<f64> = self.shapes.iter().map(|a| a / self.c0).collect();
        let mut tau = tau0;
        let mut l = factor.clone();
        let mut log_scale_beta = 0.0f64;
        let mut log_scale_h = vec![0.0f64; jn];
        let kept = cfg.iterations - cfg.burnin;
        let mut out = ChainOutput {
            beta: Vec::with_capacity(kept * p),
            h: Vec::with_capacity(kept * jn),
            tau: Vec::new(),
            beta_accept: 0.0,
            h_accept: vec![0.0; jn],
        };
        let mut burn_draws: Vec<Vec<f64>> = Vec::new();
        let mut cur_target = self.beta_target(&beta, &theta, &h, tau);

        for it in 0..cfg.iterations {
            let adapting = it < cfg.burnin;
            let gain = 1.0 / ((it + 1) as f64).powf(0.6);

            if !cfg.fix_beta {
                let z: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
                let step = &l * DVector::from_vec(z) * log_scale_beta.exp();
                let prop: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, d)| b + d).collect();
                let prop_theta = self.theta(&prop);
                let prop_target = self.beta_target(&prop, &prop_theta, &h, tau);
                let log_ratio = prop_target - cur_target;
                let accept_prob = if log_ratio >= 0.0 { 1.0 } else { log_ratio.exp() };
                let accepted = rng.random::<f64>() < accept_prob;
                if accepted {
                    beta = prop;
                    theta = prop_theta;
                }
                if adapting {
                    log_scale_beta += gain * (accept_prob - BETA_TARGET);
                    burn_draws.push(beta.clone());
                    // Halfway through burn-in, switch to the empirical covariance
                    // of the second quarter of draws.
                    if it + 1 == cfg.burnin / 2 && burn_draws.len() >= 4 * (p + 5) {
                        let tail = &burn_draws[burn_draws.len() / 2..];
                        if let Some(fresh) = empirical_factor(tail, p) {
                            l = fresh;
                            log_scale_beta = 0.0;
                        }
                    }
                } else if accepted {
                    out.beta_accept += 1.0;
                }
            }

            let (survive, events) = self.grouped.interval_terms(&theta);
            for j in 0..jn {
                let u = h[j].ln();
                let cur = self.h_target(u, j, survive[j], &events[j], &theta);
                let u_prop = u + log_scale_h[j].exp() * rng.sample::<f64, _>(StandardNormal);
                let prop = self.h_target(u_prop, j, survive[j], &events[j], &theta);
                let log_ratio = prop - cur;
                let accept_prob = if log_ratio >= 0.0 { 1.0 } else { log_ratio.exp() };
                let accepted = rng.random::<f64>() < accept_prob && u_prop.exp() > 0.0;
                if accepted {
                    h[j] = u_prop.exp();
                }
                if adapting {
                    log_scale_h[j] += gain * (accept_prob - H_TARGET);
                } else if accepted {
                    out.h_accept[j] += 1.0;
                }
            }

            if let BetaPrior::Adaptive(cp) = self.prior {
                tau = sample_tau_conditional(&beta, cp, rng)?;
            }
            cur_target = self.beta_target(&beta, &theta, &h, tau);

            if !adapting {
                out.beta.extend_from_slice(&beta);
                out.h.extend_from_slice(&h);
                if cfg.adaptive_tau {
                    out.tau.push(tau);
                }
            }
        }
        out.beta_accept /= kept as f64;
        out.h_accept.iter_mut().for_each(|a| *a /= kept as f64);
        Ok(out)
    }
}

fn empirical_factor(draws: &[Vec<f64>], p: usize) -> Option<DMatrix<f64>> {
    let n = draws.len() as f64;
    let mut mean = vec![0.0; p];
    for d in draws {
        for k in 0..p {
            mean[k] += d[k] / n;
        }
    }
    let mut cov = DMatrix::zeros(p, p);
    for d in draws {
        for a in 0..p {
            for b in 0..p {
                cov[(a, b)] += (d[a] - mean[a]) * (d[b] - mean[b]) / (n - 1.0);
            }
        }
    }
    if cov.diagonal().iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    covariance_factor(&cov, false, 2.38 * 2.38 / p as f64).ok()
}

/// Draw from the joint posterior of `(beta, h)` (and `tau` when adaptive)
/// by Metropolis-within-Gibbs.
///
/// Each iteration makes one multivariate random-walk step for `beta`, one
/// log-scale random-walk step per increment `h_j`, and an exact Gamma draw of
/// `tau` for the adaptive prior. Step sizes adapt during burn-in towards
/// acceptance 0.23 (`beta`) and 0.44 (`h_j`) and are frozen afterwards.
/// Chains use independent streams derived from the seed and run in parallel.
pub fn sample_posterior(
    data: &SurvivalDataset,
    grid: &PartitionGrid,
    gp: &GammaProcessConfig,
    prior: &BetaPrior,
    config: &SamplerConfig,
) -> Result<PosteriorSamples> {
    let p = data.p();
    config.validate(prior, p)?;
    let shapes = gp.shapes(grid);
    if shapes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(CoxError::InvalidArgument("Gamma increment shapes must be positive".into()));
    }
    let grouped = GroupedData::new(data, grid)?;
    let init = match &config.init_beta {
        Some(b) => b.clone(),
        None => initial_beta(data, prior)?,
    };
    let tau0 = match prior {
        BetaPrior::Catalytic(cp) | BetaPrior::Adaptive(cp) => cp.tau,
        _ => 0.0,
    };
    let factor = if config.fix_beta {
        DMatrix::zeros(p, p)
    } else {
        proposal_factor(data, prior, &init, tau0)?
    };
    let chain = Chain {
        data,
        grouped: &grouped,
        prior,
        shapes: &shapes,
        c0: gp.c0,
    };
    let outputs: Vec<Result<ChainOutput>> = (0..config.chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = derive_rng(config.seed, &[tags::SAMPLER, c as u64]);
            chain.run(config, &init, &factor, tau0, &mut rng)
        })
        .collect();

    let kept = config.iterations - config.burnin;
    let jn = shapes.len();
    let mut samples = PosteriorSamples {
        p,
        j: jn,
        chains: config.chains,
        draws_per_chain: kept,
        burnin: config.burnin,
        seed: config.seed,
        beta: Vec::with_capacity(config.chains * kept * p),
        h: Vec::with_capacity(config.chains * kept * jn),
        tau: config.adaptive_tau.then(Vec::new),
        acceptance: Acceptance {
            beta: 0.0,
            h: vec![0.0; jn],
        },
    };
    let nc = config.chains as f64;
    for out in outputs {
        let out = out?;
        samples.beta.extend(out.beta);
        samples.h.extend(out.h);
        if let Some(t) = samples.tau.as_mut() {
            t.extend(out.tau);
        }
        samples.acceptance.beta += out.beta_accept / nc;
        for (a, b) in samples.acceptance.h.iter_mut().zip(out.h_accept) {
            *a += b / nc;
        }
    }
    Ok(samples)
}
