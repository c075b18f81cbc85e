//! Data-generating processes for the simulation experiments.

use rand::Rng as _;
use rand_distr::{Bernoulli, ChiSquared, Distribution, Exp, StandardNormal, Uniform};

use crate::error::{CoxError, Result};
use crate::rng::Rng;
use crate::survival::SurvivalDataset;

/// Baseline hazard of the event-time law.
pub const BASE_RATE: f64 = 0.5;

/// `(4, -4, 3, -3, 1, -1, 1, -1, 1, ..., 1) / sqrt(p)`.
pub fn beta0_pattern(p: usize) -> Result<Vec<f64>> {
    if p < 8 {
        return Err(CoxError::InvalidArgument(format!("coefficient pattern needs p >= 8, got {p}")));
    }
    let head = [4.0, -4.0, 3.0, -3.0, 1.0, -1.0, 1.0, -1.0];
    let s = (p as f64).sqrt();
    Ok((0..p).map(|j| head.get(j).copied().unwrap_or(1.0) / s).collect())
}

/// Row-major `n x p` covariates: Bernoulli(0.1), chi2(1), chi2(4), then
/// standard normal columns.
pub fn draw_covariates(n: usize, p: usize, rng: &mut Rng) -> Vec<f64> {
    let bern = Bernoulli::new(0.1).unwrap();
    let chi1 = ChiSquared::new(1.0).unwrap();
    let chi4 = ChiSquared::new(4.0).unwrap();
    let mut x = Vec::with_capacity(n * p);
    for _ in 0..n {
        for j in 0..p {
            x.push(match j {
                0 => f64::from(u8::from(bern.sample(rng))),
                1 => chi1.sample(rng),
                2 => chi4.sample(rng),
                _ => StandardNormal.sample(rng),
            });
        }
    }
    x
}

/// Exponential event times with rate `base_rate * exp(x'beta)`, censored by
/// Uniform(0, xi) when `xi` is finite.
pub fn draw_survival(x: &[f64], beta: &[f64], base_rate: f64, xi: f64, rng: &mut Rng) -> Result<SurvivalDataset> {
    let p = beta.len();
    let n = x.len() / p;
    let mut times = Vec::with_capacity(n);
    let mut status = Vec::with_capacity(n);
    for row in x.chunks_exact(p) {
        let rate = base_rate * crate::util::dot(row, beta).exp();
        let t = draw_positive(&Exp::new(rate).map_err(|e| CoxError::InvalidArgument(e.to_string()))?, rng);
        if xi.is_finite() {
            let c = draw_positive(&Uniform::new(0.0, xi).map_err(|e| CoxError::InvalidArgument(e.to_string()))?, rng);
            times.push(t.min(c));
            status.push(t <= c);
        } else {
            times.push(t);
            status.push(true);
        }
    }
    SurvivalDataset::new(x.to_vec(), p, times, status)
}

fn draw_positive<D: Distribution<f64>>(d: &D, rng: &mut Rng) -> f64 {
    loop {
        let v = d.sample(rng);
        if v > 0.0 {
            return v;
        }
    }
}

/// Probability that Uniform(0, xi) censors an Exponential(rate) time.
pub fn censoring_probability(rate: f64, xi: f64) -> f64 {
    let z = rate * xi;
    if z < 1e-8 {
        1.0 - z / 2.0
    } else {
        -f64::exp_m1(-z) / z
    }
}

/// `xi` such that the expected censoring fraction is `censor_rate`, averaging
/// the censoring probability over `mc_size` covariate draws.
///
/// Bisection on `log xi` with the covariate sample held fixed, run until the
/// bracket is relatively narrower than 1e-10.
pub fn calibrate_xi(censor_rate: f64, beta0: &[f64], mc_size: usize, rng: &mut Rng) -> Result<f64> {
    if !(censor_rate > 0.0 && censor_rate < 1.0) {
        return Err(CoxError::InvalidArgument(format!("censor rate must lie in (0, 1), got {censor_rate}")));
    }
    if mc_size == 0 {
        return Err(CoxError::InvalidArgument("mc_size must be positive".into()));
    }
    let x = draw_covariates(mc_size, beta0.len(), rng);
    let rates: Vec<f64> = x
        .chunks_exact(beta0.len())
        .map(|row| BASE_RATE * crate::util::dot(row, beta0).exp())
        .collect();
    let rate_at = |xi: f64| rates.iter().map(|&l| censoring_probability(l, xi)).sum::<f64>() / rates.len() as f64;
    let (mut lo, mut hi) = ((1e-12f64).ln(), (1e12f64).ln());
    let (r_lo, r_hi) = (rate_at(lo.exp()), rate_at(hi.exp()));
    if !(r_lo > censor_rate && r_hi < censor_rate) {
        return Err(CoxError::Bracket(format!(
            "censoring fraction spans [{r_hi}, {r_lo}], target {censor_rate}"
        )));
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if rate_at(mid.exp()) > censor_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// One simulation scenario: dimension, truth and censoring bound.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub p: usize,
    pub beta0: Vec<f64>,
    pub censor_rate: f64,
    pub xi: f64,
}

/// Monte Carlo size used when calibrating `xi` for a scenario.
pub const XI_MC_SIZE: usize = 100_000;

impl Scenario {
    pub fn new(p: usize, censor_rate: f64, rng: &mut Rng) -> Result<Self> {
        let beta0 = beta0_pattern(p)?;
        let xi = calibrate_xi(censor_rate, &beta0, XI_MC_SIZE, rng)?;
        Ok(Self {
            p,
            beta0,
            censor_rate,
            xi,
        })
    }

    pub fn simulate(&self, n: usize, rng: &mut Rng) -> Result<SurvivalDataset> {
        let x = draw_covariates(n, self.p, rng);
        draw_survival(&x, &self.beta0, BASE_RATE, self.xi, rng)
    }
}

/// Uniform draw on the sphere of the given radius in `R^p`.
pub fn uniform_on_sphere(p: usize, radius: f64, rng: &mut Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|a| radius * a / norm).collect();
        }
    }
}
