use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{CoxError, Result};
use crate::optim::{newton_maximize, ConcaveObjective, FitResult, SolverOptions};
use crate::survival::dataset::SurvivalDataset;
use crate::survival::likelihood::{log_partial_likelihood, PartialLikelihood};

impl ConcaveObjective for PartialLikelihood<'_> {
    fn dim(&self) -> usize {
        self.p()
    }

    fn value(&self, beta: &[f64]) -> Result<f64> {
        PartialLikelihood::value(self, beta)
    }

    fn derivatives(&self, beta: &[f64]) -> Result<(f64, DVector<f64>, DMatrix<f64>)> {
        let d = PartialLikelihood::derivatives(self, beta)?;
        Ok((d.value, d.gradient, d.neg_hessian))
    }
}

/// Maximum partial likelihood estimate, starting from `beta = 0`.
///
/// A monotone partial likelihood (for instance a covariate that perfectly
/// orders the event times) is reported through `diverged` rather than as an
/// error, with `beta` holding the last iterate.
pub fn mple(data: &SurvivalDataset, opts: &SolverOptions) -> Result<FitResult> {
    if data.event_count() == 0 {
        return Err(CoxError::InvalidData("MPLE needs at least one event".into()));
    }
    let pl = PartialLikelihood::new(data);
    newton_maximize(&pl, &vec![0.0; data.p()], opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Standard errors from the inverse observed information.
pub fn standard_errors(fit: &FitResult) -> Result<Vec<f64>> {
    let inv = fit
        .neg_hessian
        .clone()
        .cholesky()
        .ok_or(CoxError::Singular)?
        .inverse();
    let se: Vec<f64> = (0..fit.p()).map(|j| inv[(j, j)].sqrt()).collect();
    if se.iter().any(|s| !s.is_finite()) {
        return Err(CoxError::Singular);
    }
    Ok(se)
}

/// Wald intervals `beta_j +- z_{(1+level)/2} * se_j`.
pub fn wald_intervals(fit: &FitResult, level: f64) -> Result<Vec<Interval>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(CoxError::InvalidArgument(format!("level must lie in (0, 1), got {level}")));
    }
    if !fit.converged {
        return Err(CoxError::InvalidArgument("Wald intervals need a converged fit".into()));
    }
    let z = crate::util::normal_quantile(0.5 * (1.0 + level));
    Ok(standard_errors(fit)?
        .into_iter()
        .zip(&fit.beta)
        .map(|(se, b)| Interval {
            lower: b - z * se,
            upper: b + z * se,
        })
        .collect())
}

/// Test-set deviance `l(beta_ref) - l(beta_hat)`; smaller is better.
pub fn predictive_deviance(beta_ref: &[f64], beta_hat: &[f64], test: &SurvivalDataset) -> Result<f64> {
    Ok(log_partial_likelihood(beta_ref, test)? - log_partial_likelihood(beta_hat, test)?)
}

/// Prediction score `2 [l(beta_hat) - l(0)]` on a test set; larger is better.
pub fn prediction_score(beta_hat: &[f64], test: &SurvivalDataset) -> Result<f64> {
    let null = vec![0.0; beta_hat.len()];
    Ok(2.0 * (log_partial_likelihood(beta_hat, test)? - log_partial_likelihood(&null, test)?))
}
