use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};
use crate::optim::{newton_maximize, ConcaveObjective, FitResult, SolverOptions};
use crate::survival::{PartialLikelihood, Standardization, SurvivalDataset};

/// Largest change in any coordinate below which the lasso stops.
pub const LASSO_COORD_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "lambda", rename_all = "snake_case")]
pub enum Penalty {
    Ridge(f64),
    Lasso(f64),
}

impl Penalty {
    pub fn lambda(&self) -> f64 {
        match *self {
            Penalty::Ridge(l) | Penalty::Lasso(l) => l,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(CoxError::InvalidArgument(format!("lambda must be nonnegative, got {lambda}")))
    }
}

struct RidgeObjective<'a> {
    pl: PartialLikelihood<'a>,
    lambda: f64,
}

impl ConcaveObjective for RidgeObjective<'_> {
    fn dim(&self) -> usize {
        self.pl.p()
    }

    fn value(&self, beta: &[f64]) -> Result<f64> {
        Ok(self.pl.value(beta)? - self.lambda * beta.iter().map(|b| b * b).sum::<f64>())
    }

    fn derivatives(&self, beta: &[f64]) -> Result<(f64, DVector<f64>, DMatrix<f64>)> {
        let d = self.pl.derivatives(beta)?;
        let p = beta.len();
        let b = DVector::from_column_slice(beta);
        let value = d.value - self.lambda * b.norm_squared();
        let grad = d.gradient - &b * (2.0 * self.lambda);
        let hess = d.neg_hessian + DMatrix::identity(p, p) * (2.0 * self.lambda);
        Ok((value, grad, hess))
    }

    fn gradient_scale(&self) -> f64 {
        self.lambda
    }
}

/// Maximizer of `log PL(beta) - lambda |beta|^2` on the covariates as given.
pub fn ridge(data: &SurvivalDataset, lambda: f64, opts: &SolverOptions) -> Result<FitResult> {
    check_lambda(lambda)?;
    if data.event_count() == 0 {
        return Err(CoxError::Unidentifiable);
    }
    let obj = RidgeObjective {
        pl: PartialLikelihood::new(data),
        lambda,
    };
    newton_maximize(&obj, &vec![0.0; data.p()], opts)
}

fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

fn lasso_objective(pl: &PartialLikelihood, beta: &[f64], lambda: f64) -> Result<f64> {
    Ok(pl.value(beta)? - lambda * beta.iter().map(|b| b.abs()).sum::<f64>())
}

/// Maximize the lasso-penalized model `g'd - d'Hd/2 - lambda |beta + d|_1`
/// over the step `d` by cyclic coordinate descent.
fn lasso_quadratic_step(beta: &[f64], g: &DVector<f64>, h: &DMatrix<f64>, lambda: f64) -> Vec<f64> {
    let p = beta.len();
    let mut b = beta.to_vec();
    // grad_q[j] = g_j - sum_k H_jk (b_k - beta_k), kept current as b changes.
    let mut grad_q: Vec<f64> = g.iter().copied().collect();
    for _sweep in 0..10_000 {
        let mut max_change = 0.0f64;
        for j in 0..p {
            let hjj = h[(j, j)];
            let new = if hjj > 0.0 {
                soft_threshold(grad_q[j] + hjj * b[j], lambda) / hjj
            } else {
                0.0
            };
            let delta = new - b[j];
            if delta != 0.0 {
                for k in 0..p {
                    grad_q[k] -= h[(k, j)] * delta;
                }
                b[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        if max_change < 1e-13 * (1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
            break;
        }
    }
    b
}

/// Maximizer of `log PL(beta) - lambda |beta|_1` on the covariates as given,
/// by proximal Newton steps with backtracking, starting from `start`.
pub fn lasso_from(data: &SurvivalDataset, lambda: f64, start: &[f64], opts: &SolverOptions) -> Result<FitResult> {
    check_lambda(lambda)?;
    if data.event_count() == 0 {
        return Err(CoxError::Unidentifiable);
    }
    let p = data.p();
    if start.len() != p {
        return Err(CoxError::DimensionMismatch {
            expected: p,
            got: start.len(),
        });
    }
    let pl = PartialLikelihood::new(data);
    let mut beta = start.to_vec();
    let mut f = lasso_objective(&pl, &beta, lambda)?;
    let mut iterations = 0;
    let mut converged = false;
    let mut diverged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let d = pl.derivatives(&beta)?;
        let target = lasso_quadratic_step(&beta, &d.gradient, &d.neg_hessian, lambda);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = beta.iter().zip(&target).map(|(b, n)| b + t * (n - b)).collect();
            if let Ok(v) = lasso_objective(&pl, &trial, lambda) {
                if v >= f - 1e-13 * (1.0 + f.abs()) {
                    accepted = Some((trial, v));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((next, v)) = accepted else {
            let full_change = beta.iter().zip(&target).fold(0.0f64, |m, (b, n)| m.max((b - n).abs()));
            converged = full_change < LASSO_COORD_TOL;
            diverged = !converged;
            break;
        };
        let change = beta.iter().zip(&next).fold(0.0f64, |m, (b, n)| m.max((b - n).abs()));
        beta = next;
        f = v;
        if beta.iter().any(|b| b.abs() > opts.divergence_bound) {
            diverged = true;
            break;
        }
        if change < LASSO_COORD_TOL {
            converged = true;
            break;
        }
    }
    let d = pl.derivatives(&beta)?;
    // Distance of the gradient from the subdifferential of the penalty.
    let gradient_norm = d
        .gradient
        .iter()
        .zip(&beta)
        .map(|(g, b)| {
            let r = if *b > 0.0 {
                g - lambda
            } else if *b < 0.0 {
                g + lambda
            } else {
                (g.abs() - lambda).max(0.0)
            };
            r * r
        })
        .sum::<f64>()
        .sqrt();
    Ok(FitResult {
        beta,
        converged: converged && !diverged,
        iterations,
        gradient_norm,
        tolerance: LASSO_COORD_TOL,
        neg_hessian: d.neg_hessian,
        diverged,
        objective: f,
    })
}

pub fn lasso(data: &SurvivalDataset, lambda: f64, opts: &SolverOptions) -> Result<FitResult> {
    lasso_from(data, lambda, &vec![0.0; data.p()], opts)
}

/// Lasso fits along a path of penalties, each warm-started at the previous
/// solution. Order the path from large to small penalties for best effect.
pub fn lasso_path(data: &SurvivalDataset, lambdas: &[f64], opts: &SolverOptions) -> Result<Vec<FitResult>> {
    let mut start = vec![0.0; data.p()];
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let fit = lasso_from(data, lambda, &start, opts)?;
        if !fit.diverged {
            start.clone_from(&fit.beta);
        }
        out.push(fit);
    }
    Ok(out)
}

/// `max_j |d log PL / d beta_j|` at zero: the smallest lasso penalty whose
/// solution is identically zero.
pub fn lambda_max(data: &SurvivalDataset) -> Result<f64> {
    let d = PartialLikelihood::new(data).derivatives(&vec![0.0; data.p()])?;
    Ok(d.gradient.amax())
}

/// Penalized fit on internally standardized covariates. The returned
/// coefficients and information are on the original covariate scale; the
/// transform used is returned alongside.
pub fn fit_penalized_standardized(
    data: &SurvivalDataset,
    penalty: Penalty,
    opts: &SolverOptions,
) -> Result<(FitResult, Standardization)> {
    let (std_data, transform) = data.standardized();
    let fit = match penalty {
        Penalty::Ridge(l) => ridge(&std_data, l, opts)?,
        Penalty::Lasso(l) => lasso(&std_data, l, opts)?,
    };
    Ok((to_original_scale(fit, &transform), transform))
}

/// Map a fit on standardized covariates `z = (x - c)/s` back to `x`:
/// `beta_x = beta_z / s` and `H_x = S^-1 H_z S^-1`.
pub fn to_original_scale(mut fit: FitResult, transform: &Standardization) -> FitResult {
    fit.beta = transform.to_original_scale(&fit.beta);
    let s = &transform.scale;
    let p = s.len();
    for a in 0..p {
        for b in 0..p {
            fit.neg_hessian[(a, b)] /= s[a] * s[b];
        }
    }
    fit
}
