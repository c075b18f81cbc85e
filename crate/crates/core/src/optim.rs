//! Damped Newton ascent for smooth concave objectives.

use nalgebra::{DMatrix, DVector};

use crate::error::{CoxError, Result};

/// Relative Newton-step length above which a fit whose gradient has vanished
/// is treated as running off to infinity.
const MONOTONE_STEP_TOL: f64 = 1e-4;

/// Solver settings shared by every Newton-based estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Gradient-norm tolerance, multiplied by the objective's
    /// [`ConcaveObjective::gradient_scale`].
    pub tol: f64,
    pub max_iter: usize,
    /// Iterates with `max |beta_j|` above this bound are declared divergent.
    pub divergence_bound: f64,
    pub max_halvings: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100,
            divergence_bound: 50.0,
            max_halvings: 30,
        }
    }
}

/// A smooth concave objective in `beta`.
pub trait ConcaveObjective {
    fn dim(&self) -> usize;
    fn value(&self, beta: &[f64]) -> Result<f64>;
    /// Value, gradient and negative Hessian.
    fn derivatives(&self, beta: &[f64]) -> Result<(f64, DVector<f64>, DMatrix<f64>)>;
    /// Magnitude of the objective's weight. Objectives whose terms carry a
    /// total weight far above one (a prior with weight 1e10, say) cannot reach
    /// an absolute gradient of 1e-8 in floating point, so the tolerance is
    /// scaled by this factor.
    fn gradient_scale(&self) -> f64 {
        1.0
    }
}

/// Outcome of a Newton fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub beta: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Gradient tolerance actually applied (`tol * gradient_scale`).
    pub tolerance: f64,
    /// Negative Hessian of the objective at `beta`.
    pub neg_hessian: DMatrix<f64>,
    /// The iterates escaped towards infinity (monotone objective).
    pub diverged: bool,
    pub objective: f64,
}

impl FitResult {
    pub fn p(&self) -> usize {
        self.beta.len()
    }
}

/// Solve `h d = g` for a symmetric positive semidefinite `h`, adding a small
/// ridge when `h` is singular.
pub(crate) fn solve_psd(h: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = h.clone().cholesky() {
        let d = ch.solve(g);
        if d.iter().all(|v| v.is_finite()) {
            return Some(d);
        }
    }
    let p = h.nrows();
    let base = (h.trace() / p.max(1) as f64).abs().max(1.0);
    let mut mu = 1e-10 * base;
    for _ in 0..30 {
        let damped = h + DMatrix::identity(p, p) * mu;
        if let Some(ch) = damped.cholesky() {
            let d = ch.solve(g);
            if d.iter().all(|v| v.is_finite()) {
                return Some(d);
            }
        }
        mu *= 10.0;
    }
    None
}

/// Maximize `objective` by Newton's method with step halving.
///
/// Starting from `start`, each iteration solves the Newton system and halves
/// the step until the objective does not decrease. The fit stops when the
/// gradient norm falls below the (scaled) tolerance, when the iterate leaves
/// the `divergence_bound` box, or when step halving is exhausted on a
/// non-stationary point; the last two mark the result as diverged. A vanishing
/// gradient paired with a Newton step that is still long is also reported as
/// divergence, since that is how a monotone likelihood looks numerically.
pub fn newton_maximize<O: ConcaveObjective + ?Sized>(
    objective: &O,
    start: &[f64],
    opts: &SolverOptions,
) -> Result<FitResult> {
    let p = objective.dim();
    if start.len() != p {
        return Err(CoxError::DimensionMismatch {
            expected: p,
            got: start.len(),
        });
    }
    let tolerance = opts.tol * objective.gradient_scale().max(1.0);
    let mut beta = start.to_vec();
    let (mut f, mut g, mut h) = objective.derivatives(&beta)?;
    let mut iterations = 0;
    let mut diverged = false;

    loop {
        let gnorm = g.norm();
        let Some(step) = solve_psd(&h, &g) else {
            diverged = true;
            break;
        };
        if gnorm <= tolerance {
            // A flat gradient with a long Newton step means the objective is
            // still rising towards infinity, only too slowly to register.
            let step_max = step.amax();
            let beta_max = beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
            if step_max > MONOTONE_STEP_TOL * (1.0 + beta_max) {
                diverged = true;
            }
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, d)| b + t * d).collect();
            if let Ok(v) = objective.value(&trial) {
                if v >= f - 1e-13 * (1.0 + f.abs()) {
                    accepted = Some(trial);
                    break;
                }
            }
            t *= 0.5;
        }
        let Some(next) = accepted else {
            // No ascent along the Newton direction. When the predicted gain is
            // at rounding level we are stalled at the optimum, not diverging.
            let decrement = g.dot(&step);
            if decrement > 1e-12 * (1.0 + f.abs()) {
                diverged = true;
            }
            break;
        };
        beta = next;
        if beta.iter().any(|b| b.abs() > opts.divergence_bound) {
            diverged = true;
            let (nf, ng, nh) = objective.derivatives(&beta)?;
            f = nf;
            g = ng;
            h = nh;
            break;
        }
        let (nf, ng, nh) = objective.derivatives(&beta)?;
        f = nf;
        g = ng;
        h = nh;
    }

    let gradient_norm = g.norm();
    let converged = !diverged && gradient_norm <= tolerance;
    Ok(FitResult {
        beta,
        converged,
        iterations,
        gradient_norm,
        tolerance,
        neg_hessian: h,
        diverged,
        objective: f,
    })
}
