use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};
use crate::survival::SurvivalDataset;
use crate::util::{quantile_sorted, sorted_copy};

/// Boundaries `0 = s_0 < s_1 < ... < s_J` of the time partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionGrid {
    boundaries: Vec<f64>,
}

impl PartitionGrid {
    pub fn new(boundaries: Vec<f64>) -> Result<Self> {
        if boundaries.len() < 2 || boundaries[0] != 0.0 {
            return Err(CoxError::InvalidArgument("partition must start at 0 and have an interval".into()));
        }
        if boundaries.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(CoxError::InvalidArgument("partition boundaries must increase strictly".into()));
        }
        Ok(Self { boundaries })
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Number of intervals `J`.
    pub fn len(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn upper(&self) -> f64 {
        *self.boundaries.last().unwrap()
    }

    /// Zero-based index of the interval `(s_{j-1}, s_j]` holding `t`.
    pub fn interval_of(&self, t: f64) -> Option<usize> {
        if !(t > 0.0 && t <= self.upper()) {
            return None;
        }
        // First boundary >= t, minus one for the leading zero.
        Some(self.boundaries[1..].partition_point(|&s| s < t))
    }
}

pub const DEFAULT_INTERVALS: usize = 20;

/// Interior boundaries at the `j/J` type-7 quantiles of the distinct event
/// times, last boundary just above the largest observed time. `J` is capped
/// at the number of distinct event times and shrinks further when quantiles
/// coincide.
pub fn build_partition(data: &SurvivalDataset, intervals: usize) -> Result<PartitionGrid> {
    if intervals == 0 {
        return Err(CoxError::InvalidArgument("need at least one interval".into()));
    }
    let mut events: Vec<f64> = data
        .times()
        .iter()
        .zip(data.status())
        .filter(|(_, d)| **d)
        .map(|(t, _)| *t)
        .collect();
    if events.is_empty() {
        return Err(CoxError::Unidentifiable);
    }
    events = sorted_copy(&events);
    events.dedup();
    let j_max = intervals.min(events.len());
    let top = data.times().iter().cloned().fold(0.0, f64::max) * (1.0 + 1e-6);
    let mut boundaries = vec![0.0];
    for j in 1..j_max {
        let q = quantile_sorted(&events, j as f64 / j_max as f64);
        if q > *boundaries.last().unwrap() && q < top {
            boundaries.push(q);
        }
    }
    boundaries.push(top);
    PartitionGrid::new(boundaries)
}

/// Prior concentration and the Weibull guess `H*(t) = eta0 t^kappa0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaProcessConfig {
    pub c0: f64,
    pub eta0: f64,
    pub kappa0: f64,
}

pub const DEFAULT_C0: f64 = 2.0;

impl GammaProcessConfig {
    pub fn new(c0: f64, eta0: f64, kappa0: f64) -> Result<Self> {
        if [c0, eta0, kappa0].iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(CoxError::InvalidArgument("c0, eta0 and kappa0 must be positive".into()));
        }
        Ok(Self { c0, eta0, kappa0 })
    }

    /// `c0` with the intercept-only Weibull MLE of `data`.
    pub fn from_data(data: &SurvivalDataset, c0: f64) -> Result<Self> {
        let (eta0, kappa0) = fit_weibull_intercept(data)?;
        Self::new(c0, eta0, kappa0)
    }

    pub fn cumulative_hazard(&self, t: f64) -> f64 {
        self.eta0 * t.powf(self.kappa0)
    }

    /// Gamma shapes `c0 (H*(s_j) - H*(s_{j-1}))` of the increments.
    pub fn shapes(&self, grid: &PartitionGrid) -> Vec<f64> {
        grid.boundaries()
            .windows(2)
            .map(|w| self.c0 * (self.cumulative_hazard(w[1]) - self.cumulative_hazard(w[0])))
            .collect()
    }
}

/// `eta_hat(kappa) = events / sum Y^kappa`.
pub fn weibull_profile_eta(data: &SurvivalDataset, kappa: f64) -> f64 {
    data.event_count() as f64 / data.times().iter().map(|y| y.powf(kappa)).sum::<f64>()
}

/// MLE `(eta, kappa)` of the Weibull model with cumulative hazard
/// `eta t^kappa` and no covariates.
///
/// The profile log-likelihood in `kappa` is concave; it is maximized by
/// Newton steps kept inside a shrinking bracket. Sums of `Y^kappa` are taken
/// relative to the largest time so large `kappa` cannot overflow.
pub fn fit_weibull_intercept(data: &SurvivalDataset) -> Result<(f64, f64)> {
    let d = data.event_count() as f64;
    if d == 0.0 {
        return Err(CoxError::Unidentifiable);
    }
    let y_max = data.times().iter().cloned().fold(0.0, f64::max);
    let logs: Vec<f64> = data.times().iter().map(|y| (y / y_max).ln()).collect();
    let sum_event_log: f64 = logs
        .iter()
        .zip(data.status())
        .filter(|(_, e)| **e)
        .map(|(l, _)| l)
        .sum();
    // Derivatives of the profile in kappa, on the rescaled times Y / max(Y).
    let score = |k: f64| -> (f64, f64) {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for &l in &logs {
            let w = (k * l).exp();
            s0 += w;
            s1 += w * l;
            s2 += w * l * l;
        }
        let m1 = s1 / s0;
        let g = d / k + sum_event_log - d * m1;
        let h = -d / (k * k) - d * (s2 / s0 - m1 * m1);
        (g, h)
    };
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut k = 1.0;
    for _ in 0..500 {
        let (g, h) = score(k);
        if g.abs() <= 1e-12 * d * (1.0 + 1.0 / k) {
            let eta_scaled = d / logs.iter().map(|l| (k * l).exp()).sum::<f64>();
            // eta (Y/ymax)^k = eta_scaled (Y/ymax)^k  =>  eta = eta_scaled / ymax^k
            let eta = (eta_scaled.ln() - k * y_max.ln()).exp();
            return Ok((eta, k));
        }
        if g > 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let mut next = k - g / h;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * k.max(lo) };
        }
        if next > 1e8 {
            break;
        }
        k = next;
    }
    Err(CoxError::NoConvergence {
        iterations: 500,
        gradient_norm: score(k).0.abs(),
    })
}
