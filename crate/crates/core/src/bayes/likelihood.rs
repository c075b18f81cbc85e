use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};
use crate::survival::SurvivalDataset;
use crate::synthesis::{log_adaptive_prior, log_catalytic_prior, CatalyticPrior};
use crate::util::log1m_exp_neg;

use super::partition::{GammaProcessConfig, PartitionGrid};

/// Interval membership of each subject, precomputed for repeated
/// likelihood evaluations.
#[derive(Debug, Clone)]
pub struct GroupedData {
    /// Interval holding each subject's time.
    pub interval: Vec<usize>,
    pub status: Vec<bool>,
    pub j: usize,
}

impl GroupedData {
    pub fn new(data: &SurvivalDataset, grid: &PartitionGrid) -> Result<Self> {
        let interval = data
            .times()
            .iter()
            .map(|&t| {
                grid.interval_of(t)
                    .ok_or_else(|| CoxError::InvalidArgument(format!("time {t} lies outside the partition")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            interval,
            status: data.status().to_vec(),
            j: grid.len(),
        })
    }

    /// Log-likelihood given the relative risks `theta_i = exp(x_i'beta)`.
    pub fn log_likelihood_theta(&self, theta: &[f64], h: &[f64]) -> f64 {
        let mut cum = Vec::with_capacity(self.j + 1);
        cum.push(0.0);
        for &v in h {
            cum.push(cum.last().unwrap() + v);
        }
        let mut total = 0.0;
        for ((&k, &d), &t) in self.interval.iter().zip(&self.status).zip(theta) {
            if d {
                total += -t * cum[k] + log1m_exp_neg(h[k] * t);
            } else {
                total -= t * cum[k + 1];
            }
        }
        total
    }

    /// Per interval: the summed `theta` of subjects at risk that do not fail
    /// there, and the list of failing subjects.
    pub fn interval_terms(&self, theta: &[f64]) -> (Vec<f64>, Vec<Vec<usize>>) {
        let mut survive = vec![0.0; self.j];
        let mut events = vec![Vec::new(); self.j];
        // survive[j] = sum over subjects with k_i > j, plus censored with k_i = j.
        let mut beyond = vec![0.0; self.j + 1];
        for (i, (&k, &d)) in self.interval.iter().zip(&self.status).enumerate() {
            beyond[k] += theta[i];
            if d {
                events[k].push(i);
            } else {
                survive[k] += theta[i];
            }
        }
        let mut tail = 0.0;
        for j in (0..self.j).rev() {
            survive[j] += tail;
            tail += beyond[j];
        }
        (survive, events)
    }
}

fn check_h(h: &[f64], j: usize) -> Result<()> {
    if h.len() != j {
        return Err(CoxError::DimensionMismatch { expected: j, got: h.len() });
    }
    if h.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(CoxError::InvalidArgument("hazard increments must be positive and finite".into()));
    }
    Ok(())
}

fn theta(data: &SurvivalDataset, beta: &[f64]) -> Result<Vec<f64>> {
    if beta.len() != data.p() {
        return Err(CoxError::DimensionMismatch {
            expected: data.p(),
            got: beta.len(),
        });
    }
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(CoxError::NonFinite("coefficient vector"));
    }
    Ok(data.linear_predictor(beta).into_iter().map(f64::exp).collect())
}

/// Grouped-data log-likelihood of `(beta, h)`: subjects at risk in interval
/// `j` who do not fail there contribute `-h_j theta`, failures contribute
/// `log(1 - exp(-h_j theta))`.
pub fn grouped_log_likelihood(beta: &[f64], h: &[f64], data: &SurvivalDataset, grid: &PartitionGrid) -> Result<f64> {
    check_h(h, grid.len())?;
    let grouped = GroupedData::new(data, grid)?;
    Ok(grouped.log_likelihood_theta(&theta(data, beta)?, h))
}

/// Log density of the independent Gamma increments, constants dropped:
/// `sum_j (a_j - 1) log h_j - c0 h_j`.
pub fn log_increment_prior(h: &[f64], shapes: &[f64], c0: f64) -> f64 {
    h.iter().zip(shapes).map(|(&v, &a)| (a - 1.0) * v.ln() - c0 * v).sum()
}

/// Prior on the regression coefficients in the joint posterior.
#[derive(Debug, Clone)]
pub enum BetaPrior {
    /// Cox catalytic prior with fixed total weight.
    Catalytic(CatalyticPrior),
    /// Cox adaptive catalytic prior; `tau` is sampled. The prior must carry
    /// `kappa` and hyperparameters.
    Adaptive(CatalyticPrior),
    /// Independent Normal(0, variance) coefficients.
    Gaussian { variance: f64 },
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorKind {
    Catalytic,
    Adaptive,
    Gaussian,
    Flat,
}

impl BetaPrior {
    pub fn kind(&self) -> PriorKind {
        match self {
            BetaPrior::Catalytic(_) => PriorKind::Catalytic,
            BetaPrior::Adaptive(_) => PriorKind::Adaptive,
            BetaPrior::Gaussian { .. } => PriorKind::Gaussian,
            BetaPrior::Flat => PriorKind::Flat,
        }
    }

    /// Log prior of `beta` (and `tau` for the adaptive prior).
    pub fn log_density(&self, beta: &[f64], tau: Option<f64>) -> Result<f64> {
        match self {
            BetaPrior::Catalytic(prior) => log_catalytic_prior(beta, prior),
            BetaPrior::Adaptive(prior) => {
                let tau = tau.ok_or_else(|| CoxError::InvalidArgument("adaptive prior needs tau".into()))?;
                log_adaptive_prior(tau, beta, prior)
            }
            BetaPrior::Gaussian { variance } => Ok(-beta.iter().map(|b| b * b).sum::<f64>() / (2.0 * variance)),
            BetaPrior::Flat => Ok(0.0),
        }
    }

    /// The part of the log prior that varies with `beta` when `tau` is held
    /// fixed; what the Metropolis step for `beta` needs.
    pub fn log_beta_kernel(&self, beta: &[f64], tau: f64) -> f64 {
        match self {
            BetaPrior::Catalytic(prior) => prior.tau * prior.mean_synthetic_loglik(beta),
            BetaPrior::Adaptive(prior) => tau * prior.mean_synthetic_loglik(beta),
            BetaPrior::Gaussian { variance } => -beta.iter().map(|b| b * b).sum::<f64>() / (2.0 * variance),
            BetaPrior::Flat => 0.0,
        }
    }
}

/// Unnormalized log joint posterior of `(beta, h)` under the Gamma-process
/// prior and the given coefficient prior (`tau` only for the adaptive one).
pub fn log_joint_posterior(
    beta: &[f64],
    h: &[f64],
    tau: Option<f64>,
    data: &SurvivalDataset,
    grid: &PartitionGrid,
    gp: &GammaProcessConfig,
    prior: &BetaPrior,
) -> Result<f64> {
    let shapes = gp.shapes(grid);
    if shapes.iter().any(|a| !(*a > 0.0)) {
        return Err(CoxError::InvalidArgument("Gamma increment shapes must be positive".into()));
    }
    let ll = grouped_log_likelihood(beta, h, data, grid)?;
    Ok(ll + log_increment_prior(h, &shapes, gp.c0) + prior.log_density(beta, tau)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_subject_examples() {
        let data = SurvivalDataset::new(vec![0.0], 1, vec![1.0], vec![true]).unwrap();
        let grid = PartitionGrid::new(vec![0.0, 2.0]).unwrap();
        let v = grouped_log_likelihood(&[0.0], &[0.7], &data, &grid).unwrap();
        assert!((v - (1.0 - (-0.7f64).exp()).ln()).abs() < 1e-15);
        let big = grouped_log_likelihood(&[0.0], &[60.0], &data, &grid).unwrap();
        assert!(big.abs() < 1e-20);

        let cens = SurvivalDataset::new(vec![0.0], 1, vec![1.0], vec![false]).unwrap();
        let grid2 = PartitionGrid::new(vec![0.0, 1.5, 3.0]).unwrap();
        let v = grouped_log_likelihood(&[0.0], &[0.4, 0.9], &cens, &grid2).unwrap();
        assert!((v + 0.4).abs() < 1e-15);
        assert!(grouped_log_likelihood(&[0.0], &[0.4, 0.0], &cens, &grid2).is_err());
    }

    #[test]
    fn interval_terms_match_direct_sum() {
        let data = SurvivalDataset::new(
            vec![0.1, -0.3, 0.5, 0.0, 1.0],
            1,
            vec![0.5, 1.5, 1.2, 2.5, 0.2],
            vec![true, false, true, true, false],
        )
        .unwrap();
        let grid = PartitionGrid::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let g = GroupedData::new(&data, &grid).unwrap();
        let theta: Vec<f64> = data.linear_predictor(&[0.8]).into_iter().map(f64::exp).collect();
        let h = [0.3, 0.6, 0.2];
        let (survive, events) = g.interval_terms(&theta);
        let mut via_terms = 0.0;
        for j in 0..3 {
            via_terms -= h[j] * survive[j];
            for &l in &events[j] {
                via_terms += (1.0 - (-h[j] * theta[l]).exp()).ln();
            }
        }
        assert!((via_terms - g.log_likelihood_theta(&theta, &h)).abs() < 1e-13);
    }
}
