use nalgebra::{DMatrix, DVector};

use crate::error::{CoxError, Result};
use crate::optim::{newton_maximize, ConcaveObjective, FitResult, SolverOptions};
use crate::survival::{PartialLikelihood, RiskIndex, SurvivalDataset};
use crate::synthesis::SyntheticDataset;

/// Observed rows (weight 1) stacked over synthetic rows (weight `tau/M`,
/// all events), sharing one time axis.
#[derive(Debug, Clone)]
pub struct MergedWeightedData {
    x: Vec<f64>,
    p: usize,
    times: Vec<f64>,
    status: Vec<bool>,
    weights: Vec<f64>,
    n_observed: usize,
    index: RiskIndex,
}

impl MergedWeightedData {
    pub fn new(data: &SurvivalDataset, synth: &SyntheticDataset, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(CoxError::InvalidArgument(format!("tau must be positive, got {tau}")));
        }
        if synth.p() != data.p() {
            return Err(CoxError::DimensionMismatch {
                expected: data.p(),
                got: synth.p(),
            });
        }
        let (n, m) = (data.n(), synth.m());
        let mut x = data.covariates().to_vec();
        x.extend_from_slice(synth.covariates());
        let mut times = data.times().to_vec();
        times.extend_from_slice(synth.times());
        let mut status = data.status().to_vec();
        status.extend(std::iter::repeat_n(true, m));
        let mut weights = vec![1.0; n];
        weights.extend(std::iter::repeat_n(tau / m as f64, m));
        let index = RiskIndex::new(&times, &status);
        Ok(Self {
            x,
            p: data.p(),
            times,
            status,
            weights,
            n_observed: n,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_observed(&self) -> usize {
        self.n_observed
    }

    pub fn covariates(&self) -> &[f64] {
        &self.x
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn status(&self) -> &[bool] {
        &self.status
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn risk_index(&self) -> &RiskIndex {
        &self.index
    }

    pub fn partial_likelihood(&self) -> PartialLikelihood<'_> {
        PartialLikelihood::weighted(&self.x, self.p, &self.index, &self.weights)
    }
}

struct WeightedPl<'a> {
    pl: PartialLikelihood<'a>,
    scale: f64,
}

impl ConcaveObjective for WeightedPl<'_> {
    fn dim(&self) -> usize {
        self.pl.p()
    }

    fn value(&self, beta: &[f64]) -> Result<f64> {
        self.pl.value(beta)
    }

    fn derivatives(&self, beta: &[f64]) -> Result<(f64, DVector<f64>, DMatrix<f64>)> {
        let d = self.pl.derivatives(beta)?;
        Ok((d.value, d.gradient, d.neg_hessian))
    }

    fn gradient_scale(&self) -> f64 {
        self.scale
    }
}

/// Weighted log partial likelihood of the merged data.
pub fn wme_objective(beta: &[f64], merged: &MergedWeightedData) -> Result<f64> {
    merged.partial_likelihood().value(beta)
}

/// Weighted mixture estimator: maximizer of the weighted partial likelihood
/// of observed and synthetic data.
pub fn wme(data: &SurvivalDataset, synth: &SyntheticDataset, tau: f64, opts: &SolverOptions) -> Result<FitResult> {
    let merged = MergedWeightedData::new(data, synth, tau)?;
    wme_merged(&merged, opts)
}

pub fn wme_merged(merged: &MergedWeightedData, opts: &SolverOptions) -> Result<FitResult> {
    let events_weight: f64 = merged
        .status
        .iter()
        .zip(&merged.weights)
        .filter(|(d, _)| **d)
        .map(|(_, w)| w)
        .sum();
    if events_weight == 0.0 {
        return Err(CoxError::Unidentifiable);
    }
    let obj = WeightedPl {
        pl: merged.partial_likelihood(),
        scale: merged.n_observed as f64 + merged.weights[merged.n_observed..].iter().sum::<f64>(),
    };
    newton_maximize(&obj, &vec![0.0; merged.p], opts)
}
