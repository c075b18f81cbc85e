//! Breslow partial likelihood and its derivatives.
//!
//! A single reverse sweep over the tie blocks accumulates the risk-set sums
//! `S0 = sum w e^eta`, `S1 = sum w e^eta x` and `S2 = sum w e^eta x x'`. The
//! sums are kept relative to the running maximum linear predictor seen so far,
//! so a risk set whose members all have very negative `eta` never underflows.

use nalgebra::{DMatrix, DVector};

use crate::error::{CoxError, Result};
use crate::survival::dataset::SurvivalDataset;
use crate::survival::risk::RiskIndex;

/// Borrowed view of the inputs of a (possibly weighted) partial likelihood.
///
/// With weights `w`, each event block contributes
/// `sum_{l in D} w_l eta_l - (sum_{l in D} w_l) log sum_{j in R} w_j e^{eta_j}`.
#[derive(Clone, Copy)]
pub struct PartialLikelihood<'a> {
    x: &'a [f64],
    p: usize,
    index: &'a RiskIndex,
    weights: Option<&'a [f64]>,
}

pub struct Derivatives {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub neg_hessian: DMatrix<f64>,
}

impl<'a> PartialLikelihood<'a> {
    pub fn new(data: &'a SurvivalDataset) -> Self {
        Self {
            x: data.covariates(),
            p: data.p(),
            index: data.risk_index(),
            weights: None,
        }
    }

    pub fn weighted(x: &'a [f64], p: usize, index: &'a RiskIndex, weights: &'a [f64]) -> Self {
        Self {
            x,
            p,
            index,
            weights: Some(weights),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    fn weight(&self, i: usize) -> f64 {
        self.weights.map_or(1.0, |w| w[i])
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    fn linear_predictor(&self, beta: &[f64]) -> Result<Vec<f64>> {
        if beta.len() != self.p {
            return Err(CoxError::DimensionMismatch {
                expected: self.p,
                got: beta.len(),
            });
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(CoxError::NonFinite("coefficient vector"));
        }
        Ok(self
            .x
            .chunks_exact(self.p)
            .map(|row| crate::util::dot(row, beta))
            .collect())
    }

    pub fn value(&self, beta: &[f64]) -> Result<f64> {
        let eta = self.linear_predictor(beta)?;
        let order = self.index.order();
        let mut max_eta = f64::NEG_INFINITY;
        let mut s0 = 0.0;
        let mut total = 0.0;
        for block in self.index.blocks().iter().rev() {
            for &i in &order[block.start..block.end] {
                let w = self.weight(i);
                if eta[i] > max_eta {
                    s0 *= (max_eta - eta[i]).exp();
                    max_eta = eta[i];
                }
                s0 += w * (eta[i] - max_eta).exp();
            }
            if block.events.is_empty() {
                continue;
            }
            let mut ev_w = 0.0;
            let mut lin = 0.0;
            for &l in &block.events {
                let w = self.weight(l);
                ev_w += w;
                lin += w * eta[l];
            }
            total += lin - ev_w * (s0.ln() + max_eta);
        }
        if !total.is_finite() {
            return Err(CoxError::NonFinite("partial likelihood"));
        }
        Ok(total)
    }

    pub fn derivatives(&self, beta: &[f64]) -> Result<Derivatives> {
        let p = self.p;
        let eta = self.linear_predictor(beta)?;
        let order = self.index.order();
        let mut max_eta = f64::NEG_INFINITY;
        let mut s0 = 0.0;
        let mut s1 = vec![0.0; p];
        let mut s2 = vec![0.0; p * p];
        let mut value = 0.0;
        let mut grad = vec![0.0; p];
        let mut hess = vec![0.0; p * p];
        for block in self.index.blocks().iter().rev() {
            for &i in &order[block.start..block.end] {
                if eta[i] > max_eta {
                    let f = (max_eta - eta[i]).exp();
                    s0 *= f;
                    s1.iter_mut().for_each(|v| *v *= f);
                    s2.iter_mut().for_each(|v| *v *= f);
                    max_eta = eta[i];
                }
                let r = self.weight(i) * (eta[i] - max_eta).exp();
                s0 += r;
                let xi = self.row(i);
                for a in 0..p {
                    let ra = r * xi[a];
                    s1[a] += ra;
                    let rowa = &mut s2[a * p..(a + 1) * p];
                    for b in a..p {
                        rowa[b] += ra * xi[b];
                    }
                }
            }
            if block.events.is_empty() {
                continue;
            }
            let mut ev_w = 0.0;
            for &l in &block.events {
                let w = self.weight(l);
                ev_w += w;
                value += w * eta[l];
                for (g, x) in grad.iter_mut().zip(self.row(l)) {
                    *g += w * x;
                }
            }
            value -= ev_w * (s0.ln() + max_eta);
            for a in 0..p {
                let ma = s1[a] / s0;
                grad[a] -= ev_w * ma;
                for b in a..p {
                    hess[a * p + b] += ev_w * (s2[a * p + b] / s0 - ma * s1[b] / s0);
                }
            }
        }
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(CoxError::NonFinite("partial likelihood derivatives"));
        }
        let neg_hessian = DMatrix::from_fn(p, p, |a, b| {
            if a <= b {
                hess[a * p + b]
            } else {
                hess[b * p + a]
            }
        });
        Ok(Derivatives {
            value,
            gradient: DVector::from_vec(grad),
            neg_hessian,
        })
    }
}

/// Breslow log partial likelihood of `beta`.
pub fn log_partial_likelihood(beta: &[f64], data: &SurvivalDataset) -> Result<f64> {
    PartialLikelihood::new(data).value(beta)
}

/// Score vector and observed information (negative Hessian) of the log
/// partial likelihood.
pub fn pl_derivatives(beta: &[f64], data: &SurvivalDataset) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let d = PartialLikelihood::new(data).derivatives(beta)?;
    Ok((d.gradient, d.neg_hessian))
}
