use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::optim::{newton_maximize, ConcaveObjective, FitResult, SolverOptions};
use crate::survival::{PartialLikelihood, SurvivalDataset};
use crate::synthesis::prior::WeightedSyntheticLikelihood;
use crate::synthesis::{norm_recoverability_check, CatalyticPrior};

/// `log PL(beta) + log pi_cat(beta | tau)`.
pub struct CreObjective<'a> {
    pl: PartialLikelihood<'a>,
    prior: WeightedSyntheticLikelihood<'a>,
    tau: f64,
}

impl<'a> CreObjective<'a> {
    pub fn new(data: &'a SurvivalDataset, prior: &'a CatalyticPrior) -> Result<Self> {
        if prior.p() != data.p() {
            return Err(crate::error::CoxError::DimensionMismatch {
                expected: data.p(),
                got: prior.p(),
            });
        }
        Ok(Self {
            pl: PartialLikelihood::new(data),
            prior: WeightedSyntheticLikelihood {
                synth: &prior.synth,
                h0_plus: prior.h0_plus,
                weight: prior.tau / prior.synth.m() as f64,
            },
            tau: prior.tau,
        })
    }
}

impl ConcaveObjective for CreObjective<'_> {
    fn dim(&self) -> usize {
        self.pl.p()
    }

    fn value(&self, beta: &[f64]) -> Result<f64> {
        let v = self.pl.value(beta)? + self.prior.value(beta)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(crate::error::CoxError::NonFinite("CRE objective"))
        }
    }

    fn derivatives(&self, beta: &[f64]) -> Result<(f64, DVector<f64>, DMatrix<f64>)> {
        let d = self.pl.derivatives(beta)?;
        let (v, g, h) = self.prior.derivatives(beta)?;
        Ok((d.value + v, d.gradient + g, d.neg_hessian + h))
    }

    fn gradient_scale(&self) -> f64 {
        self.tau
    }
}

/// Catalytic-regularized estimator: the posterior mode under the catalytic
/// prior, found by Newton from zero.
///
/// Synthetic covariates that are not of full column rank leave the maximizer
/// possibly non-unique; the fit still runs, and callers can inspect
/// [`norm_recoverability_check`] beforehand.
pub fn cre(data: &SurvivalDataset, prior: &CatalyticPrior, opts: &SolverOptions) -> Result<FitResult> {
    let obj = CreObjective::new(data, prior)?;
    newton_maximize(&obj, &vec![0.0; data.p()], opts)
}

/// Whether the prior's synthetic covariates guarantee a unique CRE.
pub fn cre_is_identified(prior: &CatalyticPrior) -> bool {
    let s = &prior.synth;
    norm_recoverability_check(s.covariates(), s.m(), s.p(), 0, 0)
        .map(|r| r.is_recoverable)
        .unwrap_or(false)
}
