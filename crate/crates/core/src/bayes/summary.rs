use serde::Serialize;

use crate::error::{CoxError, Result};
use crate::util::{mean, quantile_sorted, sample_sd, sorted_copy};

use super::sampler::PosteriorSamples;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientSummary {
    pub mean: f64,
    pub sd: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Mean, standard deviation and equal-tailed interval of one series.
pub fn summarize_series(draws: &[f64], level: f64) -> Result<CoefficientSummary> {
    if !(level > 0.0 && level < 1.0) {
        return Err(CoxError::InvalidArgument(format!("level must lie in (0, 1), got {level}")));
    }
    if draws.len() < 2 {
        return Err(CoxError::InvalidArgument("need at least two draws".into()));
    }
    let sorted = sorted_copy(draws);
    let tail = (1.0 - level) / 2.0;
    Ok(CoefficientSummary {
        mean: mean(draws),
        sd: sample_sd(draws),
        lower: quantile_sorted(&sorted, tail),
        upper: quantile_sorted(&sorted, 1.0 - tail),
    })
}

/// Per-coefficient posterior means and equal-tailed credible intervals.
pub fn posterior_summary(samples: &PosteriorSamples, level: f64) -> Result<Vec<CoefficientSummary>> {
    if samples.len() < 10 {
        return Err(CoxError::InvalidArgument("posterior summary needs at least 10 draws".into()));
    }
    (0..samples.p)
        .map(|k| summarize_series(&samples.beta_column(k), level))
        .collect()
}

/// Split-chain potential scale reduction of one series made of equal-length
/// chains. Each chain is cut in half and the halves are compared.
pub fn split_rhat(chains: &[&[f64]]) -> f64 {
    let halves: Vec<&[f64]> = chains
        .iter()
        .flat_map(|c| {
            let h = c.len() / 2;
            [&c[..h], &c[c.len() - h..]]
        })
        .filter(|h| h.len() >= 2)
        .collect();
    if halves.len() < 2 {
        return f64::NAN;
    }
    let n = halves[0].len() as f64;
    let means: Vec<f64> = halves.iter().map(|h| mean(h)).collect();
    let within = halves.iter().map(|h| sample_sd(h).powi(2)).sum::<f64>() / halves.len() as f64;
    let between = n * sample_sd(&means).powi(2);
    if within == 0.0 {
        return if between == 0.0 { 1.0 } else { f64::INFINITY };
    }
    let var_plus = (n - 1.0) / n * within + between / n;
    (var_plus / within).sqrt()
}

/// Split R-hat of every coefficient.
pub fn beta_rhat(samples: &PosteriorSamples) -> Vec<f64> {
    (0..samples.p)
        .map(|k| {
            let col = samples.beta_column(k);
            split_rhat(&samples.split_by_chain(&col))
        })
        .collect()
}
