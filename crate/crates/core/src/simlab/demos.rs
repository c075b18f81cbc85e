//! Small experiments: MPLE bias when `p` is comparable with `n`, and the
//! consistency of the catalytic estimators as `n` grows.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CoxError, Result};
use crate::estimators::{cre, wme};
use crate::optim::SolverOptions;
use crate::rng::{derive_rng, derive_seed, tags};
use crate::survival::mple;
use crate::synthesis::{CatalyticPrior, CovariateGenSchema, SyntheticDataset};
use crate::util::squared_distance;

use super::design::{draw_survival, uniform_on_sphere, BASE_RATE};

/// Pairs `(beta0_j, beta_hat_j)` from one MPLE fit on a design with a fifth
/// of the coefficients at +10, a fifth at -10 and the rest zero; covariates
/// N(0, 1/n), unit baseline hazard, no censoring.
pub fn mple_bias_demo(p: usize, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if n <= p {
        return Err(CoxError::InvalidArgument(format!("bias demo needs n > p (n={n}, p={p})")));
    }
    let k = (p as f64 / 5.0).round() as usize;
    let beta0: Vec<f64> = (0..p)
        .map(|j| {
            if j < k {
                10.0
            } else if j < 2 * k {
                -10.0
            } else {
                0.0
            }
        })
        .collect();
    let mut rng = derive_rng(seed, &[tags::TRAIN_DATA]);
    let scale = 1.0 / (n as f64).sqrt();
    let x: Vec<f64> = (0..n * p)
        .map(|_| scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
        .collect();
    let data = draw_survival(&x, &beta0, 1.0, f64::INFINITY, &mut rng)?;
    let fit = mple(&data, &SolverOptions::default())?;
    Ok(beta0.into_iter().zip(fit.beta).collect())
}

/// Mean squared losses per `(p, n)` cell; rows follow `p_list`, columns
/// follow `n_list`.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyTable {
    pub p_list: Vec<usize>,
    pub n_list: Vec<usize>,
    pub cre: Vec<Vec<f64>>,
    pub wme: Vec<Vec<f64>>,
}

/// Squared losses of the CRE (`tau = p`) and the WME (`tau = p/5`) with `m`
/// resampled synthetic units, averaged over `seeds` replications per cell.
///
/// The truth is uniform on the sphere of radius 2, covariates are standard
/// normal and event times follow the exponential law of the main design
/// without censoring.
pub fn consistency_demo(
    p_list: &[usize],
    n_list: &[usize],
    m: usize,
    seeds: usize,
    master: u64,
) -> Result<ConsistencyTable> {
    if seeds == 0 {
        return Err(CoxError::InvalidArgument("need at least one seed".into()));
    }
    let opts = SolverOptions::default();
    let cells: Vec<(usize, usize, usize)> = (0..p_list.len())
        .flat_map(|a| (0..n_list.len()).flat_map(move |b| (0..seeds).map(move |s| (a, b, s))))
        .collect();
    let losses: Vec<Result<(f64, f64)>> = cells
        .par_iter()
        .map(|&(a, b, s)| {
            let (p, n) = (p_list[a], n_list[b]);
            let path = [tags::REPLICATION, p as u64, n as u64, s as u64];
            let mut rng = derive_rng(master, &[&path[..], &[tags::DIRECTIONS]].concat());
            let beta0 = uniform_on_sphere(p, 2.0, &mut rng);
            let x: Vec<f64> = (0..n * p)
                .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
                .collect();
            let data = draw_survival(&x, &beta0, BASE_RATE, f64::INFINITY, &mut rng)?;
            let synth_seed = derive_seed(master, &[&path[..], &[tags::SYNTH_COVARIATES]].concat());
            let synth = SyntheticDataset::generate(&data, m, &CovariateGenSchema::resample_only(p), synth_seed)?;
            let prior = CatalyticPrior::with_fitted_hazard(synth.clone(), p as f64)?;
            let b_cre = cre(&data, &prior, &opts)?.beta;
            let b_wme = wme(&data, &synth, p as f64 / 5.0, &opts)?.beta;
            Ok((squared_distance(&b_cre, &beta0), squared_distance(&b_wme, &beta0)))
        })
        .collect();
    let mut cre_tab = vec![vec![0.0; n_list.len()]; p_list.len()];
    let mut wme_tab = vec![vec![0.0; n_list.len()]; p_list.len()];
    for (&(a, b, _), loss) in cells.iter().zip(losses) {
        let (c, w) = loss?;
        cre_tab[a][b] += c / seeds as f64;
        wme_tab[a][b] += w / seeds as f64;
    }
    Ok(ConsistencyTable {
        p_list: p_list.to_vec(),
        n_list: n_list.to_vec(),
        cre: cre_tab,
        wme: wme_tab,
    })
}
