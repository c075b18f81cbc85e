#![allow(dead_code)]

use catalytic_cox::survival::SurvivalDataset;
use catalytic_cox::synthesis::SyntheticDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exponential survival with rate `exp(x'beta)`, uniform censoring and
/// times rounded to a coarse grid so ties are common.
pub fn random_dataset(n: usize, p: usize, seed: u64) -> SurvivalDataset {
    let mut r = rng(seed);
    let beta: Vec<f64> = (0..p).map(|_| r.random_range(-0.8..0.8)).collect();
    let x: Vec<f64> = (0..n * p).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
    let mut times = Vec::with_capacity(n);
    let mut status = Vec::with_capacity(n);
    for i in 0..n {
        let eta: f64 = x[i * p..(i + 1) * p].iter().zip(&beta).map(|(a, b)| a * b).sum();
        let t = Exp::new(eta.exp()).unwrap().sample(&mut r);
        let c = r.random_range(0.2..3.0);
        let y = ((t.min(c) * 20.0).ceil() / 20.0).max(0.05);
        times.push(y);
        status.push(t <= c);
    }
    if !status.iter().any(|&d| d) {
        status[0] = true;
    }
    SurvivalDataset::new(x, p, times, status).unwrap()
}

/// Synthetic rows with normal covariates and exponential times.
pub fn random_synthetic(m: usize, p: usize, seed: u64) -> SyntheticDataset {
    let mut r = rng(seed);
    let x: Vec<f64> = (0..m * p).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
    let times: Vec<f64> = (0..m).map(|_| Exp::new(1.0).unwrap().sample(&mut r)).collect();
    SyntheticDataset::new(x, p, times).unwrap()
}

pub fn random_beta(p: usize, scale: f64, r: &mut ChaCha8Rng) -> Vec<f64> {
    (0..p).map(|_| r.random_range(-scale..scale)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Breslow log partial likelihood by direct double loop, optionally weighted.
pub fn naive_log_pl_weighted(beta: &[f64], x: &[f64], p: usize, times: &[f64], status: &[bool], w: &[f64]) -> f64 {
    let n = times.len();
    let eta: Vec<f64> = (0..n).map(|i| dot(&x[i * p..(i + 1) * p], beta)).collect();
    let mut total = 0.0;
    for i in 0..n {
        if !status[i] {
            continue;
        }
        let denom: f64 = (0..n).filter(|&k| times[k] >= times[i]).map(|k| w[k] * eta[k].exp()).sum();
        total += w[i] * (eta[i] - denom.ln());
    }
    total
}

pub fn naive_log_pl(beta: &[f64], data: &SurvivalDataset) -> f64 {
    let w = vec![1.0; data.n()];
    naive_log_pl_weighted(beta, data.covariates(), data.p(), data.times(), data.status(), &w)
}

/// Central-difference gradient of a scalar function.
pub fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, beta: &[f64], h: f64) -> Vec<f64> {
    (0..beta.len())
        .map(|j| {
            let mut up = beta.to_vec();
            let mut dn = beta.to_vec();
            up[j] += h;
            dn[j] -= h;
            (f(&up) - f(&dn)) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Jacobian of a vector function, row `j` = d/d beta_j.
pub fn fd_jacobian(g: &dyn Fn(&[f64]) -> Vec<f64>, beta: &[f64], h: f64) -> Vec<Vec<f64>> {
    (0..beta.len())
        .map(|j| {
            let mut up = beta.to_vec();
            let mut dn = beta.to_vec();
            up[j] += h;
            dn[j] -= h;
            let (a, b) = (g(&up), g(&dn));
            a.iter().zip(&b).map(|(u, d)| (u - d) / (2.0 * h)).collect()
        })
        .collect()
}

pub fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}
