mod common;

use catalytic_cox::bayes::{
    build_partition, sample_posterior, tau_conditional_parameters, BetaPrior, GammaProcessConfig, PartitionGrid,
    SamplerConfig, DEFAULT_C0,
};
use catalytic_cox::optim::SolverOptions;
use catalytic_cox::survival::{mple, SurvivalDataset};
use catalytic_cox::synthesis::{AdaptiveHyper, CatalyticPrior};

use common::{random_dataset, random_synthetic};

#[test]
fn single_interval_hazard_chain_matches_its_density() {
    let data = SurvivalDataset::new(vec![0.5], 1, vec![2.0], vec![true]).unwrap();
    let grid = PartitionGrid::new(vec![0.0, 2.0]).unwrap();
    let gp = GammaProcessConfig::new(2.0, 0.5, 1.0).unwrap();
    let shape = gp.shapes(&grid)[0];
    let beta = 0.3;
    let rate = (beta * 0.5f64).exp();
    // (1 - exp(-h e^{x b})) * h^{a-1} e^{-c0 h}
    let log_density = |h: f64| (-(-h * rate).exp_m1()).ln() + (shape - 1.0) * h.ln() - gp.c0 * h;

    let hs: Vec<f64> = (1..=400_000).map(|i| i as f64 * 1e-4).collect();
    let dens: Vec<f64> = hs.iter().map(|&h| log_density(h).exp()).collect();
    let total: f64 = dens.iter().sum();
    let mut acc = 0.0;
    let cdf: Vec<f64> = dens
        .iter()
        .map(|d| {
            acc += d / total;
            acc
        })
        .collect();
    let q = |p: f64| hs[cdf.iter().position(|&c| c >= p).unwrap()];
    let (lo, hi) = (q(0.001), q(0.999));
    let mut edges = vec![0.0];
    edges.extend((0..=50).map(|k| lo + (hi - lo) * k as f64 / 50.0));
    edges.push(f64::INFINITY);

    let mut cfg = SamplerConfig::new(12);
    cfg.iterations = 205_000;
    cfg.burnin = 5_000;
    cfg.init_beta = Some(vec![beta]);
    cfg.fix_beta = true;
    let samples = sample_posterior(&data, &grid, &gp, &BetaPrior::Flat, &cfg).unwrap();
    assert!(samples.beta.iter().all(|b| *b == beta));
    let draws: Vec<f64> = (0..samples.len()).map(|s| samples.h_draw(s)[0]).collect();

    let tv = 0.5
        * edges
            .windows(2)
            .map(|w| {
                let emp = draws.iter().filter(|d| **d >= w[0] && **d < w[1]).count() as f64 / draws.len() as f64;
                let exact: f64 = hs
                    .iter()
                    .zip(&dens)
                    .filter(|(h, _)| **h >= w[0] && **h < w[1])
                    .map(|(_, d)| d / total)
                    .sum();
                (emp - exact).abs()
            })
            .sum::<f64>();
    assert!(tv < 0.05, "TV {tv}");
}

#[test]
fn same_seed_same_draws() {
    let data = random_dataset(60, 2, 4);
    let grid = build_partition(&data, 5).unwrap();
    let gp = GammaProcessConfig::from_data(&data, DEFAULT_C0).unwrap();
    let mut cfg = SamplerConfig::new(99);
    cfg.iterations = 600;
    cfg.burnin = 200;
    cfg.chains = 2;
    let a = sample_posterior(&data, &grid, &gp, &BetaPrior::Flat, &cfg).unwrap();
    let b = sample_posterior(&data, &grid, &gp, &BetaPrior::Flat, &cfg).unwrap();
    assert_eq!(a.beta, b.beta);
    assert_eq!(a.h, b.h);
    cfg.seed = 100;
    let c = sample_posterior(&data, &grid, &gp, &BetaPrior::Flat, &cfg).unwrap();
    assert_ne!(a.beta, c.beta);
}

#[test]
fn tau_conditional_uses_gamma_shape_and_rate() {
    let hyper = AdaptiveHyper { alpha: 3.0, gamma: 0.5 };
    let prior = CatalyticPrior::new(random_synthetic(100, 4, 2), 4.0, 1.0)
        .unwrap()
        .into_adaptive(hyper, &SolverOptions::default())
        .unwrap();
    let beta = [0.2, -0.1, 0.3, 0.0];
    let (shape, rate) = tau_conditional_parameters(&beta, &prior).unwrap();
    assert_eq!(shape, 4.0 + 3.0);
    let expected = prior.kappa().unwrap() + 2.0 - prior.mean_synthetic_loglik(&beta);
    assert!((rate - expected).abs() < 1e-12);
}

/// Maximum over `h >= 0` of `-h a + sum_l log(1 - exp(-h r_l))`.
fn best_increment(a: f64, r: &[f64]) -> f64 {
    let f = |h: f64| -h * a + r.iter().map(|ri| (-(-h * ri).exp_m1()).ln()).sum::<f64>();
    if r.is_empty() {
        return 0.0;
    }
    if a == 0.0 {
        return 0.0;
    }
    let slope = |h: f64| -a + r.iter().map(|ri| ri / (h * ri).exp_m1()).sum::<f64>();
    let (mut lo, mut hi) = (-30.0f64, 10.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid.exp()) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    f((0.5 * (lo + hi)).exp())
}

#[test]
fn grouped_profile_tracks_the_mple() {
    // Intervals end at the distinct event times, so each holds one failure
    // time; profiling out the increments approximates the partial likelihood.
    let data = random_dataset(150, 1, 21);
    let mut cuts: Vec<f64> = data.times().iter().zip(data.status()).filter(|(_, d)| **d).map(|(t, _)| *t).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut bounds = vec![0.0];
    bounds.extend(&cuts);

    let profile = |b: f64| -> f64 {
        (1..bounds.len())
            .map(|j| {
                let (s0, s1) = (bounds[j - 1], bounds[j]);
                let mut a = 0.0;
                let mut r = Vec::new();
                for i in 0..data.n() {
                    let t = data.times()[i];
                    if t <= s0 {
                        continue;
                    }
                    let e = (b * data.row(i)[0]).exp();
                    if data.status()[i] && t <= s1 {
                        r.push(e);
                    } else {
                        a += e;
                    }
                }
                best_increment(a, &r)
            })
            .sum()
    };
    let fit = mple(&data, &SolverOptions::default()).unwrap();
    let (mut lo, mut hi) = (fit.beta[0] - 1.0, fit.beta[0] + 1.0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if profile(x1) > profile(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let mode = 0.5 * (lo + hi);
    assert!((mode - fit.beta[0]).abs() < 0.05, "profile mode {mode} vs MPLE {}", fit.beta[0]);
}
