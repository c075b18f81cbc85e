mod common;

use catalytic_cox::estimators::CreObjective;
use catalytic_cox::optim::{ConcaveObjective, SolverOptions};
use catalytic_cox::survival::log_partial_likelihood;
use catalytic_cox::synthesis::{compute_kappa, log_catalytic_prior, CatalyticPrior};
use proptest::prelude::*;

use common::{random_beta, random_dataset, random_synthetic};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prior_is_log_concave(seed in 0u64..10_000, lam in 0.01f64..0.99, tau in 0.1f64..30.0) {
        let synth = random_synthetic(50, 3, seed);
        let prior = CatalyticPrior::new(synth, tau, 1.3).unwrap();
        let mut r = common::rng(seed + 1);
        let (b1, b2) = (random_beta(3, 1.5, &mut r), random_beta(3, 1.5, &mut r));
        let mid: Vec<f64> = b1.iter().zip(&b2).map(|(a, b)| lam * a + (1.0 - lam) * b).collect();
        let f = |b: &[f64]| log_catalytic_prior(b, &prior).unwrap();
        prop_assert!(f(&mid) >= lam * f(&b1) + (1.0 - lam) * f(&b2) - 1e-9);
    }

    #[test]
    fn prior_scales_with_tau(seed in 0u64..10_000, tau in 0.1f64..20.0, c in 0.1f64..10.0) {
        let synth = random_synthetic(40, 2, seed);
        let base = CatalyticPrior::new(synth, tau, 0.8).unwrap();
        let scaled = base.with_tau(c * tau).unwrap();
        let beta = random_beta(2, 1.0, &mut common::rng(seed));
        let zero = [0.0, 0.0];
        let d_base = log_catalytic_prior(&beta, &base).unwrap() - log_catalytic_prior(&zero, &base).unwrap();
        let d_scaled = log_catalytic_prior(&beta, &scaled).unwrap() - log_catalytic_prior(&zero, &scaled).unwrap();
        prop_assert!((d_scaled - c * d_base).abs() <= 1e-9 * d_scaled.abs().max(1.0));
    }

    #[test]
    fn cre_objective_separates(seed in 0u64..10_000, tau in 0.1f64..20.0) {
        let data = random_dataset(30, 2, seed);
        let prior = CatalyticPrior::new(random_synthetic(60, 2, seed + 7), tau, 1.0).unwrap();
        let obj = CreObjective::new(&data, &prior).unwrap();
        let beta = random_beta(2, 1.0, &mut common::rng(seed));
        let diff = obj.value(&beta).unwrap() - log_partial_likelihood(&beta, &data).unwrap();
        prop_assert!((diff - log_catalytic_prior(&beta, &prior).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn kappa_dominates_mean_loglik() {
    let opts = SolverOptions::default();
    for seed in 0..5 {
        let prior = CatalyticPrior::new(random_synthetic(100, 3, seed), 3.0, 1.0).unwrap().with_kappa(&opts).unwrap();
        let kappa = compute_kappa(&prior).unwrap();
        let mut r = common::rng(seed);
        for _ in 0..1000 {
            let beta = random_beta(3, 2.0, &mut r);
            assert!(kappa >= prior.mean_synthetic_loglik(&beta) - 1e-12);
        }
    }
}

#[test]
fn rank_deficient_synthetic_rows_are_rejected_for_kappa() {
    let x: Vec<f64> = (0..20).flat_map(|i| [i as f64, 2.0 * i as f64]).collect();
    let synth = catalytic_cox::synthesis::SyntheticDataset::new(x, 2, vec![1.0; 20]).unwrap();
    let prior = CatalyticPrior::new(synth, 1.0, 1.0).unwrap();
    assert!(compute_kappa(&prior).is_err());
}
