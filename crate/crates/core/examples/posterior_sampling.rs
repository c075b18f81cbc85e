//! Posterior sampling under a catalytic, adaptive catalytic and flat prior.

use catalytic_cox::bayes::{
    beta_rhat, build_partition, posterior_summary, sample_posterior, BetaPrior, GammaProcessConfig, SamplerConfig,
    DEFAULT_C0, DEFAULT_INTERVALS,
};
use catalytic_cox::optim::SolverOptions;
use catalytic_cox::rng::rng_from_seed;
use catalytic_cox::simlab::{draw_survival, draw_covariates};
use catalytic_cox::survival::mple;
use catalytic_cox::synthesis::{AdaptiveHyper, CatalyticPrior, CovariateGenSchema, SyntheticDataset};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let beta0 = [0.8, -0.5, 0.3, 0.0, 0.0];
    let p = beta0.len();
    let mut rng = rng_from_seed(11);
    let x = draw_covariates(150, p, &mut rng);
    let data = draw_survival(&x, &beta0, 0.5, 8.0, &mut rng)?;
    let opts = SolverOptions::default();
    let fit = mple(&data, &opts)?;

    let grid = build_partition(&data, DEFAULT_INTERVALS)?;
    let gp = GammaProcessConfig::from_data(&data, DEFAULT_C0)?;
    let synth = SyntheticDataset::generate(&data, 1000, &CovariateGenSchema::from_dataset(&data, 0.5), 3)?;
    let catalytic = CatalyticPrior::with_fitted_hazard(synth, p as f64)?;
    let adaptive = catalytic.clone().into_adaptive(AdaptiveHyper::default(), &opts)?;

    println!("true  {beta0:?}");
    println!("MPLE  {:?}", round(&fit.beta));
    for (name, prior) in [
        ("catalytic", BetaPrior::Catalytic(catalytic)),
        ("adaptive", BetaPrior::Adaptive(adaptive)),
        ("flat", BetaPrior::Flat),
    ] {
        let mut config = SamplerConfig::new(5);
        config.chains = 2;
        config.adaptive_tau = matches!(prior, BetaPrior::Adaptive(_));
        let samples = sample_posterior(&data, &grid, &gp, &prior, &config)?;
        let summary = posterior_summary(&samples, 0.95)?;
        let means: Vec<f64> = summary.iter().map(|s| s.mean).collect();
        println!(
            "{name:<10} mean {:?} accept beta {:.2} rhat max {:.3}",
            round(&means),
            samples.acceptance.beta,
            beta_rhat(&samples).into_iter().fold(0.0, f64::max)
        );
        if let Some(tau) = &samples.tau {
            println!("{:<10} mean tau {:.2}", "", tau.iter().sum::<f64>() / tau.len() as f64);
        }
    }
    Ok(())
}

fn round(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1000.0).round() / 1000.0).collect()
}
