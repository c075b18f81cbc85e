//! Build a synthetic dataset and inspect the catalytic prior it induces.

use catalytic_cox::optim::SolverOptions;
use catalytic_cox::rng::rng_from_seed;
use catalytic_cox::simlab::Scenario;
use catalytic_cox::synthesis::{
    log_catalytic_prior, norm_recoverability_check, CatalyticPrior, CovariateGenSchema, SyntheticDataset,
    DEFAULT_BLEND,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rng_from_seed(5);
    let scenario = Scenario::new(8, 0.2, &mut rng)?;
    let data = scenario.simulate(80, &mut rng)?;

    let schema = CovariateGenSchema::from_dataset(&data, DEFAULT_BLEND);
    let synth = SyntheticDataset::generate(&data, 1000, &schema, 42)?;
    println!("synthetic rows: {}, fitted exponential rate: {:.4}", synth.m(), synth.meta.psi_hat.unwrap_or(f64::NAN));

    let check = norm_recoverability_check(synth.covariates(), synth.m(), synth.p(), 2000, 1)?;
    println!(
        "norm-recoverable: {} (c1 estimate {:.4})",
        check.is_recoverable, check.c1_estimate
    );

    let prior = CatalyticPrior::with_fitted_hazard(synth, data.p() as f64)?.with_kappa(&SolverOptions::default())?;
    println!("kappa = {:.4}", prior.kappa().unwrap_or(f64::NAN));
    if let Some(arg) = prior.kappa_argmax() {
        println!("prior mode: {:?}", arg.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>());
    }
    for scale in [0.0, 0.5, 1.0, 2.0] {
        let beta: Vec<f64> = scenario.beta0.iter().map(|b| b * scale).collect();
        println!("log prior at {scale} x truth: {:.3}", log_catalytic_prior(&beta, &prior)?);
    }
    Ok(())
}
