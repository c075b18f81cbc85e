//! Cross-validated partial likelihood for every tunable estimator.

use catalytic_cox::optim::SolverOptions;
use catalytic_cox::rng::rng_from_seed;
use catalytic_cox::simlab::Scenario;
use catalytic_cox::synthesis::{CatalyticPrior, CovariateGenSchema, SyntheticDataset, DEFAULT_BLEND};
use catalytic_cox::tuning::{cv_cre, cv_penalized, cv_wme, default_tau_grid, CvConfig, CvResult};

fn show(name: &str, cv: &CvResult) {
    println!("{name}: best {:.4}", cv.best_value);
    for (g, s) in cv.grid.iter().zip(&cv.scores) {
        println!("  {g:>12.5} {s:>12.4}");
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rng_from_seed(8);
    let scenario = Scenario::new(10, 0.2, &mut rng)?;
    let data = scenario.simulate(100, &mut rng)?;
    let opts = SolverOptions::default();
    let seed = 77;

    let synth = SyntheticDataset::generate(&data, 1000, &CovariateGenSchema::from_dataset(&data, DEFAULT_BLEND), seed)?;
    let config = CvConfig::new(5, default_tau_grid(data.p()), seed)?;
    let prior = CatalyticPrior::with_fitted_hazard(synth.clone(), data.p() as f64)?;
    show("CRE tau", &cv_cre(&data, &prior, &config, &opts)?);
    show("WME tau", &cv_wme(&data, &synth, &config, &opts)?);
    show("ridge lambda", &cv_penalized(&data, true, 5, None, seed, &opts)?);
    Ok(())
}
