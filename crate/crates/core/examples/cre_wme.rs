//! Catalytic-regularized and weighted-mixture estimators across prior weights.

use catalytic_cox::estimators::{cre, wme};
use catalytic_cox::optim::SolverOptions;
use catalytic_cox::rng::rng_from_seed;
use catalytic_cox::simlab::Scenario;
use catalytic_cox::survival::mple;
use catalytic_cox::synthesis::{CatalyticPrior, CovariateGenSchema, SyntheticDataset, DEFAULT_BLEND};
use catalytic_cox::util::squared_distance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rng_from_seed(3);
    let scenario = Scenario::new(16, 0.2, &mut rng)?;
    let data = scenario.simulate(100, &mut rng)?;
    let opts = SolverOptions::default();
    let p = data.p() as f64;

    let synth = SyntheticDataset::generate(&data, 1000, &CovariateGenSchema::from_dataset(&data, DEFAULT_BLEND), 9)?;
    let base = mple(&data, &opts)?;
    println!("MPLE squared error: {:.3}", squared_distance(&base.beta, &scenario.beta0));
    println!("{:>8} {:>10} {:>10}", "tau", "CRE", "WME");
    for factor in [0.125, 0.25, 0.5, 1.0, 2.0, 4.0] {
        let tau = factor * p;
        let prior = CatalyticPrior::with_fitted_hazard(synth.clone(), tau)?;
        let c = cre(&data, &prior, &opts)?;
        let w = wme(&data, &synth, tau, &opts)?;
        println!(
            "{:>8.2} {:>10.3} {:>10.3}",
            tau,
            squared_distance(&c.beta, &scenario.beta0),
            squared_distance(&w.beta, &scenario.beta0)
        );
    }
    Ok(())
}
