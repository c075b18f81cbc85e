//! Ridge and lasso fits along a penalty path on standardized covariates.

use catalytic_cox::estimators::{fit_penalized_standardized, lambda_max, Penalty};
use catalytic_cox::optim::SolverOptions;
use catalytic_cox::rng::rng_from_seed;
use catalytic_cox::simlab::Scenario;
use catalytic_cox::util::squared_distance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rng_from_seed(21);
    let scenario = Scenario::new(20, 0.2, &mut rng)?;
    let data = scenario.simulate(100, &mut rng)?;
    let opts = SolverOptions::default();
    let lmax = lambda_max(&data.standardized().0)?;
    println!("lambda_max = {lmax:.4}");
    println!("{:>10} {:>10} {:>10} {:>8}", "lambda", "ridge", "lasso", "nonzero");
    for frac in [1e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0] {
        let lambda = frac * lmax;
        let (r, _) = fit_penalized_standardized(&data, Penalty::Ridge(lambda), &opts)?;
        let (l, _) = fit_penalized_standardized(&data, Penalty::Lasso(lambda), &opts)?;
        println!(
            "{:>10.4} {:>10.3} {:>10.3} {:>8}",
            lambda,
            squared_distance(&r.beta, &scenario.beta0),
            squared_distance(&l.beta, &scenario.beta0),
            l.beta.iter().filter(|b| **b != 0.0).count()
        );
    }
    Ok(())
}
