//! Maximum partial likelihood fit with Wald intervals on simulated data.

use catalytic_cox::optim::SolverOptions;
use catalytic_cox::rng::rng_from_seed;
use catalytic_cox::simlab::Scenario;
use catalytic_cox::survival::{log_partial_likelihood, mple, wald_intervals};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rng_from_seed(11);
    let scenario = Scenario::new(8, 0.2, &mut rng)?;
    let data = scenario.simulate(300, &mut rng)?;
    println!("n = {}, events = {}", data.n(), data.event_count());

    let fit = mple(&data, &SolverOptions::default())?;
    let ci = wald_intervals(&fit, 0.95)?;
    println!("converged in {} iterations, log PL {:.4}", fit.iterations, log_partial_likelihood(&fit.beta, &data)?);
    println!("{:>4} {:>8} {:>8} {:>18}", "j", "truth", "mple", "95% Wald");
    for j in 0..data.p() {
        println!(
            "{:>4} {:>8.3} {:>8.3} [{:>7.3}, {:>7.3}]",
            j + 1,
            scenario.beta0[j],
            fit.beta[j],
            ci[j].lower,
            ci[j].upper
        );
    }
    Ok(())
}
