//! Replicated simulation of the point estimators.
//!
//! cargo run --release --example simulation_study -- [p] [censor_rate] [replications] [seed]

use catalytic_cox::optim::SolverOptions;
use catalytic_cox::simlab::{run_study, SimulationConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let p: usize = args.first().map_or(Ok(20), |s| s.parse())?;
    let censor: f64 = args.get(1).map_or(Ok(0.2), |s| s.parse())?;
    let reps: usize = args.get(2).map_or(Ok(20), |s| s.parse())?;
    let seed: u64 = args.get(3).map_or(Ok(2024), |s| s.parse())?;

    let config = SimulationConfig::new(p, censor, reps, seed);
    let start = std::time::Instant::now();
    let report = run_study(&config, &SolverOptions::default())?;
    println!(
        "n={} p={} target censoring={} realized={:.3} xi={:.3} ({:.1}s)",
        config.n,
        p,
        censor,
        report.realized_censoring,
        report.xi,
        start.elapsed().as_secs_f64()
    );
    println!("{:<12} {:>16} {:>18} {:>6} {:>6}", "method", "sq. error", "deviance", "fail", "div");
    for s in &report.summaries {
        println!(
            "{:<12} {:>8.3} ({:.3}) {:>9.3} ({:.3}) {:>6} {:>6}",
            s.label, s.squared_error.mean, s.squared_error.se, s.deviance.mean, s.deviance.se, s.failures, s.diverged
        );
    }
    Ok(())
}
