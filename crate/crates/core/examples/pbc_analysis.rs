//! Cox analysis of the Mayo Clinic PBC data with a catalytic prior.
//!
//! The data file is not shipped. Point `CATCOX_PBC_CSV` at a CSV export of
//! the `pbc` table from the R `survival` package.

use catalytic_cox::bayes::{
    build_partition, posterior_summary, sample_posterior, BetaPrior, GammaProcessConfig, SamplerConfig, DEFAULT_C0,
    DEFAULT_INTERVALS,
};
use catalytic_cox::io::{load_dataset, DataSchema};
use catalytic_cox::optim::SolverOptions;
use catalytic_cox::survival::{mple, wald_intervals};
use catalytic_cox::synthesis::{CatalyticPrior, CovariateGenSchema, SyntheticDataset, DEFAULT_BLEND};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let Ok(path) = std::env::var("CATCOX_PBC_CSV") else {
        eprintln!("set CATCOX_PBC_CSV to the PBC csv path");
        return Ok(());
    };
    let schema = DataSchema::from_json_file(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/pbc_schema.json"))?;
    let loaded = load_dataset(path, Some(&schema))?;
    let data = loaded.dataset;
    println!("n = {}, p = {}, dropped {} rows", data.n(), data.p(), loaded.dropped_rows);

    let opts = SolverOptions::default();
    let fit = mple(&data, &opts)?;
    let ci = wald_intervals(&fit, 0.95)?;

    let seed = 2024;
    let gen = CovariateGenSchema::from_dataset(&data, DEFAULT_BLEND);
    let synth = SyntheticDataset::generate(&data, 1000, &gen, seed)?;
    let prior = CatalyticPrior::with_fitted_hazard(synth, data.p() as f64)?;
    let grid = build_partition(&data, DEFAULT_INTERVALS)?;
    let gp = GammaProcessConfig::from_data(&data, DEFAULT_C0)?;
    let mut cfg = SamplerConfig::new(seed);
    cfg.chains = 2;
    let samples = sample_posterior(&data, &grid, &gp, &BetaPrior::Catalytic(prior), &cfg)?;
    let post = posterior_summary(&samples, 0.95)?;

    println!("{:<12} {:>8} {:>18} {:>8} {:>18}", "variable", "post", "95% cred", "mple", "95% conf");
    for (k, name) in data.names().iter().enumerate() {
        println!(
            "{:<12} {:>8.3} [{:>6.2}, {:>6.2}] {:>8.3} [{:>6.2}, {:>6.2}]",
            name, post[k].mean, post[k].lower, post[k].upper, fit.beta[k], ci[k].lower, ci[k].upper
        );
    }
    Ok(())
}
