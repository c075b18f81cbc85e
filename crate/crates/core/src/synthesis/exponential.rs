use rand_distr::{Distribution, Exp};

use crate::error::{CoxError, Result};
use crate::rng::rng_from_seed;
use crate::survival::SurvivalDataset;

/// Rate of the constant-hazard model: `events / total follow-up time`.
pub fn fit_exponential(data: &SurvivalDataset) -> Result<f64> {
    let events = data.event_count();
    if events == 0 {
        return Err(CoxError::Unidentifiable);
    }
    let exposure: f64 = data.times().iter().sum();
    Ok(events as f64 / exposure)
}

/// `m` i.i.d. Exponential(rate) survival times.
pub fn generate_synthetic_times(m: usize, rate: f64, seed: u64) -> Result<Vec<f64>> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(CoxError::InvalidArgument(format!("exponential rate must be positive, got {rate}")));
    }
    let exp = Exp::new(rate).map_err(|e| CoxError::InvalidArgument(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    // Exp::sample can return exactly 0 with vanishing probability; times must
    // stay strictly positive.
    Ok((0..m)
        .map(|_| loop {
            let t = exp.sample(&mut rng);
            if t > 0.0 {
                break t;
            }
        })
        .collect())
}
