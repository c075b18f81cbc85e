//! Full Bayesian inference with a Gamma-process prior on the baseline
//! hazard and a catalytic, adaptive catalytic or Gaussian coefficient prior.

pub mod likelihood;
pub mod partition;
pub mod sampler;
pub mod summary;

pub use likelihood::{grouped_log_likelihood, log_increment_prior, log_joint_posterior, BetaPrior, GroupedData, PriorKind};
pub use partition::{
    build_partition, fit_weibull_intercept, weibull_profile_eta, GammaProcessConfig, PartitionGrid, DEFAULT_C0,
    DEFAULT_INTERVALS,
};
pub use sampler::{
    initial_beta, sample_posterior, sample_tau_conditional, tau_conditional_parameters, Acceptance, PosteriorSamples,
    SamplerConfig,
};
pub use summary::{beta_rhat, posterior_summary, split_rhat, summarize_series, CoefficientSummary};
