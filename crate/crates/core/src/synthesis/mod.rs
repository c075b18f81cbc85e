//! Synthetic data generation and the catalytic prior built on it.

pub mod covariates;
pub mod exponential;
pub mod prior;

pub use covariates::{
    generate_synthetic_covariates, iqr_matched_sd, ColumnStrategy, CovariateDraw, CovariateGenSchema, DEFAULT_BLEND,
};
pub use exponential::{fit_exponential, generate_synthetic_times};
pub use prior::{
    column_rank, compute_kappa, default_synthetic_size, log_adaptive_prior, log_catalytic_prior,
    log_catalytic_prior_derivatives, norm_recoverability_check, AdaptiveHyper, CatalyticPrior, GeneratorMeta,
    NormRecoverability, SyntheticDataset,
};
