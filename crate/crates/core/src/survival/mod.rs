//! Observed survival data, the Breslow partial likelihood and the maximum
//! partial likelihood estimator.

mod dataset;
mod fit;
mod likelihood;
mod risk;

pub use dataset::{ColumnKind, Standardization, SurvivalDataset};
pub use fit::{mple, predictive_deviance, prediction_score, standard_errors, wald_intervals, Interval};
pub use likelihood::{log_partial_likelihood, pl_derivatives, Derivatives, PartialLikelihood};
pub use risk::{RiskIndex, TimeBlock};
