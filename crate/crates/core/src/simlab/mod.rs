//! Simulation harness: data-generating processes, replicated studies and
//! the small demonstrations of estimator behaviour.

pub mod demos;
pub mod design;
pub mod study;

pub use demos::{consistency_demo, mple_bias_demo, ConsistencyTable};
pub use design::{beta0_pattern, uniform_on_sphere, calibrate_xi, censoring_probability, draw_covariates, draw_survival, Scenario};
pub use study::{run_study, MeanSe, Method, MethodSummary, ReplicationRecord, SimulationConfig, SimulationReport};
