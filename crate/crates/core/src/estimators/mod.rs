//! Point estimators beyond the plain partial-likelihood maximizer.

pub mod cre;
pub mod penalized;
pub mod wme;

pub use cre::{cre, cre_is_identified, CreObjective};
pub use penalized::{
    fit_penalized_standardized, lambda_max, lasso, lasso_from, lasso_path, ridge, to_original_scale, Penalty,
    LASSO_COORD_TOL,
};
pub use wme::{wme, wme_merged, wme_objective, MergedWeightedData};
