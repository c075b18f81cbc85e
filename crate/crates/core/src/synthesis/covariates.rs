use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::{Bernoulli, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};
use crate::rng::rng_from_seed;
use crate::survival::{ColumnKind, SurvivalDataset};
use crate::util::{normal_quantile, quantile_sorted, sorted_copy};

/// How one covariate (or one expanded categorical variable) is generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum ColumnStrategy {
    /// Plain resampling from the observed column.
    Resample { column: usize },
    /// Resample, then replace the blend fraction by Bernoulli(1/2) draws.
    Flatten { column: usize },
    /// Resample, then replace the blend fraction by normal draws whose median
    /// and interquartile range match the observed column.
    NormalBlend { column: usize },
    /// Resample whole dummy rows, then replace the blend fraction by levels
    /// drawn uniformly (reference level included) and dummy-code them.
    CategoricalUniform { columns: Vec<usize> },
}

impl ColumnStrategy {
    fn columns(&self) -> Vec<usize> {
        match self {
            Self::Resample { column } | Self::Flatten { column } | Self::NormalBlend { column } => {
                vec![*column]
            }
            Self::CategoricalUniform { columns } => columns.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateGenSchema {
    pub strategies: Vec<ColumnStrategy>,
    /// Fraction of resampled values replaced by the flattening law.
    pub blend: f64,
}

pub const DEFAULT_BLEND: f64 = 0.5;

impl CovariateGenSchema {
    /// Flatten binary columns, normal-blend continuous columns and
    /// uniform-blend categorical groups, following the dataset's schema.
    pub fn from_dataset(data: &SurvivalDataset, blend: f64) -> Self {
        let mut strategies = Vec::new();
        let mut seen_groups: Vec<usize> = Vec::new();
        for (j, kind) in data.schema().iter().enumerate() {
            match *kind {
                ColumnKind::Binary => strategies.push(ColumnStrategy::Flatten { column: j }),
                ColumnKind::Continuous => strategies.push(ColumnStrategy::NormalBlend { column: j }),
                ColumnKind::Categorical { group } => {
                    if seen_groups.contains(&group) {
                        continue;
                    }
                    seen_groups.push(group);
                    let columns = data
                        .schema()
                        .iter()
                        .enumerate()
                        .filter(|(_, k)| **k == ColumnKind::Categorical { group })
                        .map(|(c, _)| c)
                        .collect();
                    strategies.push(ColumnStrategy::CategoricalUniform { columns });
                }
            }
        }
        Self { strategies, blend }
    }

    /// Independent resampling of every column, no flattening.
    pub fn resample_only(p: usize) -> Self {
        Self {
            strategies: (0..p).map(|column| ColumnStrategy::Resample { column }).collect(),
            blend: 0.0,
        }
    }

    fn validate(&self, p: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.blend) {
            return Err(CoxError::InvalidArgument(format!(
                "blend fraction must lie in [0, 1], got {}",
                self.blend
            )));
        }
        let mut covered = vec![0usize; p];
        for s in &self.strategies {
            for c in s.columns() {
                if c >= p {
                    return Err(CoxError::InvalidArgument(format!("schema column {c} out of range")));
                }
                covered[c] += 1;
            }
        }
        if covered.iter().any(|&k| k != 1) {
            return Err(CoxError::InvalidArgument(
                "schema must cover every covariate column exactly once".into(),
            ));
        }
        Ok(())
    }
}

/// Generated covariates, row-major `m x p`.
#[derive(Debug, Clone)]
pub struct CovariateDraw {
    pub values: Vec<f64>,
    pub m: usize,
    pub p: usize,
    /// Normal-blend columns with zero IQR that fell back to plain resampling.
    pub fallback_columns: Vec<usize>,
}

/// Standard deviation of the normal whose interquartile range is `iqr`.
pub fn iqr_matched_sd(iqr: f64) -> f64 {
    iqr / (2.0 * normal_quantile(0.75))
}

/// Draw `m` synthetic covariate vectors column by column from the observed
/// marginals, with the flattening rules of `schema`.
pub fn generate_synthetic_covariates(
    data: &SurvivalDataset,
    m: usize,
    schema: &CovariateGenSchema,
    seed: u64,
) -> Result<CovariateDraw> {
    if m == 0 {
        return Err(CoxError::InvalidArgument("synthetic size must be at least 1".into()));
    }
    let (n, p) = (data.n(), data.p());
    schema.validate(p)?;
    let mut rng = rng_from_seed(seed);
    let mut values = vec![0.0; m * p];
    let mut fallback_columns = Vec::new();
    let n_blend = (schema.blend * m as f64).round() as usize;

    for strategy in &schema.strategies {
        match strategy {
            ColumnStrategy::CategoricalUniform { columns } => {
                for r in 0..m {
                    let src = rng.random_range(0..n);
                    for &c in columns {
                        values[r * p + c] = data.row(src)[c];
                    }
                }
                let levels = columns.len() + 1;
                for r in sample(&mut rng, m, n_blend.min(m)) {
                    let level = rng.random_range(0..levels);
                    for (k, &c) in columns.iter().enumerate() {
                        values[r * p + c] = if level == k + 1 { 1.0 } else { 0.0 };
                    }
                }
            }
            single => {
                let column = single.columns()[0];
                let observed = data.column(column);
                for r in 0..m {
                    values[r * p + column] = observed[rng.random_range(0..n)];
                }
                match single {
                    ColumnStrategy::Flatten { .. } => {
                        let coin = Bernoulli::new(0.5).unwrap();
                        for r in sample(&mut rng, m, n_blend.min(m)) {
                            values[r * p + column] = if coin.sample(&mut rng) { 1.0 } else { 0.0 };
                        }
                    }
                    ColumnStrategy::NormalBlend { .. } => {
                        let sorted = sorted_copy(&observed);
                        let median = quantile_sorted(&sorted, 0.5);
                        let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
                        if iqr > 0.0 {
                            let normal = Normal::new(median, iqr_matched_sd(iqr)).unwrap();
                            for r in sample(&mut rng, m, n_blend.min(m)) {
                                values[r * p + column] = normal.sample(&mut rng);
                            }
                        } else if n_blend > 0 {
                            fallback_columns.push(column);
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(CovariateDraw {
        values,
        m,
        p,
        fallback_columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixed_data() -> SurvivalDataset {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let b = if i % 10 == 0 { 1.0 } else { 0.0 };
                let c = (i as f64 * 0.37).sin() * 3.0 + 1.0;
                let k = (i % 3) as f64;
                vec![b, c, if k == 1.0 { 1.0 } else { 0.0 }, if k == 2.0 { 1.0 } else { 0.0 }, 5.0]
            })
            .collect();
        let times = (0..40).map(|i| 1.0 + i as f64).collect();
        SurvivalDataset::from_rows(&rows, times, vec![true; 40])
            .unwrap()
            .with_schema(vec![
                ColumnKind::Binary,
                ColumnKind::Continuous,
                ColumnKind::Categorical { group: 0 },
                ColumnKind::Categorical { group: 0 },
                ColumnKind::Continuous,
            ])
            .unwrap()
    }

    #[test]
    fn iqr_sd_matches_normal_quartiles() {
        assert!((iqr_matched_sd(1.348980) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn binary_values_stay_binary_and_dummies_are_one_hot() {
        let data = mixed_data();
        let schema = CovariateGenSchema::from_dataset(&data, 0.5);
        let draw = generate_synthetic_covariates(&data, 500, &schema, 11).unwrap();
        for r in 0..500 {
            let row = &draw.values[r * 5..(r + 1) * 5];
            assert!(row[0] == 0.0 || row[0] == 1.0);
            assert!(row[2] + row[3] <= 1.0);
            assert!(row[2] == 0.0 || row[2] == 1.0);
        }
        // Column 4 is constant: zero IQR falls back to resampling.
        assert_eq!(draw.fallback_columns, vec![4]);
        assert!((0..500).all(|r| draw.values[r * 5 + 4] == 5.0));
        // Flattening lifts the rare binary level well above its 10% base rate.
        let ones = (0..500).filter(|r| draw.values[r * 5] == 1.0).count();
        assert!(ones > 150, "{ones}");
    }

    #[test]
    fn zero_blend_is_pure_resampling() {
        let data = mixed_data();
        let mut schema = CovariateGenSchema::from_dataset(&data, 0.0);
        schema.blend = 0.0;
        let draw = generate_synthetic_covariates(&data, 300, &schema, 3).unwrap();
        let observed = data.column(1);
        for r in 0..300 {
            assert!(observed.contains(&draw.values[r * 5 + 1]));
        }
    }

    #[test]
    fn schema_validation() {
        let data = mixed_data();
        let mut schema = CovariateGenSchema::from_dataset(&data, 0.5);
        schema.blend = 1.5;
        assert!(generate_synthetic_covariates(&data, 10, &schema, 1).is_err());
        let bad = CovariateGenSchema::resample_only(3);
        assert!(generate_synthetic_covariates(&data, 10, &bad, 1).is_err());
        let ok = CovariateGenSchema::resample_only(5);
        assert!(generate_synthetic_covariates(&data, 0, &ok, 1).is_err());
    }

    #[test]
    fn deterministic_for_seed() {
        let data = mixed_data();
        let schema = CovariateGenSchema::from_dataset(&data, 0.5);
        let a = generate_synthetic_covariates(&data, 50, &schema, 9).unwrap();
        let b = generate_synthetic_covariates(&data, 50, &schema, 9).unwrap();
        assert_eq!(a.values, b.values);
    }
}
