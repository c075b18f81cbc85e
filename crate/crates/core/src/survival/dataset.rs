use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};
use crate::survival::risk::RiskIndex;

/// Role of a covariate column, used when synthetic covariates are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Continuous,
    Binary,
    /// One dummy column of an expanded categorical variable. Columns sharing
    /// `group` belong to the same variable; the all-zero row is the reference
    /// level.
    Categorical { group: usize },
}

/// Per-column affine map `standardized = (raw - center) / scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardization {
    pub fn identity(p: usize) -> Self {
        Self {
            center: vec![0.0; p],
            scale: vec![1.0; p],
        }
    }

    /// Coefficients estimated on the standardized scale, mapped back to the
    /// raw covariate scale.
    pub fn to_original_scale(&self, beta: &[f64]) -> Vec<f64> {
        beta.iter().zip(&self.scale).map(|(b, s)| b / s).collect()
    }

    pub fn to_standardized_scale(&self, beta: &[f64]) -> Vec<f64> {
        beta.iter().zip(&self.scale).map(|(b, s)| b * s).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.center.iter().all(|&c| c == 0.0) && self.scale.iter().all(|&s| s == 1.0)
    }
}

/// Right-censored survival data: `n` subjects with `p` covariates each.
///
/// Covariates are stored row-major. The risk-set index is built once on
/// construction; the dataset is immutable afterwards.
#[derive(Debug, Clone)]
pub struct SurvivalDataset {
    x: Vec<f64>,
    n: usize,
    p: usize,
    times: Vec<f64>,
    status: Vec<bool>,
    schema: Vec<ColumnKind>,
    names: Vec<String>,
    standardization: Option<Standardization>,
    index: RiskIndex,
}

impl SurvivalDataset {
    /// Build a dataset from row-major covariates. Column kinds are inferred:
    /// a column taking only the values 0 and 1 is binary, anything else is
    /// continuous.
    pub fn new(covariates: Vec<f64>, p: usize, times: Vec<f64>, status: Vec<bool>) -> Result<Self> {
        if p == 0 {
            return Err(CoxError::InvalidData("p must be at least 1".into()));
        }
        let n = times.len();
        if n == 0 {
            return Err(CoxError::InvalidData("dataset has no rows".into()));
        }
        if covariates.len() != n * p {
            return Err(CoxError::DimensionMismatch {
                expected: n * p,
                got: covariates.len(),
            });
        }
        if status.len() != n {
            return Err(CoxError::DimensionMismatch {
                expected: n,
                got: status.len(),
            });
        }
        if let Some(i) = times.iter().position(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(CoxError::InvalidData(format!(
                "time at row {i} must be positive and finite, got {}",
                times[i]
            )));
        }
        if covariates.iter().any(|v| !v.is_finite()) {
            return Err(CoxError::InvalidData("covariates contain non-finite values".into()));
        }
        let schema = (0..p).map(|j| infer_kind(&covariates, n, p, j)).collect();
        let names = (1..=p).map(|j| format!("x{j}")).collect();
        let index = RiskIndex::new(&times, &status);
        Ok(Self {
            x: covariates,
            n,
            p,
            times,
            status,
            schema,
            names,
            standardization: None,
            index,
        })
    }

    /// Build from a list of covariate rows.
    pub fn from_rows(rows: &[Vec<f64>], times: Vec<f64>, status: Vec<bool>) -> Result<Self> {
        let p = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != p) {
            return Err(CoxError::InvalidData("ragged covariate rows".into()));
        }
        Self::new(rows.concat(), p, times, status)
    }

    pub fn with_schema(mut self, schema: Vec<ColumnKind>) -> Result<Self> {
        if schema.len() != self.p {
            return Err(CoxError::DimensionMismatch {
                expected: self.p,
                got: schema.len(),
            });
        }
        self.schema = schema;
        Ok(self)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.p {
            return Err(CoxError::DimensionMismatch {
                expected: self.p,
                got: names.len(),
            });
        }
        self.names = names;
        Ok(self)
    }

    pub fn with_standardization(mut self, standardization: Standardization) -> Self {
        self.standardization = Some(standardization);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Row-major covariate matrix.
    pub fn covariates(&self) -> &[f64] {
        &self.x
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.x[i * self.p + j]).collect()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn status(&self) -> &[bool] {
        &self.status
    }

    pub fn schema(&self) -> &[ColumnKind] {
        &self.schema
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn standardization(&self) -> Option<&Standardization> {
        self.standardization.as_ref()
    }

    pub fn risk_index(&self) -> &RiskIndex {
        &self.index
    }

    pub fn event_count(&self) -> usize {
        self.status.iter().filter(|&&d| d).count()
    }

    pub fn censoring_fraction(&self) -> f64 {
        1.0 - self.event_count() as f64 / self.n as f64
    }

    /// Linear predictors `x_i' beta`.
    pub fn linear_predictor(&self, beta: &[f64]) -> Vec<f64> {
        self.x
            .chunks_exact(self.p)
            .map(|row| crate::util::dot(row, beta))
            .collect()
    }

    /// Rows selected by `indices`, in that order. Schema, names and any
    /// stored standardization are carried over.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut x = Vec::with_capacity(indices.len() * self.p);
        for &i in indices {
            x.extend_from_slice(self.row(i));
        }
        let times = indices.iter().map(|&i| self.times[i]).collect();
        let status = indices.iter().map(|&i| self.status[i]).collect();
        let mut out = Self::new(x, self.p, times, status)?;
        out.schema = self.schema.clone();
        out.names = self.names.clone();
        out.standardization = self.standardization.clone();
        Ok(out)
    }

    /// Copy with every column centered and scaled to unit sample variance.
    /// Constant columns are centered only. The returned transform maps
    /// standardized coefficients back to this dataset's scale.
    pub fn standardized(&self) -> (Self, Standardization) {
        let mut center = Vec::with_capacity(self.p);
        let mut scale = Vec::with_capacity(self.p);
        for j in 0..self.p {
            let col = self.column(j);
            let m = crate::util::mean(&col);
            let sd = crate::util::sample_sd(&col);
            center.push(m);
            scale.push(if sd > 0.0 { sd } else { 1.0 });
        }
        let mut x = self.x.clone();
        for row in x.chunks_exact_mut(self.p) {
            for j in 0..self.p {
                row[j] = (row[j] - center[j]) / scale[j];
            }
        }
        let out = Self {
            x,
            n: self.n,
            p: self.p,
            times: self.times.clone(),
            status: self.status.clone(),
            schema: self.schema.clone(),
            names: self.names.clone(),
            standardization: None,
            index: self.index.clone(),
        };
        (out, Standardization { center, scale })
    }
}

fn infer_kind(x: &[f64], n: usize, p: usize, j: usize) -> ColumnKind {
    let binary = (0..n).all(|i| {
        let v = x[i * p + j];
        v == 0.0 || v == 1.0
    });
    if binary {
        ColumnKind::Binary
    } else {
        ColumnKind::Continuous
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_inputs() {
        assert!(SurvivalDataset::new(vec![], 1, vec![], vec![]).is_err());
        assert!(SurvivalDataset::new(vec![0.0], 1, vec![0.0], vec![true]).is_err());
        assert!(SurvivalDataset::new(vec![0.0], 1, vec![f64::INFINITY], vec![true]).is_err());
        assert!(SurvivalDataset::new(vec![f64::NAN], 1, vec![1.0], vec![true]).is_err());
        assert!(SurvivalDataset::new(vec![0.0, 1.0], 1, vec![1.0], vec![true]).is_err());
        assert!(SurvivalDataset::new(vec![0.0], 0, vec![1.0], vec![true]).is_err());
    }

    #[test]
    fn infers_binary_columns() {
        let d = SurvivalDataset::from_rows(
            &[vec![0.0, 0.3], vec![1.0, 2.0], vec![1.0, -1.0]],
            vec![1.0, 2.0, 3.0],
            vec![true, false, true],
        )
        .unwrap();
        assert_eq!(d.schema(), &[ColumnKind::Binary, ColumnKind::Continuous]);
        assert_eq!(d.event_count(), 2);
    }

    #[test]
    fn standardization_round_trip() {
        let d = SurvivalDataset::from_rows(
            &[vec![1.0], vec![2.0], vec![6.0]],
            vec![1.0, 2.0, 3.0],
            vec![true, true, true],
        )
        .unwrap();
        let (s, tr) = d.standardized();
        let col = s.column(0);
        assert!(crate::util::mean(&col).abs() < 1e-12);
        assert!((crate::util::sample_sd(&col) - 1.0).abs() < 1e-12);
        let b = tr.to_original_scale(&[2.0]);
        assert!((tr.to_standardized_scale(&b)[0] - 2.0).abs() < 1e-15);
    }
}
