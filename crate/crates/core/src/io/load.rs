use std::path::Path;

use crate::error::{CoxError, Result};
use crate::io::schema::{is_missing, same_level, ColumnRole, DataSchema};
use crate::survival::{ColumnKind, Standardization, SurvivalDataset};
use crate::util::{mean, sample_sd};

/// A cleaned dataset plus what cleaning did to it.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub dataset: SurvivalDataset,
    /// Rows dropped because a used cell was empty or `NA`.
    pub dropped_rows: usize,
    pub schema: DataSchema,
}

/// Header and raw cells of a CSV file.
pub fn read_raw_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

/// Load a survival CSV. With no schema one is inferred from the file.
pub fn load_dataset(path: impl AsRef<Path>, schema: Option<&DataSchema>) -> Result<LoadedData> {
    let (header, rows) = read_raw_csv(path)?;
    if rows.is_empty() {
        return Err(CoxError::InvalidData("file has no data rows".into()));
    }
    let schema = match schema {
        Some(s) => {
            s.validate()?;
            s.clone()
        }
        None => DataSchema::infer(&header, &rows)?,
    };
    build_dataset(&header, &rows, &schema)
}

/// Apply a schema to already-split CSV cells. Rows are numbered from 1,
/// counting data rows only.
pub fn build_dataset(header: &[String], rows: &[Vec<String>], schema: &DataSchema) -> Result<LoadedData> {
    if rows.is_empty() {
        return Err(CoxError::InvalidData("file has no data rows".into()));
    }
    let positions: Vec<usize> = schema
        .columns
        .iter()
        .map(|c| {
            header
                .iter()
                .position(|h| *h == c.name)
                .ok_or_else(|| CoxError::InvalidData(format!("column `{}` not found in header", c.name)))
        })
        .collect::<Result<_>>()?;

    let mut names = Vec::new();
    let mut kinds = Vec::new();
    let mut group = 0;
    for c in &schema.columns {
        match &c.role {
            ColumnRole::Time | ColumnRole::Status { .. } => {}
            ColumnRole::Continuous => {
                names.push(c.name.clone());
                kinds.push(ColumnKind::Continuous);
            }
            ColumnRole::Binary { .. } => {
                names.push(c.name.clone());
                kinds.push(ColumnKind::Binary);
            }
            ColumnRole::Categorical { levels } => {
                for l in &levels[1..] {
                    names.push(format!("{}={}", c.name, l));
                    kinds.push(ColumnKind::Categorical { group });
                }
                group += 1;
            }
        }
    }
    let p = names.len();

    let mut x = Vec::new();
    let mut times = Vec::new();
    let mut status = Vec::new();
    let mut dropped = 0;
    for (i, row) in rows.iter().enumerate() {
        let row_no = i + 1;
        let cell = |k: usize| row.get(positions[k]).map(String::as_str).unwrap_or("");
        if (0..positions.len()).any(|k| is_missing(cell(k))) {
            dropped += 1;
            continue;
        }
        let parse_err = |k: usize, message: String| CoxError::Parse {
            row: row_no,
            column: schema.columns[k].name.clone(),
            message,
        };
        let number = |k: usize| -> Result<f64> {
            let s = cell(k).trim();
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(parse_err(k, format!("cannot parse `{s}` as a number"))),
            }
        };
        let mut xi = Vec::with_capacity(p);
        for (k, c) in schema.columns.iter().enumerate() {
            match &c.role {
                ColumnRole::Time => {
                    let t = number(k)?;
                    if t <= 0.0 {
                        return Err(parse_err(k, format!("survival time must be positive, got {t}")));
                    }
                    times.push(t);
                }
                ColumnRole::Status { event_codes } => {
                    status.push(event_codes.iter().any(|e| same_level(cell(k), e)));
                }
                ColumnRole::Continuous => xi.push(number(k)?),
                ColumnRole::Binary { levels: None } => {
                    let v = number(k)?;
                    if v != 0.0 && v != 1.0 {
                        return Err(parse_err(k, format!("binary column holds {v}")));
                    }
                    xi.push(v);
                }
                ColumnRole::Binary { levels: Some([a, b]) } => {
                    let s = cell(k);
                    if same_level(s, a) {
                        xi.push(0.0);
                    } else if same_level(s, b) {
                        xi.push(1.0);
                    } else {
                        return Err(parse_err(k, format!("`{}` is not one of `{a}`, `{b}`", s.trim())));
                    }
                }
                ColumnRole::Categorical { levels } => {
                    let s = cell(k);
                    let idx = levels
                        .iter()
                        .position(|l| same_level(s, l))
                        .ok_or_else(|| parse_err(k, format!("unknown level `{}`", s.trim())))?;
                    for l in 1..levels.len() {
                        xi.push(if idx == l { 1.0 } else { 0.0 });
                    }
                }
            }
        }
        x.extend(xi);
    }
    let n = times.len();
    if n == 0 {
        return Err(CoxError::InvalidData("no usable rows after dropping missing values".into()));
    }

    let mut standardization = Standardization::identity(p);
    let mut j = 0;
    for c in &schema.columns {
        let width = match &c.role {
            ColumnRole::Time | ColumnRole::Status { .. } => 0,
            ColumnRole::Categorical { levels } => levels.len() - 1,
            _ => 1,
        };
        if c.standardize {
            let col: Vec<f64> = (0..n).map(|i| x[i * p + j]).collect();
            let sd = sample_sd(&col);
            standardization.center[j] = mean(&col);
            standardization.scale[j] = if sd > 0.0 { sd } else { 1.0 };
        }
        j += width;
    }
    if !standardization.is_identity() {
        for row in x.chunks_exact_mut(p.max(1)) {
            for (k, v) in row.iter_mut().enumerate() {
                *v = (*v - standardization.center[k]) / standardization.scale[k];
            }
        }
    }

    let dataset = SurvivalDataset::new(x, p, times, status)?
        .with_schema(kinds)?
        .with_names(names)?
        .with_standardization(standardization);
    Ok(LoadedData {
        dataset,
        dropped_rows: dropped,
        schema: schema.clone(),
    })
}
