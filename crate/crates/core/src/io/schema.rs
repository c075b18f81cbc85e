use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};

/// Role of one input CSV column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnRole {
    Time,
    /// Event indicator. A row is an event when its cell matches one of
    /// `event_codes`; any other value is censored.
    Status {
        #[serde(default = "default_event_codes")]
        event_codes: Vec<String>,
    },
    Continuous,
    /// Two-valued column. Without `levels` the cells must already be 0/1;
    /// with levels `[a, b]`, `a` codes to 0 and `b` to 1.
    Binary {
        #[serde(default)]
        levels: Option<[String; 2]>,
    },
    /// Dummy-coded with the first level as reference.
    Categorical { levels: Vec<String> },
}

fn default_event_codes() -> Vec<String> {
    vec!["1".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    #[serde(flatten)]
    pub role: ColumnRole,
    #[serde(default)]
    pub standardize: bool,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, role: ColumnRole) -> Self {
        Self {
            name: name.into(),
            role,
            standardize: false,
        }
    }

    pub fn standardized(mut self) -> Self {
        self.standardize = true;
        self
    }
}

/// Column layout of an input CSV. Columns of the file not named here are
/// ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSchema {
    pub columns: Vec<ColumnSpec>,
}

impl DataSchema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self> {
        let s = Self { columns };
        s.validate()?;
        Ok(s)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let s: Self = serde_json::from_str(&text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let count = |f: fn(&ColumnRole) -> bool| self.columns.iter().filter(|c| f(&c.role)).count();
        if count(|r| matches!(r, ColumnRole::Time)) != 1 {
            return Err(CoxError::InvalidArgument("schema needs exactly one time column".into()));
        }
        if count(|r| matches!(r, ColumnRole::Status { .. })) != 1 {
            return Err(CoxError::InvalidArgument("schema needs exactly one status column".into()));
        }
        for c in &self.columns {
            match &c.role {
                ColumnRole::Categorical { levels } if levels.len() < 2 => {
                    return Err(CoxError::InvalidArgument(format!(
                        "categorical column `{}` needs at least two levels",
                        c.name
                    )));
                }
                ColumnRole::Status { event_codes } if event_codes.is_empty() => {
                    return Err(CoxError::InvalidArgument("status column needs an event code".into()));
                }
                _ => {}
            }
            if c.standardize && !matches!(c.role, ColumnRole::Continuous) {
                return Err(CoxError::InvalidArgument(format!(
                    "only continuous columns can be standardized (`{}`)",
                    c.name
                )));
            }
        }
        for (i, a) in self.columns.iter().enumerate() {
            if self.columns[..i].iter().any(|b| b.name == a.name) {
                return Err(CoxError::InvalidArgument(format!("duplicate column `{}`", a.name)));
            }
        }
        Ok(())
    }

    /// Schema guessed from a header and its data cells: `time` and `status`
    /// by name (status event code "1"), 0/1 columns binary, other numeric
    /// columns continuous and unstandardized, anything else categorical with
    /// levels in order of first appearance. Columns named `id` or `rownames`
    /// are skipped.
    pub fn infer(header: &[String], rows: &[Vec<String>]) -> Result<Self> {
        let mut columns = Vec::new();
        for (j, name) in header.iter().enumerate() {
            let lower = name.to_ascii_lowercase();
            if lower == "id" || lower == "rownames" || name.is_empty() {
                continue;
            }
            let role = match lower.as_str() {
                "time" => ColumnRole::Time,
                "status" => ColumnRole::Status {
                    event_codes: default_event_codes(),
                },
                _ => {
                    let cells: Vec<&str> = rows
                        .iter()
                        .filter_map(|r| r.get(j))
                        .map(|s| s.trim())
                        .filter(|s| !is_missing(s))
                        .collect();
                    let nums: Option<Vec<f64>> = cells.iter().map(|s| s.parse::<f64>().ok()).collect();
                    match nums {
                        Some(v) if v.iter().all(|&x| x == 0.0 || x == 1.0) => ColumnRole::Binary { levels: None },
                        Some(_) => ColumnRole::Continuous,
                        None => {
                            let mut levels: Vec<String> = Vec::new();
                            for c in cells {
                                if !levels.iter().any(|l| l == c) {
                                    levels.push(c.to_string());
                                }
                            }
                            ColumnRole::Categorical { levels }
                        }
                    }
                }
            };
            columns.push(ColumnSpec::new(name.clone(), role));
        }
        Self::new(columns)
    }
}

pub(crate) fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c == "NA"
}

/// Cell equality that treats `1` and `1.0` as the same level.
pub(crate) fn same_level(cell: &str, level: &str) -> bool {
    let (a, b) = (cell.trim(), level.trim());
    if a == b {
        return true;
    }
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}
