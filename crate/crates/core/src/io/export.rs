use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::bayes::PosteriorSamples;
use crate::error::{CoxError, Result};
use crate::simlab::SimulationReport;
use crate::survival::SurvivalDataset;
use crate::synthesis::SyntheticDataset;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn covariate_names(p: usize, names: &[String]) -> Vec<String> {
    if names.len() == p {
        names.to_vec()
    } else {
        (1..=p).map(|j| format!("x{j}")).collect()
    }
}

/// `time,status,<covariates>` with status coded 0/1. Covariates are written
/// as stored, i.e. standardized if the dataset was.
pub fn write_dataset_csv(data: &SurvivalDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["time".to_string(), "status".to_string()];
    header.extend(covariate_names(data.p(), data.names()));
    w.write_record(&header)?;
    for i in 0..data.n() {
        let mut rec = vec![fmt_f64(data.times()[i]), u8::from(data.status()[i]).to_string()];
        rec.extend(data.row(i).iter().map(|&v| fmt_f64(v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_dataset_csv`]: first column time, second status, the
/// rest covariates.
pub fn read_dataset_csv(path: impl AsRef<Path>) -> Result<SurvivalDataset> {
    let (header, rows) = crate::io::load::read_raw_csv(path)?;
    if header.len() < 2 {
        return Err(CoxError::InvalidData("expected time, status and covariate columns".into()));
    }
    let p = header.len() - 2;
    let (x, times, status) = parse_numeric_rows(&header, &rows, 2)?;
    let status = status
        .into_iter()
        .map(|s| s != 0.0)
        .collect();
    SurvivalDataset::new(x, p, times, status)?.with_names(header[2..].to_vec())
}

/// `y_star,x1..xp`.
pub fn write_synthetic_csv(synth: &SyntheticDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["y_star".to_string()];
    header.extend((1..=synth.p()).map(|j| format!("x{j}")));
    w.write_record(&header)?;
    for i in 0..synth.m() {
        let mut rec = vec![fmt_f64(synth.times()[i])];
        rec.extend(synth.row(i).iter().map(|&v| fmt_f64(v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_synthetic_csv(path: impl AsRef<Path>) -> Result<SyntheticDataset> {
    let (header, rows) = crate::io::load::read_raw_csv(path)?;
    if header.is_empty() {
        return Err(CoxError::InvalidData("synthetic file has no columns".into()));
    }
    let (x, times, _) = parse_numeric_rows(&header, &rows, 1)?;
    SyntheticDataset::new(x, header.len() - 1, times)
}

/// Numeric table split into covariates, first column and (if `lead == 2`)
/// second column.
fn parse_numeric_rows(header: &[String], rows: &[Vec<String>], lead: usize) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if rows.is_empty() {
        return Err(CoxError::InvalidData("file has no data rows".into()));
    }
    let mut x = Vec::new();
    let mut first = Vec::new();
    let mut second = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(CoxError::Parse {
                row: i + 1,
                column: String::new(),
                message: format!("expected {} fields, found {}", header.len(), row.len()),
            });
        }
        for (j, cell) in row.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| CoxError::Parse {
                row: i + 1,
                column: header[j].clone(),
                message: format!("cannot parse `{}` as a number", cell.trim()),
            })?;
            match j {
                0 => first.push(v),
                1 if lead == 2 => second.push(v),
                _ => x.push(v),
            }
        }
    }
    Ok((x, first, second))
}

/// One retained draw per row: `iteration,chain,beta_1..beta_p,h_1..h_J[,tau]`.
/// Iterations count from 1 after burn-in within each chain.
pub fn write_chain_csv(samples: &PosteriorSamples, names: &[String], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["iteration".to_string(), "chain".to_string()];
    header.extend(covariate_names(samples.p, names).into_iter().map(|n| format!("beta_{n}")));
    header.extend((1..=samples.j).map(|j| format!("h_{j}")));
    if samples.tau.is_some() {
        header.push("tau".into());
    }
    w.write_record(&header)?;
    for s in 0..samples.len() {
        let chain = s / samples.draws_per_chain;
        let iter = samples.burnin + s % samples.draws_per_chain + 1;
        let mut rec = vec![iter.to_string(), chain.to_string()];
        rec.extend(samples.beta_draw(s).iter().map(|&v| fmt_f64(v)));
        rec.extend(samples.h_draw(s).iter().map(|&v| fmt_f64(v)));
        if let Some(t) = &samples.tau {
            rec.push(fmt_f64(t[s]));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format `scenario,method,metric,mean,se` rows.
pub fn write_table_csv(rows: &[(String, String, &str, f64, f64)], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["scenario", "method", "metric", "mean", "se"])?;
    for (scenario, method, metric, mean, se) in rows {
        w.write_record([scenario.as_str(), method.as_str(), metric, &fmt_f64(*mean), &fmt_f64(*se)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_report_table(report: &SimulationReport, path: impl AsRef<Path>) -> Result<()> {
    write_table_csv(&report.long_rows(), path)
}

/// Pretty-printed JSON.
pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}
