//! Command-line front end. The `catcox` binary forwards to [`run`].

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bayes::{
    beta_rhat, build_partition, posterior_summary, sample_posterior, BetaPrior, GammaProcessConfig, SamplerConfig,
    DEFAULT_C0, DEFAULT_INTERVALS,
};
use crate::error::CoxError;
use crate::estimators::{cre, fit_penalized_standardized, wme, Penalty};
use crate::io::{
    load_dataset, read_synthetic_csv, write_chain_csv, write_json, write_report_table, write_synthetic_csv,
    DataSchema,
};
use crate::optim::{FitResult, SolverOptions};
use crate::simlab::{consistency_demo, mple_bias_demo, run_study, Method, SimulationConfig};
use crate::survival::{mple, standard_errors, SurvivalDataset};
use crate::synthesis::{
    default_synthetic_size, AdaptiveHyper, CatalyticPrior, CovariateGenSchema, SyntheticDataset, DEFAULT_BLEND,
};
use crate::tuning::{cv_cre, cv_penalized, cv_wme, default_tau_grid, CvConfig, CvResult, DEFAULT_FOLDS};
use crate::util::normal_quantile;

/// Environment variable holding the default worker-thread count.
pub const THREADS_ENV: &str = "CATCOX_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Cox(#[from] CoxError),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            Self::Usage(_) => "usage",
            Self::Cox(CoxError::Parse { .. } | CoxError::InvalidData(_) | CoxError::Csv(_)) => "data",
            Self::Cox(CoxError::Io(_)) => "io",
            Self::Cox(_) => "runtime",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Cox(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "catcox", version, about = "Cox regression with catalytic priors")]
pub struct Cli {
    /// Worker threads for cross-validation and simulation.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one estimator to a dataset.
    Fit(FitArgs),
    /// Generate a synthetic dataset for a catalytic prior.
    Synth(SynthArgs),
    /// Draw from the posterior under a Gamma-process baseline.
    Sample(SampleArgs),
    /// Cross-validated partial likelihood over a tuning grid.
    Cv(CvArgs),
    /// Run a simulation scenario.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// JSON column schema; inferred from the file when absent.
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthSource {
    /// Synthetic sample size (default max(1000, 4p)).
    #[arg(long = "synthetic-size", visible_alias = "M", conflicts_with = "synthetic")]
    pub synthetic_size: Option<usize>,
    /// Reuse a synthetic CSV written by `synth` instead of generating one.
    #[arg(long)]
    pub synthetic: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMethod {
    Mple,
    Cre,
    Wme,
    Ridge,
    Lasso,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub method: FitMethod,
    /// Prior weight: a number, `p`, or `cv` (cre and wme only; default p).
    #[arg(long)]
    pub tau: Option<String>,
    /// Penalty level: a number or `cv` (ridge and lasso only; default cv).
    #[arg(long)]
    pub lambda: Option<String>,
    #[command(flatten)]
    pub synth: SynthSource,
    /// Cross-validation folds.
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    pub k: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report coefficients on the standardized covariate scale.
    #[arg(long)]
    pub standardized_scale: bool,
    #[arg(long, default_value = "catcox-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Synthetic sample size (default max(1000, 4p)).
    #[arg(long = "M", visible_alias = "synthetic-size")]
    pub m: Option<usize>,
    /// Fraction of resampled values replaced by the flattening law.
    #[arg(long, default_value_t = DEFAULT_BLEND)]
    pub blend: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = "catcox-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorArg {
    Catalytic,
    Adaptive,
    Gaussian,
    Flat,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "catalytic")]
    pub prior: PriorArg,
    /// Catalytic prior weight (default p).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Gaussian prior variance on the standardized scale.
    #[arg(long)]
    pub variance: Option<f64>,
    #[arg(long, default_value_t = 4000)]
    pub iters: usize,
    #[arg(long, default_value_t = 2000)]
    pub burnin: usize,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    /// Baseline-hazard partition size.
    #[arg(long, default_value_t = DEFAULT_INTERVALS)]
    pub intervals: usize,
    #[command(flatten)]
    pub synth: SynthSource,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub standardized_scale: bool,
    #[arg(long, default_value = "catcox-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CvMethod {
    Cre,
    Wme,
    Ridge,
    Lasso,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub method: CvMethod,
    /// Comma-separated increasing grid (default depends on the method).
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    pub k: usize,
    #[command(flatten)]
    pub synth: SynthSource,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = "catcox-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Table2,
    Bias,
    Consistency,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    /// Dimension; a comma-separated list for `consistency`.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<usize>>,
    /// Sample size; a comma-separated list for `consistency`.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Target censoring rate (`table2`).
    #[arg(long, default_value_t = 0.2)]
    pub censor: f64,
    /// Replications (`table2`) or seeds per cell (`consistency`).
    #[arg(long)]
    pub reps: Option<usize>,
    /// Add the Bayesian methods to `table2`.
    #[arg(long)]
    pub bayes: bool,
    /// Comma-separated method list for `table2`, overriding the defaults.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long = "synthetic-size", visible_alias = "M")]
    pub synthetic_size: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = "catcox-out")]
    pub out: PathBuf,
}

/// Parse `args` (program name first), execute, and return the exit status.
/// Errors are written to stderr as JSON.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let err = usage(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            use std::io::Write;
            let text = serde_json::to_string_pretty(&summary).unwrap_or_default();
            let _ = writeln!(std::io::stdout(), "{text}");
            0
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.exit_code()
        }
    }
}

/// Execute a parsed command, writing outputs under its `--out` directory.
/// Returns the JSON summary that was also written to `summary.json`.
pub fn execute(cli: &Cli) -> CliResult<Value> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(usage("--threads must be positive"));
        }
        // A pool that already exists (e.g. a second call in one process) is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let (out, summary) = match &cli.command {
        Command::Fit(a) => (&a.out, fit_cmd(a)?),
        Command::Synth(a) => (&a.out, synth_cmd(a)?),
        Command::Sample(a) => (&a.out, sample_cmd(a)?),
        Command::Cv(a) => (&a.out, cv_cmd(a)?),
        Command::Simulate(a) => (&a.out, simulate_cmd(a)?),
    };
    write_json(&summary, out.join("summary.json"))?;
    Ok(summary)
}

fn prepare_out(out: &Path) -> CliResult<()> {
    std::fs::create_dir_all(out).map_err(CoxError::from)?;
    Ok(())
}

fn load(args: &DataArgs) -> CliResult<(SurvivalDataset, usize)> {
    let schema = args.schema.as_ref().map(DataSchema::from_json_file).transpose()?;
    let loaded = load_dataset(&args.data, schema.as_ref())?;
    Ok((loaded.dataset, loaded.dropped_rows))
}

/// Synthetic data either read from file or generated from `data` with the
/// default flattening schema.
pub fn synthetic_for(data: &SurvivalDataset, m: Option<usize>, blend: f64, seed: u64) -> crate::error::Result<SyntheticDataset> {
    let schema = CovariateGenSchema::from_dataset(data, blend);
    SyntheticDataset::generate(data, m.unwrap_or_else(|| default_synthetic_size(data.p())), &schema, seed)
}

fn obtain_synthetic(data: &SurvivalDataset, src: &SynthSource, seed: Option<u64>) -> CliResult<SyntheticDataset> {
    let synth = match &src.synthetic {
        Some(path) => read_synthetic_csv(path)?,
        None => {
            let seed = seed.ok_or_else(|| usage("--seed is required to generate synthetic data"))?;
            synthetic_for(data, src.synthetic_size, DEFAULT_BLEND, seed)?
        }
    };
    if synth.p() != data.p() {
        return Err(CoxError::DimensionMismatch {
            expected: data.p(),
            got: synth.p(),
        }
        .into());
    }
    Ok(synth)
}

enum Tuning {
    Value(f64),
    Cv,
}

fn parse_tuning(flag: &str, raw: &str, p: usize) -> CliResult<Tuning> {
    match raw {
        "cv" => Ok(Tuning::Cv),
        "p" => Ok(Tuning::Value(p as f64)),
        s => match s.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(Tuning::Value(v)),
            _ => Err(usage(format!("--{flag} must be a positive number or `cv`, got `{s}`"))),
        },
    }
}

fn coefficients_json(data: &SurvivalDataset, beta: &[f64], se: Option<&[f64]>, standardized: bool) -> Value {
    let scale: Vec<f64> = match (standardized, data.standardization()) {
        (false, Some(s)) => s.scale.clone(),
        _ => vec![1.0; data.p()],
    };
    let z = normal_quantile(0.975);
    let names: Vec<String> = if data.names().len() == data.p() {
        data.names().to_vec()
    } else {
        (1..=data.p()).map(|j| format!("x{j}")).collect()
    };
    let rows: Vec<Value> = (0..data.p())
        .map(|k| {
            let b = beta[k] / scale[k];
            match se {
                Some(se) => {
                    let s = se[k] / scale[k];
                    json!({ "name": names[k], "estimate": b, "se": s, "lower": b - z * s, "upper": b + z * s })
                }
                None => json!({ "name": names[k], "estimate": b }),
            }
        })
        .collect();
    Value::Array(rows)
}

fn fit_cmd(a: &FitArgs) -> CliResult<Value> {
    let catalytic = matches!(a.method, FitMethod::Cre | FitMethod::Wme);
    let penalized = matches!(a.method, FitMethod::Ridge | FitMethod::Lasso);
    if a.tau.is_some() && !catalytic {
        return Err(usage("--tau applies to --method cre or wme only"));
    }
    if a.lambda.is_some() && !penalized {
        return Err(usage("--lambda applies to --method ridge or lasso only"));
    }
    if !catalytic && (a.synth.synthetic.is_some() || a.synth.synthetic_size.is_some()) {
        return Err(usage("synthetic data options apply to --method cre or wme only"));
    }
    prepare_out(&a.out)?;
    let (data, dropped) = load(&a.data)?;
    let opts = SolverOptions::default();
    let p = data.p();
    let mut tuning = Value::Null;
    let mut cv_json = Value::Null;

    let fit: FitResult = match a.method {
        FitMethod::Mple => mple(&data, &opts)?,
        FitMethod::Cre | FitMethod::Wme => {
            let synth = obtain_synthetic(&data, &a.synth, a.seed)?;
            let tau = match parse_tuning("tau", a.tau.as_deref().unwrap_or("p"), p)? {
                Tuning::Value(t) => t,
                Tuning::Cv => {
                    let seed = a.seed.ok_or_else(|| usage("--seed is required with --tau cv"))?;
                    let config = CvConfig::new(a.k, default_tau_grid(p), seed)?;
                    let cv = if a.method == FitMethod::Cre {
                        cv_cre(&data, &CatalyticPrior::with_fitted_hazard(synth.clone(), p as f64)?, &config, &opts)?
                    } else {
                        cv_wme(&data, &synth, &config, &opts)?
                    };
                    cv_json = cv_to_json(&cv);
                    cv.best_value
                }
            };
            tuning = json!({ "tau": tau, "synthetic_size": synth.m() });
            if a.method == FitMethod::Cre {
                cre(&data, &CatalyticPrior::with_fitted_hazard(synth, tau)?, &opts)?
            } else {
                wme(&data, &synth, tau, &opts)?
            }
        }
        FitMethod::Ridge | FitMethod::Lasso => {
            let ridge = a.method == FitMethod::Ridge;
            let lambda = match parse_tuning("lambda", a.lambda.as_deref().unwrap_or("cv"), p)? {
                Tuning::Value(l) => l,
                Tuning::Cv => {
                    let seed = a.seed.ok_or_else(|| usage("--seed is required with --lambda cv"))?;
                    let cv = cv_penalized(&data, ridge, a.k, None, seed, &opts)?;
                    cv_json = cv_to_json(&cv);
                    cv.best_value
                }
            };
            tuning = json!({ "lambda": lambda });
            let penalty = if ridge { Penalty::Ridge(lambda) } else { Penalty::Lasso(lambda) };
            fit_penalized_standardized(&data, penalty, &opts)?.0
        }
    };
    let se = if a.method == FitMethod::Lasso {
        None
    } else {
        standard_errors(&fit).ok()
    };
    Ok(json!({
        "command": "fit",
        "method": format!("{:?}", a.method).to_lowercase(),
        "n": data.n(),
        "p": p,
        "dropped_rows": dropped,
        "seed": a.seed,
        "tuning": tuning,
        "cv": cv_json,
        "scale": if a.standardized_scale { "standardized" } else { "original" },
        "coefficients": coefficients_json(&data, &fit.beta, se.as_deref(), a.standardized_scale),
        "beta_internal": fit.beta,
        "converged": fit.converged,
        "diverged": fit.diverged,
        "iterations": fit.iterations,
        "objective": fit.objective,
    }))
}

fn cv_to_json(cv: &CvResult) -> Value {
    json!({ "best": cv.best_value, "grid": cv.grid, "scores": cv.scores })
}

fn synth_cmd(a: &SynthArgs) -> CliResult<Value> {
    prepare_out(&a.out)?;
    let (data, dropped) = load(&a.data)?;
    let synth = synthetic_for(&data, a.m, a.blend, a.seed)?;
    let path = a.out.join("synthetic.csv");
    write_synthetic_csv(&synth, &path)?;
    Ok(json!({
        "command": "synth",
        "n": data.n(),
        "p": data.p(),
        "dropped_rows": dropped,
        "m": synth.m(),
        "seed": a.seed,
        "blend": a.blend,
        "output": path,
    }))
}

fn sample_cmd(a: &SampleArgs) -> CliResult<Value> {
    if a.tau.is_some() && a.prior != PriorArg::Catalytic {
        return Err(usage("--tau applies to --prior catalytic only"));
    }
    if a.variance.is_some() && a.prior != PriorArg::Gaussian {
        return Err(usage("--variance applies to --prior gaussian only"));
    }
    let uses_synth = matches!(a.prior, PriorArg::Catalytic | PriorArg::Adaptive);
    if !uses_synth && (a.synth.synthetic.is_some() || a.synth.synthetic_size.is_some()) {
        return Err(usage("synthetic data options apply to catalytic and adaptive priors only"));
    }
    prepare_out(&a.out)?;
    let (data, dropped) = load(&a.data)?;
    let opts = SolverOptions::default();
    let p = data.p() as f64;
    let prior = match a.prior {
        PriorArg::Catalytic => {
            let synth = obtain_synthetic(&data, &a.synth, Some(a.seed))?;
            BetaPrior::Catalytic(CatalyticPrior::with_fitted_hazard(synth, a.tau.unwrap_or(p))?)
        }
        PriorArg::Adaptive => {
            let synth = obtain_synthetic(&data, &a.synth, Some(a.seed))?;
            BetaPrior::Adaptive(
                CatalyticPrior::with_fitted_hazard(synth, p)?.into_adaptive(AdaptiveHyper::default(), &opts)?,
            )
        }
        PriorArg::Gaussian => BetaPrior::Gaussian {
            variance: a.variance.unwrap_or(1.0),
        },
        PriorArg::Flat => BetaPrior::Flat,
    };
    let grid = build_partition(&data, a.intervals)?;
    let gp = GammaProcessConfig::from_data(&data, DEFAULT_C0)?;
    let mut cfg = SamplerConfig::new(a.seed);
    cfg.iterations = a.iters;
    cfg.burnin = a.burnin;
    cfg.chains = a.chains;
    cfg.adaptive_tau = a.prior == PriorArg::Adaptive;
    let samples = sample_posterior(&data, &grid, &gp, &prior, &cfg)?;
    let summary = posterior_summary(&samples, 0.95)?;
    write_chain_csv(&samples, data.names(), a.out.join("chain.csv"))?;

    let scale: Vec<f64> = match (a.standardized_scale, data.standardization()) {
        (false, Some(s)) => s.scale.clone(),
        _ => vec![1.0; data.p()],
    };
    let rhat = if a.chains > 1 { Some(beta_rhat(&samples)) } else { None };
    let coefs: Vec<Value> = summary
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let name = data.names().get(k).cloned().unwrap_or_else(|| format!("x{}", k + 1));
            json!({
                "name": name,
                "mean": s.mean / scale[k],
                "sd": s.sd / scale[k],
                "lower": s.lower / scale[k],
                "upper": s.upper / scale[k],
                "rhat": rhat.as_ref().map(|r| r[k]),
            })
        })
        .collect();
    Ok(json!({
        "command": "sample",
        "prior": format!("{:?}", a.prior).to_lowercase(),
        "n": data.n(),
        "p": data.p(),
        "dropped_rows": dropped,
        "seed": a.seed,
        "iterations": a.iters,
        "burnin": a.burnin,
        "chains": a.chains,
        "partition": grid.boundaries(),
        "scale": if a.standardized_scale { "standardized" } else { "original" },
        "coefficients": coefs,
        "acceptance": { "beta": samples.acceptance.beta, "h": samples.acceptance.h },
        "tau_mean": samples.tau.as_ref().map(|t| crate::util::mean(t)),
    }))
}

fn cv_cmd(a: &CvArgs) -> CliResult<Value> {
    let uses_synth = matches!(a.method, CvMethod::Cre | CvMethod::Wme);
    if !uses_synth && (a.synth.synthetic.is_some() || a.synth.synthetic_size.is_some()) {
        return Err(usage("synthetic data options apply to --method cre or wme only"));
    }
    prepare_out(&a.out)?;
    let (data, dropped) = load(&a.data)?;
    let opts = SolverOptions::default();
    let p = data.p();
    let cv = match a.method {
        CvMethod::Cre | CvMethod::Wme => {
            let synth = obtain_synthetic(&data, &a.synth, Some(a.seed))?;
            let grid = a.grid.clone().unwrap_or_else(|| default_tau_grid(p));
            let config = CvConfig::new(a.k, grid, a.seed)?;
            if a.method == CvMethod::Cre {
                cv_cre(&data, &CatalyticPrior::with_fitted_hazard(synth, p as f64)?, &config, &opts)?
            } else {
                cv_wme(&data, &synth, &config, &opts)?
            }
        }
        CvMethod::Ridge | CvMethod::Lasso => {
            cv_penalized(&data, a.method == CvMethod::Ridge, a.k, a.grid.clone(), a.seed, &opts)?
        }
    };
    let mut w = csv::Writer::from_path(a.out.join("cv.csv")).map_err(CoxError::from)?;
    w.write_record(["value", "cvpl"]).map_err(CoxError::from)?;
    for (g, s) in cv.grid.iter().zip(&cv.scores) {
        w.write_record([crate::io::fmt_f64(*g), crate::io::fmt_f64(*s)])
            .map_err(CoxError::from)?;
    }
    w.flush().map_err(CoxError::from)?;
    Ok(json!({
        "command": "cv",
        "method": format!("{:?}", a.method).to_lowercase(),
        "n": data.n(),
        "p": p,
        "dropped_rows": dropped,
        "folds": a.k,
        "seed": a.seed,
        "cv": cv_to_json(&cv),
    }))
}

fn single(flag: &str, v: &Option<Vec<usize>>, default: usize) -> CliResult<usize> {
    match v.as_deref() {
        None => Ok(default),
        Some([x]) => Ok(*x),
        Some(_) => Err(usage(format!("--{flag} takes a single value for this scenario"))),
    }
}

fn simulate_cmd(a: &SimulateArgs) -> CliResult<Value> {
    if a.scenario != ScenarioArg::Table2 && (a.bayes || a.methods.is_some()) {
        return Err(usage("--bayes and --methods apply to --scenario table2 only"));
    }
    prepare_out(&a.out)?;
    let opts = SolverOptions::default();
    match a.scenario {
        ScenarioArg::Table2 => {
            let p = single("p", &a.p, 20)?;
            let mut cfg = SimulationConfig::new(p, a.censor, a.reps.unwrap_or(100), a.seed);
            cfg.n = single("n", &a.n, cfg.n)?;
            if let Some(m) = a.synthetic_size {
                cfg.m = m;
            }
            if let Some(list) = &a.methods {
                cfg.methods = list
                    .iter()
                    .map(|s| s.parse::<Method>())
                    .collect::<crate::error::Result<_>>()
                    .map_err(|e| usage(e.to_string()))?;
            }
            if a.bayes {
                for m in Method::BAYES {
                    if !cfg.methods.contains(&m) {
                        cfg.methods.push(m);
                    }
                }
            }
            let report = run_study(&cfg, &opts)?;
            write_report_table(&report, a.out.join("table.csv"))?;
            Ok(json!({
                "command": "simulate",
                "scenario": "table2",
                "config": report.config,
                "xi": report.xi,
                "beta0": report.beta0,
                "realized_censoring": report.realized_censoring,
                "summaries": report.summaries,
                "failures": report.failures,
            }))
        }
        ScenarioArg::Bias => {
            let p = single("p", &a.p, 200)?;
            let n = single("n", &a.n, 400)?;
            let pairs = mple_bias_demo(p, n, a.seed)?;
            let mut w = csv::Writer::from_path(a.out.join("table.csv")).map_err(CoxError::from)?;
            w.write_record(["beta0", "beta_hat"]).map_err(CoxError::from)?;
            for (b0, bh) in &pairs {
                w.write_record([crate::io::fmt_f64(*b0), crate::io::fmt_f64(*bh)])
                    .map_err(CoxError::from)?;
            }
            w.flush().map_err(CoxError::from)?;
            Ok(json!({ "command": "simulate", "scenario": "bias", "p": p, "n": n, "seed": a.seed }))
        }
        ScenarioArg::Consistency => {
            let p_list = a.p.clone().unwrap_or_else(|| vec![5, 20]);
            let n_list = a.n.clone().unwrap_or_else(|| vec![100, 400, 1600]);
            let m = a.synthetic_size.unwrap_or(400);
            let table = consistency_demo(&p_list, &n_list, m, a.reps.unwrap_or(50), a.seed)?;
            let mut rows = Vec::new();
            for (i, p) in p_list.iter().enumerate() {
                for (j, n) in n_list.iter().enumerate() {
                    let scenario = format!("n={n},p={p}");
                    rows.push((scenario.clone(), "CRE(tau=p)".to_string(), "squared_error", table.cre[i][j], f64::NAN));
                    rows.push((scenario, "WME(tau=p/5)".to_string(), "squared_error", table.wme[i][j], f64::NAN));
                }
            }
            crate::io::write_table_csv(&rows, a.out.join("table.csv"))?;
            Ok(json!({ "command": "simulate", "scenario": "consistency", "m": m, "seed": a.seed, "table": table }))
        }
    }
}
