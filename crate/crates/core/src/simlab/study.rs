//! Replicated simulation studies and their summary reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{
    build_partition, posterior_summary, sample_posterior, BetaPrior, GammaProcessConfig, SamplerConfig, DEFAULT_C0,
    DEFAULT_INTERVALS,
};
use crate::error::{CoxError, Result};
use crate::estimators::{cre, fit_penalized_standardized, wme, Penalty};
use crate::optim::{FitResult, SolverOptions};
use crate::rng::{derive_rng, derive_seed, tags};
use crate::survival::{mple, predictive_deviance, wald_intervals, Interval, SurvivalDataset};
use crate::synthesis::{AdaptiveHyper, CatalyticPrior, CovariateGenSchema, SyntheticDataset, DEFAULT_BLEND};
use crate::tuning::{cv_cre, cv_penalized, cv_wme, default_tau_grid, CvConfig, DEFAULT_FOLDS};
use crate::util::squared_distance;

use super::design::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mple,
    CreCv,
    /// CRE with `tau = p`.
    CreP,
    WmeCv,
    /// WME with `tau = p`.
    WmeP,
    RidgeCv,
    LassoCv,
    /// Posterior mean under the catalytic prior, `tau` from the CRE's CV.
    CpmCv,
    /// Posterior mean under the catalytic prior with `tau = p`.
    CpmP,
    /// Posterior mean under the adaptive catalytic prior.
    Apm,
    /// Posterior mean under a Gaussian prior with variance from ridge CV.
    GpmCv,
}

impl Method {
    pub const POINT: [Method; 7] = [
        Method::Mple,
        Method::CreCv,
        Method::CreP,
        Method::WmeCv,
        Method::WmeP,
        Method::RidgeCv,
        Method::LassoCv,
    ];

    pub const BAYES: [Method; 4] = [Method::CpmCv, Method::CpmP, Method::Apm, Method::GpmCv];

    pub fn is_bayesian(&self) -> bool {
        matches!(self, Method::CpmCv | Method::CpmP | Method::Apm | Method::GpmCv)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Method::Mple => "MPLE",
            Method::CreCv => "CRE(CV)",
            Method::CreP => "CRE(tau=p)",
            Method::WmeCv => "WME(CV)",
            Method::WmeP => "WME(tau=p)",
            Method::RidgeCv => "Ridge(CV)",
            Method::LassoCv => "Lasso(CV)",
            Method::CpmCv => "CPM(CV)",
            Method::CpmP => "CPM(tau=p)",
            Method::Apm => "APM",
            Method::GpmCv => "GPM(CV)",
        }
    }

    fn needs_synthetic(&self) -> bool {
        matches!(
            self,
            Method::CreCv | Method::CreP | Method::WmeCv | Method::WmeP | Method::CpmCv | Method::CpmP | Method::Apm
        )
    }
}

impl std::str::FromStr for Method {
    type Err = CoxError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['(', ')', '=', '-', ' '], "_");
        let key = key.trim_matches('_');
        Ok(match key {
            "mple" => Method::Mple,
            "cre_cv" | "cre" => Method::CreCv,
            "cre_p" | "cre_tau_p" => Method::CreP,
            "wme_cv" | "wme" => Method::WmeCv,
            "wme_p" | "wme_tau_p" => Method::WmeP,
            "ridge_cv" | "ridge" => Method::RidgeCv,
            "lasso_cv" | "lasso" => Method::LassoCv,
            "cpm_cv" | "cpm" => Method::CpmCv,
            "cpm_p" | "cpm_tau_p" => Method::CpmP,
            "apm" => Method::Apm,
            "gpm_cv" | "gpm" => Method::GpmCv,
            _ => return Err(CoxError::InvalidArgument(format!("unknown method `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n: usize,
    pub p: usize,
    pub censor_rate: f64,
    pub replications: usize,
    pub methods: Vec<Method>,
    /// Synthetic sample size.
    pub m: usize,
    pub seed: u64,
    pub n_test: usize,
    pub folds: usize,
    /// Sampler iterations (burn-in included) and burn-in for Bayesian rows.
    pub sampler_iterations: usize,
    pub sampler_burnin: usize,
}

impl SimulationConfig {
    pub fn new(p: usize, censor_rate: f64, replications: usize, seed: u64) -> Self {
        Self {
            n: 100,
            p,
            censor_rate,
            replications,
            methods: Method::POINT.to_vec(),
            m: 1000,
            seed,
            n_test: 100,
            folds: DEFAULT_FOLDS,
            sampler_iterations: 4000,
            sampler_burnin: 2000,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.p < 8 {
            return Err(CoxError::InvalidArgument("simulation design needs p >= 8".into()));
        }
        if !(self.censor_rate > 0.0 && self.censor_rate < 1.0) {
            return Err(CoxError::InvalidArgument("censor rate must lie in (0, 1)".into()));
        }
        if self.n == 0 || self.n_test == 0 || self.m == 0 {
            return Err(CoxError::InvalidArgument("n, n_test and m must be positive".into()));
        }
        Ok(())
    }
}

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { mean: f64::NAN, se: f64::NAN };
        }
        let mean = crate::util::mean(values);
        let se = if values.len() > 1 {
            crate::util::sample_sd(values) / (values.len() as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, se }
    }
}

/// One method's outcome on one replication.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub replication: usize,
    pub method: Method,
    pub beta_hat: Vec<f64>,
    pub squared_error: f64,
    pub deviance: f64,
    pub diverged: bool,
    /// Selected tuning value, if any.
    pub tuning: Option<f64>,
    /// Share of coefficients whose 95% interval covers the truth, and the
    /// mean interval width (credible intervals for Bayesian rows, Wald
    /// intervals for the MPLE).
    pub coverage: Option<f64>,
    pub width: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub label: String,
    pub completed: usize,
    pub failures: usize,
    pub diverged: usize,
    pub squared_error: MeanSe,
    pub deviance: MeanSe,
    pub coverage: Option<MeanSe>,
    pub width: Option<MeanSe>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub xi: f64,
    pub beta0: Vec<f64>,
    /// Pooled censoring fraction of the training sets.
    pub realized_censoring: f64,
    pub summaries: Vec<MethodSummary>,
    pub records: Vec<ReplicationRecord>,
    /// `(replication, method, message)` for fits that errored.
    pub failures: Vec<(usize, Method, String)>,
}

impl SimulationReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    /// Long-format rows `(scenario, method, metric, mean, se)`.
    pub fn long_rows(&self) -> Vec<(String, String, &'static str, f64, f64)> {
        let scenario = format!("n={},p={},r={}", self.config.n, self.config.p, self.config.censor_rate);
        let mut rows = Vec::new();
        for s in &self.summaries {
            rows.push((scenario.clone(), s.label.clone(), "squared_error", s.squared_error.mean, s.squared_error.se));
            rows.push((scenario.clone(), s.label.clone(), "deviance", s.deviance.mean, s.deviance.se));
            if let (Some(c), Some(w)) = (s.coverage, s.width) {
                rows.push((scenario.clone(), s.label.clone(), "coverage", c.mean, c.se));
                rows.push((scenario.clone(), s.label.clone(), "width", w.mean, w.se));
            }
        }
        rows
    }
}

struct Outcome {
    beta: Vec<f64>,
    diverged: bool,
    tuning: Option<f64>,
    intervals: Option<Vec<Interval>>,
}

impl Outcome {
    fn point(fit: FitResult, tuning: Option<f64>) -> Self {
        Self {
            beta: fit.beta,
            diverged: fit.diverged,
            tuning,
            intervals: None,
        }
    }
}

/// Posterior mean and 95% credible intervals on the original scale.
fn bayes_outcome(
    data: &SurvivalDataset,
    prior: &BetaPrior,
    cfg: &SimulationConfig,
    seed: u64,
    tuning: Option<f64>,
) -> Result<Outcome> {
    let grid = build_partition(data, DEFAULT_INTERVALS)?;
    let gp = GammaProcessConfig::from_data(data, DEFAULT_C0)?;
    let mut sc = SamplerConfig::new(seed);
    sc.iterations = cfg.sampler_iterations;
    sc.burnin = cfg.sampler_burnin;
    sc.adaptive_tau = matches!(prior, BetaPrior::Adaptive(_));
    let samples = sample_posterior(data, &grid, &gp, prior, &sc)?;
    let summary = posterior_summary(&samples, 0.95)?;
    Ok(Outcome {
        beta: summary.iter().map(|s| s.mean).collect(),
        diverged: false,
        tuning,
        intervals: Some(
            summary
                .iter()
                .map(|s| Interval {
                    lower: s.lower,
                    upper: s.upper,
                })
                .collect(),
        ),
    })
}

fn fit_method(
    method: Method,
    train: &SurvivalDataset,
    synth: Option<&SyntheticDataset>,
    cfg: &SimulationConfig,
    cv_seed: u64,
    sampler_seed: u64,
    opts: &SolverOptions,
) -> Result<Outcome> {
    let p = cfg.p as f64;
    let synth_or = || synth.ok_or_else(|| CoxError::InvalidArgument("synthetic data missing".into()));
    let tau_cv = || CvConfig::new(cfg.folds, default_tau_grid(cfg.p), cv_seed);
    Ok(match method {
        Method::Mple => {
            let fit = mple(train, opts)?;
            let intervals = wald_intervals(&fit, 0.95).ok();
            let mut out = Outcome::point(fit, None);
            out.intervals = intervals;
            out
        }
        Method::CreP => {
            let prior = CatalyticPrior::with_fitted_hazard(synth_or()?.clone(), p)?;
            Outcome::point(cre(train, &prior, opts)?, Some(p))
        }
        Method::CreCv => {
            let prior = CatalyticPrior::with_fitted_hazard(synth_or()?.clone(), p)?;
            let cv = cv_cre(train, &prior, &tau_cv()?, opts)?;
            Outcome::point(cre(train, &prior.with_tau(cv.best_value)?, opts)?, Some(cv.best_value))
        }
        Method::WmeP => Outcome::point(wme(train, synth_or()?, p, opts)?, Some(p)),
        Method::WmeCv => {
            let cv = cv_wme(train, synth_or()?, &tau_cv()?, opts)?;
            Outcome::point(wme(train, synth_or()?, cv.best_value, opts)?, Some(cv.best_value))
        }
        Method::RidgeCv | Method::LassoCv => {
            let ridge = method == Method::RidgeCv;
            let cv = cv_penalized(train, ridge, cfg.folds, None, cv_seed, opts)?;
            let penalty = if ridge {
                Penalty::Ridge(cv.best_value)
            } else {
                Penalty::Lasso(cv.best_value)
            };
            Outcome::point(fit_penalized_standardized(train, penalty, opts)?.0, Some(cv.best_value))
        }
        Method::CpmP => {
            let prior = CatalyticPrior::with_fitted_hazard(synth_or()?.clone(), p)?;
            bayes_outcome(train, &BetaPrior::Catalytic(prior), cfg, sampler_seed, Some(p))?
        }
        Method::CpmCv => {
            let prior = CatalyticPrior::with_fitted_hazard(synth_or()?.clone(), p)?;
            let tau = cv_cre(train, &prior, &tau_cv()?, opts)?.best_value;
            bayes_outcome(train, &BetaPrior::Catalytic(prior.with_tau(tau)?), cfg, sampler_seed, Some(tau))?
        }
        Method::Apm => {
            let prior = CatalyticPrior::with_fitted_hazard(synth_or()?.clone(), p)?
                .into_adaptive(AdaptiveHyper::default(), opts)?;
            bayes_outcome(train, &BetaPrior::Adaptive(prior), cfg, sampler_seed, None)?
        }
        Method::GpmCv => {
            // Gaussian prior on the standardized scale, variance 1/(2 lambda_cv).
            let lambda = cv_penalized(train, true, cfg.folds, None, cv_seed, opts)?.best_value;
            let (std_train, transform) = train.standardized();
            let prior = BetaPrior::Gaussian {
                variance: 1.0 / (2.0 * lambda),
            };
            let mut out = bayes_outcome(&std_train, &prior, cfg, sampler_seed, Some(lambda))?;
            out.beta = transform.to_original_scale(&out.beta);
            if let Some(iv) = out.intervals.as_mut() {
                for (int, s) in iv.iter_mut().zip(&transform.scale) {
                    int.lower /= s;
                    int.upper /= s;
                }
            }
            out
        }
    })
}

type ReplicationOutput = (f64, Vec<ReplicationRecord>, Vec<(usize, Method, String)>);

fn run_replication(r: usize, scenario: &Scenario, cfg: &SimulationConfig, opts: &SolverOptions) -> Result<ReplicationOutput> {
    let mut train_rng = derive_rng(cfg.seed, &[tags::REPLICATION, r as u64, tags::TRAIN_DATA]);
    let mut test_rng = derive_rng(cfg.seed, &[tags::REPLICATION, r as u64, tags::TEST_DATA]);
    let train = scenario.simulate(cfg.n, &mut train_rng)?;
    let test = scenario.simulate(cfg.n_test, &mut test_rng)?;
    let synth = if cfg.methods.iter().any(Method::needs_synthetic) {
        let schema = CovariateGenSchema::from_dataset(&train, DEFAULT_BLEND);
        let seed = derive_seed(cfg.seed, &[tags::REPLICATION, r as u64, tags::SYNTH_COVARIATES]);
        Some(SyntheticDataset::generate(&train, cfg.m, &schema, seed)?)
    } else {
        None
    };
    let cv_seed = derive_seed(cfg.seed, &[tags::REPLICATION, r as u64, tags::CV_FOLDS]);
    let sampler_seed = derive_seed(cfg.seed, &[tags::REPLICATION, r as u64, tags::SAMPLER]);
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for &method in &cfg.methods {
        let outcome = fit_method(method, &train, synth.as_ref(), cfg, cv_seed, sampler_seed, opts).and_then(|o| {
            let dev = predictive_deviance(&scenario.beta0, &o.beta, &test)?;
            Ok((o, dev))
        });
        match outcome {
            Ok((o, deviance)) => records.push(ReplicationRecord {
                replication: r,
                method,
                squared_error: squared_distance(&o.beta, &scenario.beta0),
                coverage: o.intervals.as_ref().map(|iv| {
                    iv.iter().zip(&scenario.beta0).filter(|(i, b)| i.contains(**b)).count() as f64 / iv.len() as f64
                }),
                width: o
                    .intervals
                    .as_ref()
                    .map(|iv| iv.iter().map(Interval::width).sum::<f64>() / iv.len() as f64),
                beta_hat: o.beta,
                deviance,
                diverged: o.diverged,
                tuning: o.tuning,
            }),
            Err(e) => failures.push((r, method, e.to_string())),
        }
    }
    Ok((train.censoring_fraction(), records, failures))
}

/// Run `config.replications` independent replications, in parallel.
///
/// Each replication draws its training set, test set, synthetic data and
/// fold assignment from streams derived from `(seed, replication)`, so the
/// report does not depend on the thread count.
pub fn run_study(config: &SimulationConfig, opts: &SolverOptions) -> Result<SimulationReport> {
    config.validate()?;
    let scenario = Scenario::new(
        config.p,
        config.censor_rate,
        &mut derive_rng(config.seed, &[tags::XI_CALIBRATION]),
    )?;
    let outputs: Vec<Result<ReplicationOutput>> = (0..config.replications)
        .into_par_iter()
        .map(|r| run_replication(r, &scenario, config, opts))
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut censoring = Vec::new();
    for (r, out) in outputs.into_iter().enumerate() {
        match out {
            Ok((c, rec, fail)) => {
                censoring.push(c);
                records.extend(rec);
                failures.extend(fail);
            }
            Err(e) => {
                for &m in &config.methods {
                    failures.push((r, m, e.to_string()));
                }
            }
        }
    }
    let summaries = config
        .methods
        .iter()
        .map(|&method| {
            let mine: Vec<&ReplicationRecord> = records.iter().filter(|r| r.method == method).collect();
            let se: Vec<f64> = mine.iter().map(|r| r.squared_error).collect();
            let dev: Vec<f64> = mine.iter().map(|r| r.deviance).collect();
            let cov: Vec<f64> = mine.iter().filter_map(|r| r.coverage).collect();
            let wid: Vec<f64> = mine.iter().filter_map(|r| r.width).collect();
            MethodSummary {
                method,
                label: method.label().to_string(),
                completed: mine.len(),
                failures: failures.iter().filter(|f| f.1 == method).count(),
                diverged: mine.iter().filter(|r| r.diverged).count(),
                squared_error: MeanSe::of(&se),
                deviance: MeanSe::of(&dev),
                coverage: (!cov.is_empty()).then(|| MeanSe::of(&cov)),
                width: (!wid.is_empty()).then(|| MeanSe::of(&wid)),
            }
        })
        .collect();
    Ok(SimulationReport {
        config: config.clone(),
        xi: scenario.xi,
        beta0: scenario.beta0.clone(),
        realized_censoring: if censoring.is_empty() { f64::NAN } else { crate::util::mean(&censoring) },
        summaries,
        records,
        failures,
    })
}
