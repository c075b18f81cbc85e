//! Acceptance gate: one PASS/FAIL/SKIP line per criterion.
//!
//! Runs as a plain binary (`harness = false`). By default the process exits
//! 0 whatever the verdicts so the rest of the workspace suite can run; set
//! `CATCOX_ACCEPTANCE_STRICT=1` to exit nonzero on any FAIL. The data-backed
//! criterion reads the PBC csv from `CATCOX_PBC_CSV` and is skipped when unset.

mod common;

use std::time::Instant;

use catalytic_cox::bayes::{
    build_partition, grouped_log_likelihood, posterior_summary, sample_posterior, sample_tau_conditional,
    tau_conditional_parameters, BetaPrior, GammaProcessConfig, SamplerConfig, DEFAULT_C0, DEFAULT_INTERVALS,
};
use catalytic_cox::estimators::{cre, ridge, wme, CreObjective, MergedWeightedData};
use catalytic_cox::io::{load_dataset, DataSchema};
use catalytic_cox::optim::{ConcaveObjective, SolverOptions};
use catalytic_cox::rng::rng_from_seed;
use catalytic_cox::simlab::{consistency_demo, run_study, Method, SimulationConfig, SimulationReport};
use catalytic_cox::survival::{mple, pl_derivatives, SurvivalDataset};
use catalytic_cox::synthesis::{
    log_catalytic_prior, log_catalytic_prior_derivatives, AdaptiveHyper, CatalyticPrior, CovariateGenSchema,
    SyntheticDataset, DEFAULT_BLEND,
};
use catalytic_cox::tuning::{cvpl, CvConfig};
use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Gamma};

use common::{fd_gradient, fd_jacobian, max_rel_err, naive_log_pl, naive_log_pl_weighted, random_beta, random_dataset, random_synthetic, rng};

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

const STUDY_SEED: u64 = 2024;

#[derive(Clone, Copy, PartialEq)]
enum Verdict {
    Pass,
    Fail,
    Skip,
}

struct Gate {
    rows: Vec<(usize, Verdict)>,
}

impl Gate {
    fn run(&mut self, id: usize, name: &str, f: impl FnOnce() -> Option<Outcome>) {
        let start = Instant::now();
        let (verdict, detail) = match f() {
            None => (Verdict::Skip, "CATCOX_PBC_CSV not set".to_string()),
            Some(Ok((true, d))) => (Verdict::Pass, d),
            Some(Ok((false, d))) => (Verdict::Fail, d),
            Some(Err(e)) => (Verdict::Fail, format!("error: {e}")),
        };
        let tag = match verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
        };
        println!("{tag} [{id:02}] {name} ({:.1}s): {detail}", start.elapsed().as_secs_f64());
        self.rows.push((id, verdict));
    }
}

fn within(v: f64, target: f64, tol: f64) -> bool {
    (v - target).abs() <= tol
}

fn study(p: usize, censor: f64, methods: &[Method]) -> Result<SimulationReport, catalytic_cox::error::CoxError> {
    let mut cfg = SimulationConfig::new(p, censor, 100, STUDY_SEED);
    cfg.methods = methods.to_vec();
    run_study(&cfg, &SolverOptions::default())
}

fn mean_sq(report: &SimulationReport, m: Method) -> f64 {
    report
        .summaries
        .iter()
        .find(|s| s.method == m)
        .map_or(f64::NAN, |s| s.squared_error.mean)
}

/// Compare method means against `(method, target, tolerance)` triples.
fn judge(report: &SimulationReport, targets: &[(Method, f64, f64)]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for &(m, target, tol) in targets {
        let v = mean_sq(report, m);
        let hit = within(v, target, tol);
        ok &= hit;
        parts.push(format!(
            "{} {:.3} (target {:.2}+-{:.2}{})",
            m.label(),
            v,
            target,
            tol,
            if hit { "" } else { ", miss" }
        ));
    }
    (ok, parts.join("; "))
}

fn criterion_1() -> Outcome {
    let report = study(20, 0.2, &[Method::Mple, Method::CreP, Method::WmeCv, Method::RidgeCv, Method::LassoCv])?;
    Ok(judge(
        &report,
        &[
            (Method::Mple, 0.95, 0.60),
            (Method::CreP, 0.86, 0.20),
            (Method::WmeCv, 0.51, 0.20),
            (Method::RidgeCv, 0.58, 0.30),
            (Method::LassoCv, 0.75, 0.40),
        ],
    ))
}

fn criterion_2() -> Outcome {
    let report = study(60, 0.2, &[Method::Mple])?;
    let v = mean_sq(&report, Method::Mple);
    let diverged = report.summaries[0].diverged;
    Ok((v > 15.0, format!("MPLE squared error {v:.2} (need > 15; {diverged} divergent fits)")))
}

fn criterion_3() -> Outcome {
    let low = study(20, 0.1, &[Method::Mple, Method::WmeCv])?;
    let high = study(20, 0.4, &[Method::Mple, Method::WmeCv])?;
    let (a, da) = judge(&low, &[(Method::Mple, 0.84, 0.50), (Method::WmeCv, 0.48, 0.20)]);
    let (b, db) = judge(&high, &[(Method::Mple, 1.56, 1.1), (Method::WmeCv, 0.69, 0.30)]);
    Ok((a && b, format!("r=0.1: {da} | r=0.4: {db}")))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn criterion_4() -> Outcome {
    let opts = SolverOptions::default();
    let mut worst = [0.0f64; 4];
    for seed in 0..20u64 {
        let data = random_dataset(60, 3, seed);
        let synth = random_synthetic(200, 3, 1000 + seed);
        let base = mple(&data, &opts)?;
        let synth_only = mple(&synth.as_survival()?, &opts)?;
        let prior = CatalyticPrior::new(synth.clone(), 1.0, 1.0)?.with_kappa(&opts)?;
        let argmax = prior.kappa_argmax().ok_or("kappa maximizer missing")?.to_vec();

        worst[0] = worst[0].max(max_abs_diff(&wme(&data, &synth, 1e-10, &opts)?.beta, &base.beta));
        worst[1] = worst[1].max(max_abs_diff(&wme(&data, &synth, 1e10, &opts)?.beta, &synth_only.beta));
        worst[2] = worst[2].max(max_abs_diff(&cre(&data, &prior.with_tau(1e-10)?, &opts)?.beta, &base.beta));
        worst[3] = worst[3].max(max_abs_diff(&cre(&data, &prior.with_tau(1e10)?, &opts)?.beta, &argmax));
    }
    let ok = worst.iter().all(|&w| w < 1e-4);
    Ok((
        ok,
        format!(
            "max |diff|: WME(0)={:.1e} WME(inf)={:.1e} CRE(0)={:.1e} CRE(inf)={:.1e} (tol 1e-4, 20 seeds)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    ))
}

/// Value, gradient and Hessian (not negated) of one objective.
type Analytic = (f64, Vec<f64>, DMatrix<f64>);

/// FD check of gradient and Hessian; returns the worst relative errors.
fn fd_check(value: &dyn Fn(&[f64]) -> f64, analytic: &dyn Fn(&[f64]) -> Analytic, beta: &[f64]) -> (f64, f64) {
    let (_, g, h) = analytic(beta);
    let g_fd = fd_gradient(value, beta, 1e-5);
    let grad_of = |b: &[f64]| analytic(b).1;
    let h_fd = fd_jacobian(&grad_of, beta, 1e-5);
    let h_flat: Vec<f64> = (0..beta.len()).flat_map(|a| (0..beta.len()).map(move |b| (a, b))).map(|(a, b)| h[(a, b)]).collect();
    let h_fd_flat: Vec<f64> = h_fd.iter().flatten().copied().collect();
    (max_rel_err(&g, &g_fd), max_rel_err(&h_flat, &h_fd_flat))
}

fn to_analytic(v: f64, g: DVector<f64>, neg_h: DMatrix<f64>) -> Analytic {
    (v, g.iter().copied().collect(), -neg_h)
}

struct Instance {
    data: SurvivalDataset,
    prior: CatalyticPrior,
    synth: SyntheticDataset,
    beta: Vec<f64>,
    tau: f64,
}

fn instance(k: u64) -> Instance {
    let mut r = rng(500 + k);
    let p = 1 + (k as usize % 5);
    let n = 15 + (k as usize * 7) % 50;
    let data = random_dataset(n, p, k);
    let synth = random_synthetic(40 + (k as usize % 3) * 30, p, 9000 + k);
    let tau = [0.5, 2.0, p as f64, 10.0][k as usize % 4];
    let h0 = [0.5, 1.0, 2.0][k as usize % 3];
    let prior = CatalyticPrior::new(synth.clone(), tau, h0).unwrap();
    let beta = random_beta(p, 0.7, &mut r);
    Instance { data, prior, synth, beta, tau }
}

fn criterion_5() -> Outcome {
    let mut worst = [(0.0f64, 0.0f64); 4];
    let mut value_err = 0.0f64;
    for k in 0..100u64 {
        let Instance { data, prior, synth, beta, tau } = instance(k);

        let pl_val = |b: &[f64]| naive_log_pl(b, &data);
        let pl_an = |b: &[f64]| {
            let (g, h) = pl_derivatives(b, &data).unwrap();
            to_analytic(0.0, g, h)
        };
        let e = fd_check(&pl_val, &pl_an, &beta);
        worst[0] = (worst[0].0.max(e.0), worst[0].1.max(e.1));

        let pr_val = |b: &[f64]| log_catalytic_prior(b, &prior).unwrap();
        let pr_an = |b: &[f64]| {
            let (g, h) = log_catalytic_prior_derivatives(b, &prior).unwrap();
            to_analytic(0.0, g, h)
        };
        let e = fd_check(&pr_val, &pr_an, &beta);
        worst[1] = (worst[1].0.max(e.0), worst[1].1.max(e.1));

        let obj = CreObjective::new(&data, &prior)?;
        let cre_val = |b: &[f64]| naive_log_pl(b, &data) + log_catalytic_prior(b, &prior).unwrap();
        let cre_an = |b: &[f64]| {
            let (v, g, h) = obj.derivatives(b).unwrap();
            to_analytic(v, g, h)
        };
        let e = fd_check(&cre_val, &cre_an, &beta);
        worst[2] = (worst[2].0.max(e.0), worst[2].1.max(e.1));
        value_err = value_err.max((cre_an(&beta).0 - cre_val(&beta)).abs() / cre_val(&beta).abs().max(1.0));

        let merged = MergedWeightedData::new(&data, &synth, tau)?;
        let pl = merged.partial_likelihood();
        let wme_val = |b: &[f64]| {
            naive_log_pl_weighted(b, merged.covariates(), merged.p(), merged.times(), merged.status(), merged.weights())
        };
        let wme_an = |b: &[f64]| {
            let d = pl.derivatives(b).unwrap();
            to_analytic(d.value, d.gradient, d.neg_hessian)
        };
        let e = fd_check(&wme_val, &wme_an, &beta);
        worst[3] = (worst[3].0.max(e.0), worst[3].1.max(e.1));
        value_err = value_err.max((wme_an(&beta).0 - wme_val(&beta)).abs() / wme_val(&beta).abs().max(1.0));
    }
    let ok = worst.iter().all(|(g, h)| *g < 1e-6 && *h < 1e-6) && value_err < 1e-10;
    Ok((
        ok,
        format!(
            "grad/hess rel err: PL {:.1e}/{:.1e}, prior {:.1e}/{:.1e}, CRE {:.1e}/{:.1e}, WME {:.1e}/{:.1e}; value vs direct sum {:.1e}",
            worst[0].0, worst[0].1, worst[1].0, worst[1].1, worst[2].0, worst[2].1, worst[3].0, worst[3].1, value_err
        ),
    ))
}

fn criterion_6() -> Outcome {
    let mut worst = [f64::INFINITY; 4];
    for k in 0..100u64 {
        let Instance { data, prior, synth, tau, .. } = instance(k);
        let mut r = rng(7000 + k);
        let p = data.p();
        let obj = CreObjective::new(&data, &prior)?;
        let merged = MergedWeightedData::new(&data, &synth, tau)?;
        for _ in 0..5 {
            let beta = random_beta(p, 2.0, &mut r);
            let v = DVector::from_vec(random_beta(p, 1.0, &mut r));
            let quad = |m: &DMatrix<f64>| (v.transpose() * m * &v)[(0, 0)];
            worst[0] = worst[0].min(quad(&pl_derivatives(&beta, &data)?.1));
            worst[1] = worst[1].min(quad(&log_catalytic_prior_derivatives(&beta, &prior)?.1));
            worst[2] = worst[2].min(quad(&obj.derivatives(&beta)?.2));
            worst[3] = worst[3].min(quad(&merged.partial_likelihood().derivatives(&beta)?.neg_hessian));
        }
    }
    let ok = worst.iter().all(|&w| w >= -1e-8);
    Ok((
        ok,
        format!(
            "min v'(-H)v over 500 points: PL {:.2e}, prior {:.2e}, CRE {:.2e}, WME {:.2e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    ))
}

/// Trapezoid integral of `exp(logf)` on a uniform grid, relative to `shift`.
fn trapezoid(xs: &[f64], logf: &[f64], shift: f64, weight: impl Fn(f64) -> f64) -> f64 {
    let dx = xs[1] - xs[0];
    let vals: Vec<f64> = xs.iter().zip(logf).map(|(x, l)| weight(*x) * (l - shift).exp()).collect();
    dx * (vals.iter().sum::<f64>() - 0.5 * (vals[0] + vals[vals.len() - 1]))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn criterion_7() -> Outcome {
    let opts = SolverOptions::default();
    let mut worst_mass = 0.0f64;
    let mut worst_moment = 0.0f64;
    for k in 0..10u64 {
        let synth = random_synthetic(30 + 10 * k as usize, 1, 300 + k);
        let prior = CatalyticPrior::new(synth, 1.0, 1.0)?;
        let xs = linspace(-400.0, 400.0, 400_001);
        let logf: Vec<f64> = xs.iter().map(|b| log_catalytic_prior(&[*b], &prior).unwrap()).collect();
        let shift = logf.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let total = trapezoid(&xs, &logf, shift, |_| 1.0);
        let inside = trapezoid(&xs, &logf, shift, |b| if b.abs() <= 20.0 { 1.0 } else { 0.0 });
        worst_mass = worst_mass.max((total - inside).abs() / total);

        // Adaptive prior: beta marginal is proportional to
        // (kappa + 1/gamma - lbar(beta))^-(p + alpha).
        let hyper = AdaptiveHyper::default();
        let adaptive = prior.clone().into_adaptive(hyper, &opts)?;
        let kappa = adaptive.kappa().ok_or("kappa missing")?;
        let moment = |w: f64| {
            let xs = linspace(-w, w, 200_001);
            let logm: Vec<f64> = xs
                .iter()
                .map(|b| -(1.0 + hyper.alpha) * (kappa + 1.0 / hyper.gamma - adaptive.mean_synthetic_loglik(&[*b])).ln())
                .collect();
            let shift = logm.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            trapezoid(&xs, &logm, shift, |b| b.abs().powf(hyper.alpha / 2.0)) / trapezoid(&xs, &logm, shift, |_| 1.0)
        };
        let (m1, m2) = (moment(20.0), moment(40.0));
        worst_moment = worst_moment.max((m2 - m1).abs() / m1.abs());
    }
    let ok = worst_mass < 1e-6 && worst_moment < 1e-3;
    Ok((
        ok,
        format!("max mass outside |b|<=20: {worst_mass:.1e} (tol 1e-6); moment change under window doubling {worst_moment:.1e} (tol 1e-3)"),
    ))
}

fn criterion_8() -> Outcome {
    let opts = SolverOptions::default();
    let synth = random_synthetic(200, 3, 88);
    let prior = CatalyticPrior::new(synth, 3.0, 1.0)?.into_adaptive(AdaptiveHyper::default(), &opts)?;
    let mut r = rng(1234);
    let mut worst = 0.0f64;
    for k in 0..5u64 {
        let beta = random_beta(3, 0.8, &mut r);
        let (shape, rate) = tau_conditional_parameters(&beta, &prior)?;
        let law = Gamma::new(shape, rate)?;
        let mut draw_rng = rng_from_seed(40 + k);
        let mut draws: Vec<f64> = (0..100_000)
            .map(|_| sample_tau_conditional(&beta, &prior, &mut draw_rng))
            .collect::<Result<_, _>>()?;
        draws.sort_by(f64::total_cmp);
        let n = draws.len() as f64;
        let d = draws.iter().enumerate().fold(0.0f64, |m, (i, x)| {
            let c = law.cdf(*x);
            m.max((c - i as f64 / n).abs()).max(((i + 1) as f64 / n - c).abs())
        });
        worst = worst.max(d);
    }
    Ok((worst < 0.01, format!("max KS statistic over 5 betas, 1e5 draws each: {worst:.4} (tol 0.01)")))
}

fn criterion_9() -> Outcome {
    let table = consistency_demo(&[5, 20], &[100, 400, 1600], 400, 50, STUDY_SEED)?;
    let decreasing = |rows: &Vec<Vec<f64>>| rows.iter().all(|r| r.windows(2).all(|w| w[1] < w[0]));
    let fmt = |rows: &Vec<Vec<f64>>| {
        rows.iter()
            .map(|r| r.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(" > "))
            .collect::<Vec<_>>()
            .join(", ")
    };
    Ok((
        decreasing(&table.cre) && decreasing(&table.wme),
        format!("CRE p=5,20: {}; WME p=5,20: {}", fmt(&table.cre), fmt(&table.wme)),
    ))
}

fn criterion_10() -> Outcome {
    let data = random_dataset(10, 2, 31);
    let opts = SolverOptions::default();
    let grid = vec![0.1, 1.0, 10.0];
    let config = CvConfig::new(10, grid.clone(), 5)?;
    let fit = |train: &SurvivalDataset, l: f64| ridge(train, l, &opts);
    let cv = cvpl(&data, fit, &config)?;

    let mut worst = 0.0f64;
    for (gi, &l) in grid.iter().enumerate() {
        let mut brute = 0.0;
        for i in 0..data.n() {
            let keep: Vec<usize> = (0..data.n()).filter(|&k| k != i).collect();
            let train = data.subset(&keep)?;
            let b = ridge(&train, l, &opts)?.beta;
            brute += naive_log_pl(&b, &data) - naive_log_pl(&b, &train);
        }
        worst = worst.max((brute - cv.scores[gi]).abs());
    }
    let again = cvpl(&data, fit, &config)?;
    let same = again.scores == cv.scores && again.fold_of == cv.fold_of && again.best_value == cv.best_value;
    Ok((
        worst < 1e-10 && same,
        format!("LOO brute-force max |diff| {worst:.1e} (tol 1e-10); repeat run identical: {same}"),
    ))
}

fn flat_prior_check() -> Result<(bool, String), Box<dyn std::error::Error>> {
    let data = random_dataset(200, 2, 77);
    let grid = build_partition(&data, DEFAULT_INTERVALS)?;
    let gp = GammaProcessConfig::from_data(&data, DEFAULT_C0)?;
    let mut cfg = SamplerConfig::new(3);
    cfg.iterations = 6000;
    cfg.burnin = 2000;
    let samples = sample_posterior(&data, &grid, &gp, &BetaPrior::Flat, &cfg)?;
    let post = posterior_summary(&samples, 0.95)?;
    let fit = mple(&data, &SolverOptions::default())?;
    let z: Vec<f64> = post.iter().zip(&fit.beta).map(|(s, b)| (s.mean - b).abs() / s.sd).collect();
    let ok = z.iter().all(|&v| v < 3.0);
    Ok((ok, format!("flat |mean-MPLE|/sd = {:.2?}", z)))
}

fn domination_check() -> Result<(bool, String), Box<dyn std::error::Error>> {
    let opts = SolverOptions::default();
    let data = random_dataset(200, 2, 78);
    let synth = random_synthetic(500, 2, 79);
    let prior = CatalyticPrior::new(synth, 1e8, 1.0)?.with_kappa(&opts)?;
    let target = prior.kappa_argmax().ok_or("kappa maximizer missing")?.to_vec();
    let grid = build_partition(&data, DEFAULT_INTERVALS)?;
    let gp = GammaProcessConfig::from_data(&data, DEFAULT_C0)?;
    let mut cfg = SamplerConfig::new(4);
    cfg.iterations = 3000;
    cfg.burnin = 1000;
    let samples = sample_posterior(&data, &grid, &gp, &BetaPrior::Catalytic(prior), &cfg)?;
    let post = posterior_summary(&samples, 0.95)?;
    let means: Vec<f64> = post.iter().map(|s| s.mean).collect();
    let d = max_abs_diff(&means, &target);
    Ok((d < 0.05, format!("tau=1e8 |mean - synthetic MLE| {d:.1e}")))
}

/// Grouped likelihood for a single interval `(0, s1]`: every subject is at
/// risk over the whole interval, events fail in it, and the rest survive it.
fn one_interval_loglik(beta: f64, h: f64, data: &SurvivalDataset) -> f64 {
    (0..data.n())
        .map(|i| {
            let r = h * (beta * data.row(i)[0]).exp();
            if data.status()[i] {
                (-(-r).exp_m1()).ln()
            } else {
                -r
            }
        })
        .sum()
}

fn stationary_check() -> Result<(bool, String), Box<dyn std::error::Error>> {
    let data = random_dataset(50, 1, 80);
    let grid = build_partition(&data, 1)?;
    let gp = GammaProcessConfig::from_data(&data, DEFAULT_C0)?;
    let shape = gp.shapes(&grid)[0];
    let c0 = gp.c0;
    let oracle_gap = (one_interval_loglik(0.3, 0.7, &data) - grouped_log_likelihood(&[0.3], &[0.7], &data, &grid)?).abs();

    // Joint density of (beta, u = log h) on a grid, flat prior on beta.
    let bs = linspace(-4.0, 4.0, 801);
    let us = linspace(-12.0, 6.0, 1801);
    let mut logj = vec![0.0; bs.len() * us.len()];
    for (a, &b) in bs.iter().enumerate() {
        for (c, &u) in us.iter().enumerate() {
            let h = u.exp();
            logj[a * us.len() + c] = one_interval_loglik(b, h, &data) + (shape - 1.0) * u - c0 * h + u;
        }
    }
    let top = logj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let marginal: Vec<f64> = (0..bs.len())
        .map(|a| logj[a * us.len()..(a + 1) * us.len()].iter().map(|l| (l - top).exp()).sum())
        .collect();
    let total: f64 = marginal.iter().sum();
    let cdf: Vec<f64> = marginal
        .iter()
        .scan(0.0, |acc, m| {
            *acc += m / total;
            Some(*acc)
        })
        .collect();
    let quantile = |q: f64| bs[cdf.iter().position(|&c| c >= q).unwrap_or(bs.len() - 1)];
    let edges = linspace(quantile(0.002), quantile(0.998), 21);
    let bin_mass = |lo: f64, hi: f64| {
        bs.iter()
            .zip(&marginal)
            .filter(|(b, _)| **b >= lo && **b < hi)
            .map(|(_, m)| m / total)
            .sum::<f64>()
    };

    let mut cfg = SamplerConfig::new(6);
    cfg.iterations = 105_000;
    cfg.burnin = 5_000;
    cfg.chains = 2;
    let samples = sample_posterior(&data, &grid, &gp, &BetaPrior::Flat, &cfg)?;
    let draws = samples.beta_column(0);
    let mut bounds = vec![f64::NEG_INFINITY];
    bounds.extend_from_slice(&edges);
    bounds.push(f64::INFINITY);
    let tv = 0.5
        * bounds
            .windows(2)
            .map(|w| {
                let emp = draws.iter().filter(|d| **d >= w[0] && **d < w[1]).count() as f64 / draws.len() as f64;
                (emp - bin_mass(w[0], w[1])).abs()
            })
            .sum::<f64>();
    Ok((
        tv < 0.05 && oracle_gap < 1e-9,
        format!("1-D beta marginal TV {tv:.4} (tol 0.05)"),
    ))
}

fn criterion_11() -> Outcome {
    let (a, da) = flat_prior_check()?;
    let (b, db) = domination_check()?;
    let (c, dc) = stationary_check()?;
    Ok((a && b && c, format!("{da}; {db}; {dc}")))
}

fn criterion_12() -> Option<Outcome> {
    let path = std::env::var("CATCOX_PBC_CSV").ok()?;
    Some((|| -> Outcome {
        let schema = DataSchema::from_json_file(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/pbc_schema.json"))?;
        let data = load_dataset(path, Some(&schema))?.dataset;
        let idx = |name: &str| data.names().iter().position(|n| n == name).ok_or(format!("no column {name}"));
        let (age, bili) = (idx("age")?, idx("bili")?);
        let fit = mple(&data, &SolverOptions::default())?;

        let gen = CovariateGenSchema::from_dataset(&data, DEFAULT_BLEND);
        let synth = SyntheticDataset::generate(&data, 1000, &gen, STUDY_SEED)?;
        let prior = CatalyticPrior::with_fitted_hazard(synth, data.p() as f64)?;
        let grid = build_partition(&data, DEFAULT_INTERVALS)?;
        let gp = GammaProcessConfig::from_data(&data, DEFAULT_C0)?;
        let samples = sample_posterior(&data, &grid, &gp, &BetaPrior::Catalytic(prior), &SamplerConfig::new(STUDY_SEED))?;
        let post = posterior_summary(&samples, 0.95)?[bili];

        let shape_ok = data.n() == 276 && data.p() == 18;
        let mple_ok = within(fit.beta[age], 0.309, 0.03) && within(fit.beta[bili], 0.369, 0.04);
        let post_ok = within(post.mean, 0.433, 0.08) && post.lower > 0.0;
        Ok((
            shape_ok && mple_ok && post_ok,
            format!(
                "n={} p={}; MPLE age {:.3} bili {:.3}; posterior bili {:.3} [{:.2}, {:.2}]",
                data.n(),
                data.p(),
                fit.beta[age],
                fit.beta[bili],
                post.mean,
                post.lower,
                post.upper
            ),
        ))
    })())
}

fn main() {
    let mut gate = Gate { rows: Vec::new() };
    gate.run(1, "point estimators, p=20 r=0.2", || Some(criterion_1()));
    gate.run(2, "MPLE instability, p=60", || Some(criterion_2()));
    gate.run(3, "censoring sweep r=0.1, 0.4", || Some(criterion_3()));
    gate.run(4, "estimator limits in tau", || Some(criterion_4()));
    gate.run(5, "analytic derivatives vs finite differences", || Some(criterion_5()));
    gate.run(6, "concavity of the four objectives", || Some(criterion_6()));
    gate.run(7, "prior properness and adaptive moment", || Some(criterion_7()));
    gate.run(8, "tau conditional law", || Some(criterion_8()));
    gate.run(9, "consistency in n", || Some(criterion_9()));
    gate.run(10, "CVPL leave-one-out and determinism", || Some(criterion_10()));
    gate.run(11, "posterior sanity", || Some(criterion_11()));
    gate.run(12, "PBC reproduction", criterion_12);

    let count = |v: Verdict| gate.rows.iter().filter(|(_, r)| *r == v).count();
    let (pass, fail, skip) = (count(Verdict::Pass), count(Verdict::Fail), count(Verdict::Skip));
    println!("acceptance: {pass} passed, {fail} failed, {skip} skipped");
    let strict = std::env::var("CATCOX_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && fail > 0 {
        std::process::exit(1);
    }
}
