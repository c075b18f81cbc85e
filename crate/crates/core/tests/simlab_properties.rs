use catalytic_cox::optim::SolverOptions;
use catalytic_cox::simlab::{run_study, Method, SimulationConfig};
use catalytic_cox::util::squared_distance;

fn small(seed: u64) -> SimulationConfig {
    let mut cfg = SimulationConfig::new(8, 0.3, 6, seed);
    cfg.methods = vec![Method::Mple, Method::WmeP, Method::RidgeCv];
    cfg.folds = 5;
    cfg
}

#[test]
fn same_seed_same_report() {
    let opts = SolverOptions::default();
    let a = run_study(&small(5), &opts).unwrap();
    let b = run_study(&small(5), &opts).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn squared_errors_recompute() {
    let report = run_study(&small(6), &SolverOptions::default()).unwrap();
    for r in &report.records {
        assert!((r.squared_error - squared_distance(&r.beta_hat, &report.beta0)).abs() < 1e-12);
    }
    for s in &report.summaries {
        let mine: Vec<f64> = report.records.iter().filter(|r| r.method == s.method).map(|r| r.squared_error).collect();
        let mean = mine.iter().sum::<f64>() / mine.len() as f64;
        assert!((s.squared_error.mean - mean).abs() < 1e-12);
    }
}

#[test]
fn realized_censoring_hits_target() {
    for target in [0.1, 0.4] {
        let mut cfg = SimulationConfig::new(10, target, 60, 11);
        cfg.methods = vec![Method::Mple];
        let report = run_study(&cfg, &SolverOptions::default()).unwrap();
        assert!(
            (report.realized_censoring - target).abs() < 0.02,
            "target {target}, realized {}",
            report.realized_censoring
        );
    }
}
