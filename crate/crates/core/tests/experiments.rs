use cornergrowth::config::{run_experiment, ExperimentSpec, EXPERIMENTS};
use cornergrowth::experiments::{read_report_csv, variance_identity_check, BoundaryChoice, ExperimentConfig};
use cornergrowth::verify::report_bytes;

/// A configuration small enough to run in well under a second.
fn small(name: &str) -> ExperimentSpec {
    let cfg = ExperimentConfig::new(name, 0.4, vec![], 200, 11);
    let cfg = match name {
        "mean-formula" | "exit-tail" | "zstar-law" => ExperimentConfig { t_grid: vec![200.0], ..cfg },
        "variance-scaling" => ExperimentConfig { t_grid: vec![50.0, 100.0, 200.0], ..cfg },
        "rarefaction" => ExperimentConfig { t_grid: vec![50.0, 100.0, 200.0], ..cfg }.with_boundary(BoundaryChoice::ZeroBoth),
        "transversal" => ExperimentConfig { t_grid: vec![200.0], ..cfg }.with_boundary(BoundaryChoice::ZeroBoth),
        "variance-identity" | "variance-comparison" | "zeroed-bounds" => cfg.with_dims(6, 4),
        "burke" => cfg.with_dims(8, 8),
        _ => ExperimentConfig { samples: 40, ..cfg },
    };
    let mut spec = ExperimentSpec::new(cfg);
    spec.params.bridge.pooled_interarrivals = 200;
    spec
}

#[test]
fn every_experiment_runs_and_reports_consistently() {
    for name in EXPERIMENTS {
        let spec = small(name);
        let rep = run_experiment(&spec).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(rep.experiment, *name);
        assert!(!rep.checks.is_empty(), "{name} has no checks");
        let bytes = report_bytes(&rep).unwrap();
        assert_eq!(bytes, report_bytes(&run_experiment(&spec).unwrap()).unwrap(), "{name} is not reproducible");
        let stored = read_report_csv(bytes.as_slice()).unwrap();
        assert!(stored.consistent(), "{name}: stored verdict disagrees with its checks");
    }
}

#[test]
fn zeroed_bounds_pass_at_small_sizes() {
    let rep = run_experiment(&small("zeroed-bounds")).unwrap();
    assert!(rep.passed(), "{}", rep.to_text());
}

#[test]
fn mismatched_boundaries_are_rejected() {
    let spec = ExperimentSpec::new(
        ExperimentConfig::new("mean-formula", 0.5, vec![100.0], 10, 0).with_boundary(BoundaryChoice::ZeroBoth),
    );
    assert!(run_experiment(&spec).is_err());
    let spec = ExperimentSpec::new(ExperimentConfig::new("rarefaction", 0.5, vec![100.0, 200.0, 400.0], 10, 0));
    assert!(run_experiment(&spec).is_err());
}

/// On a single cell `G = max(A, B) + C` with `A ~ Exp(1 - rho)`,
/// `B ~ Exp(rho)`, `C ~ Exp(1)`, so `Var G = (1 - 2ab) / (ab)^2 - 2` with
/// `a = 1 - rho`, `b = rho`, and `E[A; A > B] = 1/a - a`.
#[test]
fn single_cell_variance_identity() {
    let rho: f64 = 0.35;
    let (a, b) = (1.0 - rho, rho);
    let var = (1.0 - 2.0 * a * b) / (a * b).powi(2) - 2.0;
    let line1 = 1.0 / (b * b) - 1.0 / (a * a) + 2.0 / a * (1.0 / a - a);
    assert!((var - line1).abs() < 1e-12);

    let cfg = ExperimentConfig::new("variance-identity", rho, vec![], 1_000_000, 5).with_dims(1, 1);
    let rep = variance_identity_check(&cfg).unwrap();
    assert!(rep.passed(), "{}", rep.to_text());
    let row = rep.rows.iter().find(|r| r.series == "var_G").unwrap();
    assert!((row.y - var).abs() <= 3.0 * row.y_err, "Var G = {} +- {}, closed form {var}", row.y, row.y_err);
    let eu = rep.info_value("mean_U_exit_south").unwrap();
    assert!((eu - (1.0 / a - a)).abs() < 0.01, "E[A; A > B] = {eu}");
}
