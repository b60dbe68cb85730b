//! Experiments under equilibrium boundary conditions.

use crate::error::{Error, Result};
use crate::interface::build_interface;
use crate::lpp::{backtrack_path, characteristic_point, compute_field, expected_passage, stream_passage, StreamSummary, TiePolicy};
use crate::stats::{
    binomial_interval, binomial_se, influence_se, jackknife_variance_se, ks_two_sample, log_log_fit, mean, moments,
    variance_influence,
};
use crate::weights::{equilibrium_sites, sample_equilibrium, BoundaryKind, Density};

use super::{par_samples, BoundaryChoice, Check, EstimatorReport, ExperimentConfig};

pub(super) fn require_equilibrium(cfg: &ExperimentConfig) -> Result<Density> {
    cfg.validate()?;
    if cfg.boundary != BoundaryChoice::Equilibrium {
        return Err(Error::NotEquilibrium);
    }
    Ok(BoundaryKind::equilibrium(cfg.rho)?.density().expect("equilibrium has a density"))
}

/// Corner value and exit point of one equilibrium sample, without storing the field.
pub(crate) fn stream_equilibrium(d: Density, m: usize, n: usize, seed: u64, tie: TiePolicy) -> StreamSummary {
    stream_passage(m, n, tie, equilibrium_sites(d, seed))
}

/// Monte Carlo mean of `G(t)` against `floor((1-rho)^2 t)/(1-rho) + floor(rho^2 t)/rho`.
pub fn mean_formula_check(cfg: &ExperimentConfig) -> Result<EstimatorReport> {
    let d = require_equilibrium(cfg)?;
    let mut rep = EstimatorReport::new("mean-formula", cfg.describe());
    for &t in &cfg.t_grid {
        let (m, n) = characteristic_point(cfg.rho, t)?;
        let g: Vec<f64> =
            par_samples(cfg.samples, |k| stream_equilibrium(d, m, n, cfg.sample_seed("mean", k), cfg.tie).g_mn);
        let mo = moments(&g)?;
        let expected = expected_passage(cfg.rho, t)?;
        rep.row("mean_G", t, mo.mean, mo.mean_se);
        rep.row("expected_G", t, expected, 0.0);
        let z = (mo.mean - expected) / mo.mean_se;
        rep.check(Check::within(format!("mean_z_t{t}"), z, -cfg.tolerance.se_multiplier, cfg.tolerance.se_multiplier));
    }
    Ok(rep)
}

/// Both lines of the variance identity
/// `Var G = n/rho^2 - m/(1-rho)^2 + 2/(1-rho) E U_{Z+}`
///       `= m/(1-rho)^2 - n/rho^2 + 2/rho E U_{-Z-}`
/// and their sum, each within the configured multiple of its standard error.
///
/// Standard errors come from per-sample influence values of
/// `variance - c * mean`, which accounts for the correlation between the two
/// estimates.
pub fn variance_identity_check(cfg: &ExperimentConfig) -> Result<EstimatorReport> {
    let d = require_equilibrium(cfg)?;
    let (m, n) = cfg.dims()?;
    let rho = cfg.rho;
    let samples = par_samples(cfg.samples, |k| {
        let s = stream_equilibrium(d, m, n, cfg.sample_seed("variance-identity", k), cfg.tie);
        let (up, un) = if s.exit > 0 { (s.u_exit, 0.0) } else { (0.0, s.u_exit) };
        (s.g_mn, up, un)
    });
    let g: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let up: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let un: Vec<f64> = samples.iter().map(|s| s.2).collect();
    let mo = moments(&g)?;
    let (eu_p, eu_n) = (mean(&up), mean(&un));
    let vinf = variance_influence(&g);
    let (mf, nf) = (m as f64, n as f64);
    let c1 = 2.0 / (1.0 - rho);
    let c2 = 2.0 / rho;
    let line1 = nf / (rho * rho) - mf / ((1.0 - rho) * (1.0 - rho)) + c1 * eu_p;
    let line2 = mf / ((1.0 - rho) * (1.0 - rho)) - nf / (rho * rho) + c2 * eu_n;
    let psi1: Vec<f64> = vinf.iter().zip(&up).map(|(v, u)| v - c1 * (u - eu_p)).collect();
    let psi2: Vec<f64> = vinf.iter().zip(&un).map(|(v, u)| v - c2 * (u - eu_n)).collect();
    let psi_sum: Vec<f64> =
        vinf.iter().zip(up.iter().zip(&un)).map(|(v, (a, b))| 2.0 * v - c1 * (a - eu_p) - c2 * (b - eu_n)).collect();
    let r1 = mo.var - line1;
    let r2 = mo.var - line2;
    let rs = 2.0 * mo.var - c1 * eu_p - c2 * eu_n;
    let (s1, s2, ss) = (influence_se(&psi1), influence_se(&psi2), influence_se(&psi_sum));
    let mut rep = EstimatorReport::new("variance-identity", cfg.describe());
    rep.row("var_G", 0.0, mo.var, mo.var_se);
    rep.row("line1", 1.0, line1, c1 * (crate::stats::variance(&up) / up.len() as f64).sqrt());
    rep.row("line2", 2.0, line2, c2 * (crate::stats::variance(&un) / un.len() as f64).sqrt());
    rep.info("var_se_moment", mo.var_se);
    rep.info("var_se_jackknife", jackknife_variance_se(&g));
    rep.info("mean_U_exit_south", eu_p);
    rep.info("mean_U_exit_west", eu_n);
    rep.info("residual_line1", r1);
    rep.info("residual_line2", r2);
    rep.info("residual_sum", rs);
    let k = cfg.tolerance.se_multiplier;
    rep.check(Check::within("line1_z", r1 / s1, -k, k));
    rep.check(Check::within("line2_z", r2 / s2, -k, k));
    rep.check(Check::within("sum_z", rs / ss, -k, k));
    Ok(rep)
}

/// Log-log slope of `Var G(t)` over the t-grid, against the window
/// `[0.55, 0.80]`, with the diffusive control `Var U_m` on the same samples.
pub fn variance_scaling(cfg: &ExperimentConfig) -> Result<EstimatorReport> {
    let d = require_equilibrium(cfg)?;
    if cfg.t_grid.len() < 3 {
        return Err(Error::TooFewSamples { got: cfg.t_grid.len(), need: 3 });
    }
    let mut rep = EstimatorReport::new("variance-scaling", cfg.describe());
    let (mut var, mut var_se, mut cvar, mut cvar_se) = (vec![], vec![], vec![], vec![]);
    for &t in &cfg.t_grid {
        let (m, n) = characteristic_point(cfg.rho, t)?;
        let pairs = par_samples(cfg.samples, |k| {
            let seed = cfg.sample_seed("variance-scaling", k);
            let s = stream_equilibrium(d, m, n, seed, cfg.tie);
            // Along the i-axis the last-passage value is the plain sum U_m.
            (s.g_mn, south_axis_sum(d, seed, m))
        });
        let g: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let u: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let mo = moments(&g)?;
        let mu = moments(&u)?;
        let scale = t.powf(2.0 / 3.0);
        rep.row("var_G", t, mo.var, mo.var_se);
        rep.row("var_G_over_t23", t, mo.var / scale, mo.var_se / scale);
        rep.row("var_U_control", t, mu.var, mu.var_se);
        var.push(mo.var);
        var_se.push(mo.var_se);
        cvar.push(mu.var);
        cvar_se.push(mu.var_se);
    }
    let fit = log_log_fit(&cfg.t_grid, &var, &var_se)?;
    let cfit = log_log_fit(&cfg.t_grid, &cvar, &cvar_se)?;
    let level = cfg.tolerance.confidence;
    let (lo, hi) = fit.slope_ci(level);
    let (clo, chi) = cfit.slope_ci(level);
    rep.info("slope", fit.slope);
    rep.info("slope_se", fit.slope_se);
    rep.info("slope_chi2", fit.chi2);
    rep.info("control_slope", cfit.slope);
    rep.info("control_slope_se", cfit.slope_se);
    rep.check(Check::at_most("slope_ci_lo", lo, 0.80));
    rep.check(Check::at_least("slope_ci_hi", hi, 0.55));
    rep.check(Check::at_most("control_slope_ci_lo", clo, 1.1));
    rep.check(Check::at_least("control_slope_ci_hi", chi, 0.9));
    // The control must be distinguishable from the sub-diffusive window.
    rep.check(Check::at_least("control_excluded_from_window", clo, 0.80));
    let k = var.len();
    let scaled: Vec<f64> = cfg.t_grid.iter().zip(&var).map(|(t, v)| v / t.powf(2.0 / 3.0)).collect();
    rep.check(Check::within("scaled_ratio_last_two", scaled[k - 1] / scaled[k - 2], 0.5, 2.0));
    Ok(rep)
}

/// `U_m`, the sum of the i-axis weights, recomputed from the site stream.
fn south_axis_sum(d: Density, seed: u64, m: usize) -> f64 {
    let site = equilibrium_sites(d, seed);
    (1..=m).map(|i| site(i, 0)).sum()
}

/// Tail frequencies `P{Z >= a t^(2/3)}` with their `a^3` weights, and the
/// small-window masses `P{1 <= Z <= delta t^(2/3)}`.
///
/// The weighted tails pass when they are consistent with a max/min ratio of
/// at most `max_ratio`: the largest lower confidence bound divided by the
/// smallest upper bound must not exceed it. A zero count contributes the
/// one-sided upper bound only.
pub fn exit_tail(cfg: &ExperimentConfig, a_grid: &[f64], deltas: &[f64], max_ratio: f64) -> Result<EstimatorReport> {
    let d = require_equilibrium(cfg)?;
    let t = cfg.single_t()?;
    let (m, n) = characteristic_point(cfg.rho, t)?;
    let z: Vec<i64> = par_samples(cfg.samples, |k| stream_equilibrium(d, m, n, cfg.sample_seed("exit-tail", k), cfg.tie).exit);
    let total = z.len();
    let scale = t.powf(2.0 / 3.0);
    let level = cfg.tolerance.confidence;
    let mut rep = EstimatorReport::new("exit-tail", cfg.describe());
    let (mut lows, mut highs, mut points) = (vec![], vec![], vec![]);
    for &a in a_grid {
        let threshold = a * scale;
        let count = z.iter().filter(|&&v| v as f64 >= threshold).count();
        let p = count as f64 / total as f64;
        let w = a.powi(3);
        let (lo, hi) = binomial_interval(count, total, level);
        rep.row("tail_prob", a, p, binomial_se(count, total));
        rep.row("tail_weighted", a, w * p, w * binomial_se(count, total));
        rep.info(format!("tail_count_a{a}"), count as f64);
        rep.info(format!("tail_weighted_upper_a{a}"), w * hi);
        if threshold > m as f64 {
            rep.info(format!("tail_structurally_zero_a{a}"), 1.0);
        }
        lows.push(w * lo);
        highs.push(w * hi);
        points.push(w * p);
    }
    let max_low = lows.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_high = highs.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_pt = points.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_pt = points.iter().cloned().fold(f64::INFINITY, f64::min);
    rep.info("weighted_ratio_point", if min_pt > 0.0 { max_pt / min_pt } else { f64::INFINITY });
    rep.check(Check::at_most("weighted_ratio_lower_bound", max_low / min_high, max_ratio));
    let mut masses = vec![];
    for &delta in deltas {
        let hi = delta * scale;
        let count = z.iter().filter(|&&v| v >= 1 && v as f64 <= hi).count();
        let p = count as f64 / total as f64;
        rep.row("small_window_mass", delta, p, binomial_se(count, total));
        masses.push(p);
    }
    let violations = masses.windows(2).filter(|w| w[0] > w[1]).count();
    rep.check(Check::zero("small_window_monotone_violations", violations));
    Ok(rep)
}

/// Two-sample KS of `Z` against `Z*` from independent runs, and of `Z^rho`
/// against `-Z^(1-rho)`.
pub fn zstar_distribution_check(cfg: &ExperimentConfig) -> Result<EstimatorReport> {
    let d = require_equilibrium(cfg)?;
    let t = cfg.single_t()?;
    let (m, n) = characteristic_point(cfg.rho, t)?;
    let z: Vec<f64> =
        par_samples(cfg.samples, |k| stream_equilibrium(d, m, n, cfg.sample_seed("zstar-z", k), cfg.tie).exit as f64);
    let pairs = par_samples(cfg.samples, |k| {
        let w = sample_equilibrium(cfg.rho, m, n, cfg.sample_seed("zstar-interface", k)).expect("valid dims");
        let f = compute_field(&w);
        let zs = build_interface(&f).z_star();
        (zs as f64, backtrack_path(&f, cfg.tie).exit as f64)
    });
    let zs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let differ = pairs.iter().filter(|p| p.0 != p.1).count();
    let dt = d.flipped();
    let (mt, nt) = characteristic_point(dt.get(), t)?;
    let zt: Vec<f64> = par_samples(cfg.samples, |k| {
        -(stream_equilibrium(dt, mt, nt, cfg.sample_seed("zstar-transposed", k), cfg.tie).exit as f64)
    });
    let ks1 = ks_two_sample(&z, &zs)?;
    let ks2 = ks_two_sample(&z, &zt)?;
    let mut rep = EstimatorReport::new("zstar-law", cfg.describe());
    let se = |v: &[f64]| (crate::stats::variance(v) / v.len() as f64).sqrt();
    rep.row("mean_Z", t, mean(&z), se(&z));
    rep.row("mean_Zstar", t, mean(&zs), se(&zs));
    rep.row("mean_minus_Z_transposed", t, mean(&zt), se(&zt));
    rep.info("ks_z_zstar_statistic", ks1.statistic);
    rep.info("ks_z_transposed_statistic", ks2.statistic);
    rep.info("same_instance_z_ne_zstar_fraction", differ as f64 / cfg.samples as f64);
    rep.check(Check::at_least("ks_z_zstar_p", ks1.p_value, cfg.tolerance.alpha));
    rep.check(Check::at_least("ks_z_transposed_p", ks2.p_value, cfg.tolerance.alpha));
    Ok(rep)
}

/// `Var G^lambda <= (rho/lambda)^2 Var G^rho + m (1/(1-lambda)^2 - rho^2/(lambda^2 (1-rho)^2))`
/// on coupled samples, allowing the configured multiple of the standard error
/// of the difference. Also counts coupled pairs with `Z^rho > Z^lambda`.
pub fn variance_comparison_check(cfg: &ExperimentConfig, lambda: f64) -> Result<EstimatorReport> {
    let d = require_equilibrium(cfg)?;
    let dl = Density::new(lambda)?;
    if lambda < cfg.rho {
        return Err(Error::Hypothesis(format!("lambda {lambda} below rho {}", cfg.rho)));
    }
    let (m, n) = cfg.dims()?;
    let rho = cfg.rho;
    let pairs = par_samples(cfg.samples, |k| {
        // Same seed at both densities realises the scaling coupling exactly.
        let seed = cfg.sample_seed("variance-comparison", k);
        let a = stream_equilibrium(d, m, n, seed, cfg.tie);
        let b = stream_equilibrium(dl, m, n, seed, cfg.tie);
        (a.g_mn, b.g_mn, a.exit > b.exit)
    });
    let gr: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let gl: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let order_violations = pairs.iter().filter(|p| p.2).count();
    let (mr, ml) = (moments(&gr)?, moments(&gl)?);
    let factor = (rho / lambda).powi(2);
    let extra = m as f64 * (1.0 / (1.0 - lambda).powi(2) - rho * rho / (lambda * lambda * (1.0 - rho).powi(2)));
    let lhs = ml.var;
    let rhs = factor * mr.var + extra;
    let (ir, il) = (variance_influence(&gr), variance_influence(&gl));
    let psi: Vec<f64> = il.iter().zip(&ir).map(|(a, b)| a - factor * b).collect();
    let se = influence_se(&psi);
    let mut rep = EstimatorReport::new("variance-comparison", cfg.describe() + &format!(" lambda={lambda} n={n}"));
    rep.row("lhs_var_lambda", lambda, lhs, ml.var_se);
    rep.row("rhs_bound", lambda, rhs, factor * mr.var_se);
    rep.info("extra_term", extra);
    rep.info("difference_se", se);
    rep.check(Check::at_most("lhs_minus_rhs_minus_k_se", lhs - rhs - cfg.tolerance.se_multiplier * se, 0.0));
    rep.check(Check::zero("exit_order_violations", order_violations));
    Ok(rep)
}
