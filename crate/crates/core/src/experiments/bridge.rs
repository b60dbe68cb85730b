//! Exchange times of the Palm-conditioned exclusion process against
//! last-passage times.

use crate::error::Result;
use crate::lpp::compute_field;
use crate::stats::{correlation, ks_exponential, ks_two_sample};
use crate::tasep::{auto_window, burke_marginals, init_palm_conditioned};
use crate::weights::sample_equilibrium;

use super::equilibrium::require_equilibrium;
use super::{par_samples, Check, EstimatorReport, ExperimentConfig};

/// Settings of the exclusion-process comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BridgeSettings {
    /// Exchanges `T(i, j)` are compared for `0 <= i, j <= tracked`.
    pub tracked: usize,
    /// Simulated time per run; both `T` and `G` are capped here.
    pub horizon: f64,
    /// Minimum number of cells whose KS test must pass.
    pub min_passing_cells: usize,
    /// Interarrival times pooled per Poisson test.
    pub pooled_interarrivals: usize,
    /// Leading interarrivals taken from each run for `P_0` and `H_0`.
    pub per_run_p0: usize,
    pub per_run_h0: usize,
}

impl Default for BridgeSettings {
    fn default() -> Self {
        Self { tracked: 5, horizon: 100.0, min_passing_cells: 33, pooled_interarrivals: 5000, per_run_p0: 20, per_run_h0: 10 }
    }
}

struct Run {
    t: Vec<f64>,
    violations: usize,
    p0: Vec<f64>,
    h0: Vec<f64>,
    invalid: bool,
}

/// Leading interarrival times of an event sequence started at time 0.
fn interarrivals(times: &[f64], take: usize) -> Vec<f64> {
    let mut prev = 0.0;
    times
        .iter()
        .take(take)
        .map(|&t| {
            let d = t - prev;
            prev = t;
            d
        })
        .collect()
}

/// Per-cell two-sample KS of `min(T(i,j), h)` against `min(G(i,j), h)`,
/// the exchange identity at every recorded exchange, KS of the `P_0` and
/// `H_0` interarrivals against `Exp(1 - rho)` and `Exp(rho)`, and the
/// correlation of their counts in unit time bins.
pub fn tasep_bridge(cfg: &ExperimentConfig, settings: &BridgeSettings) -> Result<EstimatorReport> {
    let d = require_equilibrium(cfg)?;
    let BridgeSettings { tracked, horizon, .. } = *settings;
    let size = tracked + 1;
    let bins = horizon.floor() as usize;
    let runs = par_samples(cfg.samples, |k| {
        let seed = cfg.sample_seed("tasep", k);
        let window = auto_window(cfg.rho, tracked, horizon, seed).expect("validated density");
        let state = init_palm_conditioned(cfg.rho, window, tracked, seed).expect("window holds the origin");
        match state.simulate(horizon) {
            Ok(traj) => {
                let mut t = Vec::with_capacity(size * size);
                for i in 0..size {
                    for j in 0..size {
                        t.push(traj.exchange_time(i, j).unwrap_or(f64::INFINITY).min(horizon));
                    }
                }
                let (p0, h0) = burke_marginals(&traj);
                Run { t, violations: traj.identity_violations, p0, h0, invalid: false }
            }
            Err(_) => Run { t: vec![], violations: 0, p0: vec![], h0: vec![], invalid: true },
        }
    });
    let g_runs = par_samples(cfg.samples, |k| {
        let w = sample_equilibrium(d.get(), tracked, tracked, cfg.sample_seed("tasep-lpp", k)).expect("validated");
        let f = compute_field(&w);
        let mut g = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                g.push(f.g(i, j).min(horizon));
            }
        }
        g
    });
    let valid: Vec<&Run> = runs.iter().filter(|r| !r.invalid).collect();
    let mut rep = EstimatorReport::new("tasep-bridge", cfg.describe() + &format!(" tracked={tracked} horizon={horizon}"));
    rep.info("invalidated_runs", (runs.len() - valid.len()) as f64);
    let violations: usize = valid.iter().map(|r| r.violations).sum();
    rep.check(Check::zero("exchange_identity_violations", violations));
    let censored = valid.iter().flat_map(|r| &r.t).filter(|&&t| t >= horizon).count();
    rep.info("censored_exchange_times", censored as f64);
    let mut passing = 0;
    for i in 0..size {
        for j in 0..size {
            let c = i * size + j;
            let ts: Vec<f64> = valid.iter().map(|r| r.t[c]).collect();
            let gs: Vec<f64> = g_runs.iter().map(|g| g[c]).collect();
            let ks = ks_two_sample(&ts, &gs)?;
            passing += usize::from(ks.passes(cfg.tolerance.alpha));
            rep.row("ks_p", c as f64, ks.p_value, 0.0);
            rep.info(format!("ks_p_T{i}{j}"), ks.p_value);
        }
    }
    rep.check(Check::at_least("ks_cells_passing", passing as f64, settings.min_passing_cells as f64));
    for (name, rate, take, pick) in [
        ("P0", d.complement(), settings.per_run_p0, (|r: &Run| &r.p0) as fn(&Run) -> &Vec<f64>),
        ("H0", d.get(), settings.per_run_h0, |r: &Run| &r.h0),
    ] {
        let mut pooled = Vec::with_capacity(settings.pooled_interarrivals);
        let mut short_runs = 0;
        for r in &valid {
            if pooled.len() >= settings.pooled_interarrivals {
                break;
            }
            let times = pick(r);
            short_runs += usize::from(times.len() < take);
            pooled.extend(interarrivals(times, take));
        }
        pooled.truncate(settings.pooled_interarrivals);
        let ks = ks_exponential(&pooled, rate)?;
        rep.info(format!("{name}_interarrivals"), pooled.len() as f64);
        rep.info(format!("{name}_runs_with_fewer_jumps"), short_runs as f64);
        rep.info(format!("{name}_ks_statistic"), ks.statistic);
        rep.check(Check::at_least(format!("{name}_poisson_ks_p"), ks.p_value, cfg.tolerance.alpha));
    }
    let (mut cp, mut ch) = (Vec::new(), Vec::new());
    for r in &valid {
        let (mut a, mut b) = (vec![0.0; bins], vec![0.0; bins]);
        for &t in &r.p0 {
            if let Some(x) = a.get_mut(t as usize) {
                *x += 1.0;
            }
        }
        for &t in &r.h0 {
            if let Some(x) = b.get_mut(t as usize) {
                *x += 1.0;
            }
        }
        cp.extend(a);
        ch.extend(b);
    }
    let bound = 3.0 / (cp.len() as f64).sqrt();
    rep.info("count_bins", cp.len() as f64);
    rep.check(Check::within("p0_h0_count_corr", correlation(&cp, &ch), -bound, bound));
    Ok(rep)
}
