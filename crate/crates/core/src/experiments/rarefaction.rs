//! Boundaries dominated by equilibrium: rarefaction and zeroed axes.

use crate::error::{Error, Result};
use crate::interface::build_interface;
use crate::lpp::{backtrack_path, characteristic_point, compute_field, interior_passage_a, path_row_coordinates, stream_passage, LppField, TiePolicy};
use crate::stats::{binomial_interval, binomial_se, log_log_fit, mean, moments, quantile};
use crate::weights::{apply_boundary, sample_equilibrium, BoundaryKind, WeightArray};

use super::{par_samples, BoundaryChoice, Check, EstimatorReport, ExperimentConfig};

fn require_dominated(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    match cfg.boundary {
        BoundaryChoice::ZeroBoth | BoundaryChoice::Rarefaction { .. } => Ok(()),
        other => Err(Error::Config(format!("{} needs a zero-both or rarefaction boundary, got {other}", cfg.name))),
    }
}

/// Equilibrium array and its dominated counterpart from one seed.
fn coupled_pair(cfg: &ExperimentConfig, m: usize, n: usize, seed: u64) -> (WeightArray, WeightArray) {
    let w = sample_equilibrium(cfg.rho, m, n, seed).expect("validated density and dims");
    let kind = cfg.boundary.kind(cfg.rho, m, n).expect("validated").expect("dominated boundary");
    let hat = apply_boundary(&w, &kind).expect("kind matches the array");
    (w, hat)
}

/// `(G^ - t)/t^(1/3)` over the t-grid: 5-95% spread and mean deficit stable
/// across the grid, `Var G^` slope compatible with `[0.55, 0.80]`, and the
/// coupled ordering `A_0 <= G^ <= G^rho` on every instance.
pub fn rarefaction_fluctuations(cfg: &ExperimentConfig) -> Result<EstimatorReport> {
    require_dominated(cfg)?;
    if cfg.t_grid.len() < 3 {
        return Err(Error::TooFewSamples { got: cfg.t_grid.len(), need: 3 });
    }
    let mut rep = EstimatorReport::new("rarefaction", cfg.describe());
    let (mut var, mut var_se, mut deficits, mut spreads) = (vec![], vec![], vec![], vec![]);
    let mut violations = 0;
    for &t in &cfg.t_grid {
        let (m, n) = characteristic_point(cfg.rho, t)?;
        let triples = par_samples(cfg.samples, |k| {
            let (w, hat) = coupled_pair(cfg, m, n, cfg.sample_seed("rarefaction", k));
            let a0 = interior_passage_a(&w, 0, m, n).expect("full rectangle");
            let g_hat = stream_passage(m, n, cfg.tie, |i, j| hat.get(i, j)).g_mn;
            let g_eq = stream_passage(m, n, cfg.tie, |i, j| w.get(i, j)).g_mn;
            (a0, g_hat, g_eq)
        });
        violations += triples.iter().filter(|(a, g, e)| !(a <= g && g <= e)).count();
        let g: Vec<f64> = triples.iter().map(|p| p.1).collect();
        let mo = moments(&g)?;
        let third = t.cbrt();
        let scaled: Vec<f64> = g.iter().map(|x| (x - t) / third).collect();
        let spread = quantile(&scaled, 0.95) - quantile(&scaled, 0.05);
        let deficit = (t - mo.mean) / third;
        rep.row("var_Ghat", t, mo.var, mo.var_se);
        rep.row("deficit_scaled", t, deficit, mo.mean_se / third);
        rep.row("spread_5_95_scaled", t, spread, 0.0);
        rep.info(format!("mean_A0_t{t}"), mean(&triples.iter().map(|p| p.0).collect::<Vec<_>>()));
        var.push(mo.var);
        var_se.push(mo.var_se);
        deficits.push(deficit);
        spreads.push(spread);
    }
    let fit = log_log_fit(&cfg.t_grid, &var, &var_se)?;
    let (lo, hi) = fit.slope_ci(cfg.tolerance.confidence);
    rep.info("slope", fit.slope);
    rep.info("slope_se", fit.slope_se);
    rep.check(Check::zero("ordering_violations", violations));
    rep.check(Check::at_most("slope_ci_lo", lo, 0.80));
    rep.check(Check::at_least("slope_ci_hi", hi, 0.55));
    rep.check(Check::within("deficit_max_over_min", positive_ratio(&deficits), 1.0, 3.0));
    rep.check(Check::within("spread_max_over_min", positive_ratio(&spreads), 1.0, 2.0));
    Ok(rep)
}

/// `max/min` of a list that must be strictly positive; infinite otherwise.
fn positive_ratio(xs: &[f64]) -> f64 {
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// Row coordinates of the right-most and left-most maximal paths of the
/// dominated array at the characteristic row of `s`, with tails weighted by
/// `a^(3 alpha)`.
///
/// A side passes when the largest lower confidence bound of its weighted
/// tails is at most `max_ratio` times the upper bound at the first `a`: the
/// weighted tail must not grow along the grid.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn transversal_fluctuations(
    cfg: &ExperimentConfig,
    s: f64,
    a_grid: &[f64],
    alpha: f64,
    max_ratio: f64,
) -> Result<EstimatorReport> {
    require_dominated(cfg)?;
    let t = cfg.single_t()?;
    if !(s <= t) {
        return Err(Error::Config(format!("interior time {s} exceeds t={t}")));
    }
    if a_grid.is_empty() {
        return Err(Error::Config("empty a-grid".into()));
    }
    let (m, n) = characteristic_point(cfg.rho, t)?;
    let (k, l) = characteristic_point(cfg.rho, s)?;
    let rows = par_samples(cfg.samples, |q| {
        let (w, hat) = coupled_pair(cfg, m, n, cfg.sample_seed("transversal", q));
        let f = compute_field(&hat);
        let z = row_of(&f, TiePolicy::Rightmost, l).0;
        let y = row_of(&f, TiePolicy::Leftmost, l).1;
        let w0 = apply_boundary(&w, &BoundaryKind::ZeroWest).expect("same dims");
        let z_w0 = row_of(&compute_field(&w0), TiePolicy::Rightmost, l).0;
        (z, y, z_w0)
    });
    let scale = t.powf(2.0 / 3.0);
    let level = cfg.tolerance.confidence;
    let total = rows.len();
    let mut rep = EstimatorReport::new("transversal", cfg.describe() + &format!(" s={s} k={k} l={l}"));
    let right: Vec<f64> = rows.iter().map(|r| r.0 as f64 - k as f64).collect();
    let left: Vec<f64> = rows.iter().map(|r| k as f64 - r.1 as f64).collect();
    for (side, dev) in [("right", &right), ("left", &left)] {
        let (mut lows, mut highs) = (vec![], vec![]);
        for &a in a_grid {
            let count = dev.iter().filter(|&&d| d >= a * scale).count();
            let wgt = a.powf(3.0 * alpha);
            let (lo, hi) = binomial_interval(count, total, level);
            rep.row(format!("{side}_tail_weighted"), a, wgt * count as f64 / total as f64, wgt * binomial_se(count, total));
            rep.info(format!("{side}_tail_count_a{a}"), count as f64);
            lows.push(wgt * lo);
            highs.push(wgt * hi);
        }
        let max_low = lows.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        rep.info(format!("{side}_mean_deviation_scaled"), mean(dev) / scale);
        rep.check(Check::at_most(format!("{side}_weighted_growth_bound"), max_low / highs[0], max_ratio));
    }
    let crossed = rows.iter().filter(|r| r.1 > r.0).count();
    let above_w0 = rows.iter().filter(|r| r.0 > r.2).count();
    rep.check(Check::zero("leftmost_right_of_rightmost", crossed));
    rep.check(Check::zero("rightmost_beyond_west_zeroed", above_w0));
    Ok(rep)
}

fn row_of(f: &LppField, policy: TiePolicy, l: usize) -> (usize, usize) {
    path_row_coordinates(&backtrack_path(f, policy), l).expect("row inside the rectangle")
}

/// Exhaustive per-instance checks of the zeroed-boundary increment bounds on
/// the rectangle of `cfg.dims`:
///
/// * `A_0(m2,n) - A_0(m1,n) <= G^{W=0}(m2,n) - G^{W=0}(m1,n)` for all `m1 < m2`;
/// * `G^{W=0}(i,n) = G(i,n)` for `i > v(n)`;
/// * `A_0(m2,n) - A_0(m1,n) >= G^{S=0}(m2,n) - G^{S=0}(m1,n)` for all `m1 < m2`;
/// * `G^{S=0}(i,n) = G(i,n)` for `i <= v(n)`;
/// * the right-most path of the zero-both array never passes the right-most
///   path of `G^{W=0}` on any row.
///
/// Increments of zeroed fields are sums of recursion-computed `I` along row
/// `n`, which keeps the comparisons exact in floating point.
pub fn zeroed_boundary_bounds(cfg: &ExperimentConfig) -> Result<EstimatorReport> {
    cfg.validate()?;
    let (m, n) = cfg.dims()?;
    let counts = par_samples(cfg.samples, |q| {
        let w = sample_equilibrium(cfg.rho, m, n, cfg.sample_seed("zeroed-bounds", q)).expect("validated");
        let field = |kind: BoundaryKind| compute_field(&apply_boundary(&w, &kind).expect("same dims"));
        let (g, zb, w0, s0) =
            (compute_field(&w), field(BoundaryKind::ZeroBoth), field(BoundaryKind::ZeroWest), field(BoundaryKind::ZeroSouth));
        let v = build_interface(&g).v(n).or_sentinel(m + 1);
        let row_sum = |f: &LppField, a: usize, b: usize| -> f64 { (a + 1..=b).map(|i| f.inc_i(i, n)).sum() };
        let mut c = ZeroedCounts::default();
        for m1 in 0..=m {
            for m2 in m1 + 1..=m {
                let a0 = row_sum(&zb, m1, m2);
                c.pairs += 1;
                c.west_bound += usize::from(a0 > row_sum(&w0, m1, m2));
                c.south_bound += usize::from(a0 < row_sum(&s0, m1, m2));
            }
        }
        for i in 0..=m {
            if i > v {
                c.west_equal_sites += 1;
                c.west_equal += usize::from(w0.g(i, n) != g.g(i, n));
            } else {
                c.south_equal_sites += 1;
                c.south_equal += usize::from(s0.g(i, n) != g.g(i, n));
            }
            if i >= 1 {
                c.a0_mismatch += usize::from(interior_passage_a(&w, 0, i, n).expect("inside") != zb.g(i, n));
            }
        }
        let (pz, pw) = (backtrack_path(&zb, TiePolicy::Rightmost), backtrack_path(&w0, TiePolicy::Rightmost));
        for l in 0..=n {
            let a = path_row_coordinates(&pz, l).expect("row").0;
            let b = path_row_coordinates(&pw, l).expect("row").0;
            c.zhat_beyond += usize::from(a > b);
        }
        c
    });
    let total = counts.iter().fold(ZeroedCounts::default(), |acc, c| acc.add(c));
    let mut rep = EstimatorReport::new("zeroed-bounds", cfg.describe());
    rep.info("index_pairs", total.pairs as f64);
    rep.info("sites_right_of_interface", total.west_equal_sites as f64);
    rep.info("sites_left_of_interface", total.south_equal_sites as f64);
    rep.check(Check::zero("west_zeroed_bound_violations", total.west_bound));
    rep.check(Check::zero("west_zeroed_equality_violations", total.west_equal));
    rep.check(Check::zero("south_zeroed_bound_violations", total.south_bound));
    rep.check(Check::zero("south_zeroed_equality_violations", total.south_equal));
    rep.check(Check::zero("a0_zero_both_mismatches", total.a0_mismatch));
    rep.check(Check::zero("rightmost_beyond_west_zeroed", total.zhat_beyond));
    Ok(rep)
}

#[derive(Clone, Copy, Debug, Default)]
struct ZeroedCounts {
    pairs: usize,
    west_bound: usize,
    south_bound: usize,
    west_equal_sites: usize,
    west_equal: usize,
    south_equal_sites: usize,
    south_equal: usize,
    a0_mismatch: usize,
    zhat_beyond: usize,
}

impl ZeroedCounts {
    fn add(self, o: &Self) -> Self {
        Self {
            pairs: self.pairs + o.pairs,
            west_bound: self.west_bound + o.west_bound,
            south_bound: self.south_bound + o.south_bound,
            west_equal_sites: self.west_equal_sites + o.west_equal_sites,
            west_equal: self.west_equal + o.west_equal,
            south_equal_sites: self.south_equal_sites + o.south_equal_sites,
            south_equal: self.south_equal + o.south_equal,
            a0_mismatch: self.a0_mismatch + o.a0_mismatch,
            zhat_beyond: self.zhat_beyond + o.zhat_beyond,
        }
    }
}
