//! Increments along down-right paths: independence and exponential marginals.

use crate::error::{Error, Result};
use crate::lpp::compute_field;
use crate::stats::{correlation, ks_exponential};
use crate::weights::sample_equilibrium;

use super::equilibrium::require_equilibrium;
use super::{par_samples, Check, EstimatorReport, ExperimentConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Move {
    Right,
    Down,
}

/// A down-right lattice path from `(0, n)` to `(m, 0)`: the part of a
/// doubly-infinite down-right path inside the rectangle, which continues up
/// the j-axis and out along the i-axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownRightPath {
    m: usize,
    n: usize,
    moves: Vec<Move>,
}

impl DownRightPath {
    /// Along the top row, then down the last column.
    pub fn north_east(m: usize, n: usize) -> Self {
        let moves = std::iter::repeat_n(Move::Right, m).chain(std::iter::repeat_n(Move::Down, n)).collect();
        Self { m, n, moves }
    }

    /// Alternating right and down steps, finishing the longer side at the end.
    pub fn staircase(m: usize, n: usize) -> Self {
        let mut moves = Vec::with_capacity(m + n);
        let (mut r, mut d) = (m, n);
        while r > 0 || d > 0 {
            if r > 0 {
                moves.push(Move::Right);
                r -= 1;
            }
            if d > 0 {
                moves.push(Move::Down);
                d -= 1;
            }
        }
        Self { m, n, moves }
    }

    /// `north-east`, `staircase`, or an explicit word over `R` and `D` with
    /// `m` of the former and `n` of the latter.
    pub fn parse(spec: &str, m: usize, n: usize) -> Result<Self> {
        match spec {
            "north-east" => Ok(Self::north_east(m, n)),
            "staircase" => Ok(Self::staircase(m, n)),
            word => {
                let moves = word
                    .chars()
                    .map(|c| match c {
                        'R' => Ok(Move::Right),
                        'D' => Ok(Move::Down),
                        other => Err(Error::PathSpec(format!("unexpected step {other:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let right = moves.iter().filter(|&&s| s == Move::Right).count();
                if right != m || moves.len() - right != n {
                    return Err(Error::PathSpec(format!("path needs {m} R and {n} D steps")));
                }
                Ok(Self { m, n, moves })
            }
        }
    }

    /// Sites visited, starting at `(0, n)`.
    pub fn sites(&self) -> Vec<(usize, usize)> {
        let (mut i, mut j) = (0, self.n);
        let mut out = vec![(i, j)];
        for s in &self.moves {
            match s {
                Move::Right => i += 1,
                Move::Down => j -= 1,
            }
            out.push((i, j));
        }
        out
    }

    /// Sites `(i, j)` with `i < p` and `j < q` for some `(p, q)` on the path.
    pub fn enclosed(&self) -> Vec<(usize, usize)> {
        // For each column i < m, the highest path point with p > i bounds j.
        let sites = self.sites();
        let mut out = Vec::new();
        for i in 0..self.m {
            let top = sites.iter().filter(|s| s.0 > i).map(|s| s.1).max().unwrap_or(0);
            out.extend((0..top).map(|j| (i, j)));
        }
        out
    }
}

/// Pooled KS tests of the increments along `path` (`I` against
/// `Exp(1 - rho)`, `J` against `Exp(rho)`) and of the minima `X` in the
/// enclosed region against `Exp(1)`, plus the lag-1 correlation of
/// rate-standardised increments along the path.
pub fn burke_increment_test(cfg: &ExperimentConfig, path: &DownRightPath) -> Result<EstimatorReport> {
    let d = require_equilibrium(cfg)?;
    let (m, n) = cfg.dims()?;
    if (path.m, path.n) != (m, n) {
        return Err(Error::PathSpec(format!("path is for {}x{}, lattice is {m}x{n}", path.m, path.n)));
    }
    let (ri, rj) = (d.complement(), d.get());
    let sites = path.sites();
    let enclosed = path.enclosed();
    let (ui, uj) = (m / 2 + 1, n / 2);
    let per_instance = par_samples(cfg.samples, |k| {
        let w = sample_equilibrium(cfg.rho, m, n, cfg.sample_seed("burke", k)).expect("valid dims");
        let f = compute_field(&w);
        let mut is = Vec::new();
        let mut js = Vec::new();
        let mut standardized = Vec::with_capacity(m + n);
        for (a, b) in sites.iter().zip(&sites[1..]) {
            if b.0 > a.0 {
                let v = f.inc_i(b.0, b.1);
                is.push(v);
                standardized.push(v * ri - 1.0);
            } else {
                let v = f.inc_j(a.0, a.1);
                js.push(v);
                standardized.push(v * rj - 1.0);
            }
        }
        let xs: Vec<f64> = enclosed.iter().map(|&(i, j)| f.x(i, j)).collect();
        // An up-right turn, where independence fails.
        let turn = (f.inc_i(ui, uj) * ri - 1.0, f.inc_j(ui, uj + 1) * rj - 1.0);
        (is, js, xs, standardized, turn)
    });
    let mut all_i = Vec::new();
    let mut all_j = Vec::new();
    let mut all_x = Vec::new();
    let (mut lead, mut follow) = (Vec::new(), Vec::new());
    let (mut turn_a, mut turn_b) = (Vec::new(), Vec::new());
    for (is, js, xs, st, turn) in per_instance {
        all_i.extend(is);
        all_j.extend(js);
        all_x.extend(xs);
        lead.extend_from_slice(&st[..st.len() - 1]);
        follow.extend_from_slice(&st[1..]);
        turn_a.push(turn.0);
        turn_b.push(turn.1);
    }
    let mut rep = EstimatorReport::new("burke", cfg.describe());
    let alpha = cfg.tolerance.alpha;
    let mut tests = 0;
    for (name, data, rate) in [("I", &all_i, ri), ("J", &all_j, rj), ("X", &all_x, 1.0)] {
        if data.is_empty() {
            continue;
        }
        let ks = ks_exponential(data, rate)?;
        tests += 1;
        rep.row(format!("mean_{name}"), rate, crate::stats::mean(data), 1.0 / rate / (data.len() as f64).sqrt());
        rep.info(format!("ks_{name}_statistic"), ks.statistic);
        rep.info(format!("ks_{name}_count"), data.len() as f64);
        rep.check(Check::at_least(format!("ks_{name}_p"), ks.p_value, alpha));
    }
    let r = correlation(&lead, &follow);
    let bound = 3.0 / (lead.len() as f64).sqrt();
    rep.info("lag1_pairs", lead.len() as f64);
    rep.check(Check::within("lag1_corr", r, -bound, bound));
    rep.info("up_right_turn_corr", correlation(&turn_a, &turn_b));
    rep.info("up_right_turn_reference_bound", 3.0 / (turn_a.len() as f64).sqrt());
    rep.info("bonferroni_alpha_per_test", alpha / tests as f64);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_shapes() {
        let p = DownRightPath::north_east(3, 2);
        assert_eq!(p.sites(), vec![(0, 2), (1, 2), (2, 2), (3, 2), (3, 1), (3, 0)]);
        assert_eq!(p.enclosed().len(), 6);
        let s = DownRightPath::staircase(2, 2);
        assert_eq!(s.sites(), vec![(0, 2), (1, 2), (1, 1), (2, 1), (2, 0)]);
        assert_eq!(s.enclosed(), vec![(0, 0), (0, 1), (1, 0)]);
        let axes = DownRightPath::parse("DDRRR", 3, 2).unwrap();
        assert!(axes.enclosed().is_empty());
        assert!(DownRightPath::parse("RRD", 3, 2).is_err());
        assert!(DownRightPath::parse("RRXDD", 3, 2).is_err());
    }
}
