use std::io::Write;

use crate::error::{Error, Result};
use crate::weights::WeightArray;

/// Last-passage values `G` and their increments over the whole rectangle.
///
/// Increments are propagated with the recursions
/// `I(i,j) = (I(i,j-1) - J(i-1,j))^+ + omega(i,j)` and its mirror for `J`,
/// starting from the axis weights. They equal the differences of `G` up to
/// rounding, and the recursions are monotone in floating point, so coupling
/// comparisons between two fields are exact.
///
/// `I(i, j) = G(i, j) - G(i - 1, j)` is defined for `i >= 1`,
/// `J(i, j) = G(i, j) - G(i, j - 1)` for `j >= 1`, and
/// `X(i - 1, j - 1) = min(I(i, j - 1), J(i - 1, j))` on `[0..m-1] x [0..n-1]`.
#[derive(Clone, Debug)]
pub struct LppField {
    weights: WeightArray,
    g: Vec<f64>,
    inc_i: Vec<f64>,
    inc_j: Vec<f64>,
    x: Vec<f64>,
}

impl LppField {
    /// Run the recurrence `G(i, j) = max(G(i-1, j), G(i, j-1)) + omega(i, j)`.
    pub fn new(weights: WeightArray) -> Self {
        let (m, n) = (weights.m(), weights.n());
        let w = m + 1;
        let size = w * (n + 1);
        let mut g = vec![0.0; size];
        let mut inc_i = vec![f64::NAN; size];
        let mut inc_j = vec![f64::NAN; size];
        let mut x = vec![f64::NAN; m * n];
        let om = weights.as_slice();
        for j in 0..=n {
            for i in 0..=m {
                let k = j * w + i;
                let left: f64 = if i > 0 { g[k - 1] } else { 0.0 };
                let below = if j > 0 { g[k - w] } else { 0.0 };
                g[k] = left.max(below) + om[k];
                match (i, j) {
                    (0, 0) => {}
                    (_, 0) => inc_i[k] = om[k],
                    (0, _) => inc_j[k] = om[k],
                    _ => {
                        let up = inc_i[k - w];
                        let side = inc_j[k - 1];
                        inc_i[k] = (up - side).max(0.0) + om[k];
                        inc_j[k] = (side - up).max(0.0) + om[k];
                        x[(j - 1) * m + (i - 1)] = up.min(side);
                    }
                }
            }
        }
        Self { weights, g, inc_i, inc_j, x }
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.weights.m()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn weights(&self) -> &WeightArray {
        &self.weights
    }

    #[inline]
    pub fn g(&self, i: usize, j: usize) -> f64 {
        self.g[j * (self.m() + 1) + i]
    }

    pub fn g_mn(&self) -> f64 {
        *self.g.last().expect("field is never empty")
    }

    /// Horizontal increment; `i >= 1`.
    #[inline]
    pub fn inc_i(&self, i: usize, j: usize) -> f64 {
        assert!(i >= 1, "I(0, j) is undefined");
        self.inc_i[j * (self.m() + 1) + i]
    }

    /// Vertical increment; `j >= 1`.
    #[inline]
    pub fn inc_j(&self, i: usize, j: usize) -> f64 {
        assert!(j >= 1, "J(i, 0) is undefined");
        self.inc_j[j * (self.m() + 1) + i]
    }

    /// Interior minimum `X(i, j)` for `i < m`, `j < n`.
    #[inline]
    pub fn x(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.m() && j < self.n(), "X({i}, {j}) outside [0..m-1]x[0..n-1]");
        self.x[j * self.m() + i]
    }

    /// Largest `|G(i,j) - max(G(i-1,j), G(i,j-1)) - omega(i,j)|` over all sites.
    pub fn recurrence_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..=self.n() {
            for i in 0..=self.m() {
                let left = if i > 0 { self.g(i - 1, j) } else { 0.0 };
                let below = if j > 0 { self.g(i, j - 1) } else { 0.0 };
                worst = worst.max((self.g(i, j) - left.max(below) - self.weights.get(i, j)).abs());
            }
        }
        worst
    }

    /// Sites occupied by time `t`: `{(i, j) : G(i, j) <= t}`, row-major.
    pub fn occupied_region(&self, t: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..=self.n() {
            for i in 0..=self.m() {
                if self.g(i, j) <= t {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

pub fn compute_field(w: &WeightArray) -> LppField {
    LppField::new(w.clone())
}

/// Outcome of comparing increments of two coupled arrays.
#[derive(Clone, Debug, PartialEq)]
pub enum CouplingVerdict {
    Holds,
    /// First site where `I <= I~` or `J >= J~` failed, with the offending pair.
    Violated { site: (usize, usize), horizontal: bool, lhs: f64, rhs: f64 },
}

/// Compute both fields and check `I <= I~` and `J >= J~` everywhere.
///
/// Inputs must satisfy the coupling hypothesis: equal interiors, `omega(0, j) >=
/// omega~(0, j)` and `omega(i, 0) <= omega~(i, 0)`.
pub fn check_monotone_coupling(w: &WeightArray, wt: &WeightArray) -> Result<CouplingVerdict> {
    if (w.m(), w.n()) != (wt.m(), wt.n()) {
        return Err(Error::Mismatch("coupled arrays have different dimensions".into()));
    }
    if let Some(i) = (1..=w.m()).find(|&i| w.get(i, 0) > wt.get(i, 0)) {
        return Err(Error::Hypothesis(format!("omega({i},0) > omega~({i},0)")));
    }
    if let Some(j) = (1..=w.n()).find(|&j| w.get(0, j) < wt.get(0, j)) {
        return Err(Error::Hypothesis(format!("omega(0,{j}) < omega~(0,{j})")));
    }
    if !w.interior().eq(wt.interior()) {
        return Err(Error::Hypothesis("interiors differ".into()));
    }
    let f = compute_field(w);
    let ft = compute_field(wt);
    for j in 0..=w.n() {
        for i in 0..=w.m() {
            if i > 0 && f.inc_i(i, j) > ft.inc_i(i, j) {
                return Ok(CouplingVerdict::Violated {
                    site: (i, j),
                    horizontal: true,
                    lhs: f.inc_i(i, j),
                    rhs: ft.inc_i(i, j),
                });
            }
            if j > 0 && f.inc_j(i, j) < ft.inc_j(i, j) {
                return Ok(CouplingVerdict::Violated {
                    site: (i, j),
                    horizontal: false,
                    lhs: f.inc_j(i, j),
                    rhs: ft.inc_j(i, j),
                });
            }
        }
    }
    Ok(CouplingVerdict::Holds)
}

/// Debug dump with columns `i,j,G,I,J,X`; undefined entries are left empty.
pub fn write_field_csv<W: Write>(f: &LppField, out: &mut W) -> Result<()> {
    writeln!(out, "i,j,G,I,J,X")?;
    let opt = |defined: bool, v: f64| if defined { v.to_string() } else { String::new() };
    for j in 0..=f.n() {
        for i in 0..=f.m() {
            writeln!(
                out,
                "{i},{j},{},{},{},{}",
                f.g(i, j),
                opt(i > 0, if i > 0 { f.inc_i(i, j) } else { 0.0 }),
                opt(j > 0, if j > 0 { f.inc_j(i, j) } else { 0.0 }),
                opt(i < f.m() && j < f.n(), if i < f.m() && j < f.n() { f.x(i, j) } else { 0.0 }),
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_by_two;
    use crate::weights::{couple_density, sample_equilibrium, BoundaryKind, CustomBoundary};


    #[test]
    fn zero_weights_give_zero_field() {
        let w = WeightArray::from_fn(3, 4, BoundaryKind::ZeroBoth, |_, _| 0.0).unwrap();
        let f = compute_field(&w);
        for j in 0..=4 {
            for i in 0..=3 {
                assert_eq!(f.g(i, j), 0.0);
                if i > 0 {
                    assert_eq!(f.inc_i(i, j), 0.0);
                }
                if j > 0 {
                    assert_eq!(f.inc_j(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn boundary_row_is_running_sum() {
        let f = compute_field(&two_by_two());
        assert_eq!(f.g(1, 0), 2.0);
        assert_eq!(f.g(2, 0), 3.0);
        assert_eq!(f.g(0, 2), 6.0);
    }

    #[test]
    fn two_by_two_value() {
        let f = compute_field(&two_by_two());
        assert_eq!(f.g_mn(), 10.0);
        assert_eq!(f.g(1, 1), 5.0);
        assert_eq!(f.x(0, 0), 2.0_f64.min(4.0));
    }

    #[test]
    fn increment_recursions_hold() {
        for seed in 0..20 {
            let w = sample_equilibrium(0.4, 7, 6, seed).unwrap();
            let f = compute_field(&w);
            assert!(f.recurrence_residual() <= 1e-12);
            for j in 1..=6 {
                for i in 1..=7 {
                    let up = f.inc_i(i, j - 1);
                    let left = f.inc_j(i - 1, j);
                    let om = w.get(i, j);
                    assert!((f.inc_i(i, j) - ((up - left).max(0.0) + om)).abs() < 1e-12);
                    assert!((f.inc_j(i, j) - ((left - up).max(0.0) + om)).abs() < 1e-12);
                    assert_eq!(f.x(i - 1, j - 1), up.min(left));
                    assert!(f.inc_i(i, j) >= om - 1e-12 && f.inc_j(i, j) >= om - 1e-12);
                }
            }
        }
    }

    #[test]
    fn occupied_region_edges() {
        let w = sample_equilibrium(0.5, 4, 4, 1).unwrap();
        let f = compute_field(&w);
        assert_eq!(f.occupied_region(0.0), vec![(0, 0)]);
        assert_eq!(f.occupied_region(f.g_mn()).len(), 25);
        let small = f.occupied_region(f.g_mn() / 3.0);
        let big = f.occupied_region(f.g_mn() / 2.0);
        assert!(small.iter().all(|s| big.contains(s)));
        // down-left closed
        for &(i, j) in &big {
            if i > 0 {
                assert!(big.contains(&(i - 1, j)));
            }
            if j > 0 {
                assert!(big.contains(&(i, j - 1)));
            }
        }
    }

    #[test]
    fn monotone_coupling_cases() {
        let w = sample_equilibrium(0.4, 6, 5, 2).unwrap();
        assert_eq!(check_monotone_coupling(&w, &w).unwrap(), CouplingVerdict::Holds);
        let wl = couple_density(&w, 0.7).unwrap();
        assert_eq!(check_monotone_coupling(&w, &wl).unwrap(), CouplingVerdict::Holds);
        // wrong direction of the hypothesis is an input error
        assert!(matches!(check_monotone_coupling(&wl, &w), Err(Error::Hypothesis(_))));

        // hand 2x2 pair: omega~(1,0) = omega(1,0)+1, omega~(0,1) = omega(0,1)-1
        let base = two_by_two();
        let kind = BoundaryKind::Custom(CustomBoundary { south: vec![3.0, 1.0], west: vec![3.0, 2.0] });
        let shifted = crate::weights::apply_boundary(&base, &kind).unwrap();
        assert_eq!(check_monotone_coupling(&base, &shifted).unwrap(), CouplingVerdict::Holds);
    }

    #[test]
    fn field_csv_has_all_sites() {
        let f = compute_field(&two_by_two());
        let mut buf = Vec::new();
        write_field_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        assert!(text.lines().any(|l| l == "2,2,10,1,3,"));
        assert!(text.starts_with("i,j,G,I,J,X\n0,0,0,,,"));
    }
}
