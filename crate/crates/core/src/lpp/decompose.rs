use crate::error::{Error, Result};
use crate::weights::{check_density, WeightArray};

use super::field::LppField;
use super::path::TiePolicy;

/// Weight collected along the axes up to `x`: `G(x, 0)` for `x >= 0`, `G(0, -x)` otherwise.
pub fn axis_weight_u(f: &LppField, x: i64) -> Result<f64> {
    let (m, n) = (f.m() as i64, f.n() as i64);
    if x < -n || x > m {
        return Err(Error::OutOfRange { index: x, lo: -n, hi: m });
    }
    Ok(if x >= 0 { f.g(x as usize, 0) } else { f.g(0, (-x) as usize) })
}

/// Interior last-passage values to the corner: `B(i, j)` is the best weight of
/// a path from `(i, j)` to `(m, n)` inside `[1..m] x [1..n]`, both ends included.
#[derive(Clone, Debug)]
pub struct InteriorTable {
    m: usize,
    n: usize,
    b: Vec<f64>,
}

impl InteriorTable {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.b[(j - 1) * self.m + (i - 1)]
    }

    /// `A_x` for the rectangle `[0..m] x [0..n]`.
    pub fn a(&self, x: i64) -> Result<f64> {
        let (m, n) = (self.m as i64, self.n as i64);
        if x < -n || x > m {
            return Err(Error::OutOfRange { index: x, lo: -n, hi: m });
        }
        Ok(self.at(x.max(1) as usize, (-x).max(1) as usize))
    }
}

/// One backward sweep giving every `A_x` of the rectangle.
pub fn interior_from_corner(w: &WeightArray) -> Result<InteriorTable> {
    let (m, n) = (w.m(), w.n());
    if m == 0 || n == 0 {
        return Err(Error::Dimensions { m, n });
    }
    let mut b = vec![0.0; m * n];
    for j in (1..=n).rev() {
        for i in (1..=m).rev() {
            let right = if i < m { b[(j - 1) * m + i] } else { f64::NEG_INFINITY };
            let up = if j < n { b[j * m + (i - 1)] } else { f64::NEG_INFINITY };
            let next = right.max(up);
            b[(j - 1) * m + (i - 1)] = w.get(i, j) + if next.is_finite() { next } else { 0.0 };
        }
    }
    Ok(InteriorTable { m, n, b })
}

/// Best weight from `(max(x,1), max(-x,1))` to `(m, n)` using interior sites only.
///
/// `m` and `n` may be smaller than the array; the rectangle is clipped to them.
pub fn interior_passage_a(w: &WeightArray, x: i64, m: usize, n: usize) -> Result<f64> {
    let i0 = x.max(1) as usize;
    let j0 = (-x).max(1) as usize;
    if m < i0 || n < j0 || m > w.m() || n > w.n() {
        return Err(Error::Mismatch(format!("degenerate rectangle for A_{x} to ({m}, {n})")));
    }
    let width = m - i0 + 1;
    let mut row = vec![0.0; width];
    for j in j0..=n {
        for (k, i) in (i0..=m).enumerate() {
            let left = if k > 0 { row[k - 1] } else { f64::NEG_INFINITY };
            let below = if j > j0 { row[k] } else { f64::NEG_INFINITY };
            let best = left.max(below);
            row[k] = w.get(i, j) + if best.is_finite() { best } else { 0.0 };
        }
    }
    Ok(row[width - 1])
}

/// Exit point with the split `G(m, n) = U_Z + A_Z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decomposition {
    pub exit: i64,
    pub u: f64,
    pub a: f64,
    pub g_mn: f64,
    /// Number of exit points attaining the maximum.
    pub maximizers: usize,
}

/// Find `Z` as the maximiser of `U_z + A_z` over `z` in `[-n..-1] U [1..m]`.
///
/// Ties go to the largest `z` for `Rightmost`, the smallest for `Leftmost`.
pub fn decompose(f: &LppField, policy: TiePolicy) -> Decomposition {
    let table = interior_from_corner(f.weights()).expect("fields have m, n >= 1");
    let (m, n) = (f.m() as i64, f.n() as i64);
    let candidates = (-n..=-1).chain(1..=m);
    let mut best: Option<(i64, f64, f64)> = None;
    let mut maximizers = 0;
    for z in candidates {
        let u = axis_weight_u(f, z).expect("in range");
        let a = table.a(z).expect("in range");
        let total = u + a;
        match best {
            None => {
                best = Some((z, u, a));
                maximizers = 1;
            }
            Some((_, bu, ba)) => {
                let cur = bu + ba;
                if total > cur {
                    best = Some((z, u, a));
                    maximizers = 1;
                } else if total == cur {
                    maximizers += 1;
                    if policy == TiePolicy::Rightmost {
                        best = Some((z, u, a));
                    }
                }
            }
        }
    }
    let (exit, u, a) = best.expect("at least two candidates");
    Decomposition { exit, u, a, g_mn: f.g_mn(), maximizers }
}

// Products like 0.7^2 * 1000 land a hair below the integer in binary.
fn guarded_floor(x: f64) -> usize {
    (x + 1e-9 * x.abs().max(1.0)).floor().max(0.0) as usize
}

/// The characteristic lattice point `(floor((1-rho)^2 t), floor(rho^2 t))`.
pub fn characteristic_point(rho: f64, t: f64) -> Result<(usize, usize)> {
    check_density(rho)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Degenerate { rho, t });
    }
    let m = guarded_floor((1.0 - rho) * (1.0 - rho) * t);
    let n = guarded_floor(rho * rho * t);
    if m == 0 || n == 0 {
        return Err(Error::Degenerate { rho, t });
    }
    Ok((m, n))
}

/// Mean last-passage time at the characteristic point under equilibrium boundaries.
pub fn expected_passage(rho: f64, t: f64) -> Result<f64> {
    let (m, n) = characteristic_point(rho, t)?;
    Ok(m as f64 / (1.0 - rho) + n as f64 / rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_by_two;
    use crate::lpp::{backtrack_path, compute_field};
    use crate::weights::{apply_boundary, sample_equilibrium, BoundaryKind};


    #[test]
    fn u_values() {
        let f = compute_field(&two_by_two());
        assert_eq!(axis_weight_u(&f, 0).unwrap(), 0.0);
        assert_eq!(axis_weight_u(&f, -2).unwrap(), 6.0);
        assert_eq!(axis_weight_u(&f, 1).unwrap(), 2.0);
        assert!(axis_weight_u(&f, 3).is_err());
        assert!(axis_weight_u(&f, -3).is_err());
    }

    #[test]
    fn a_values() {
        let w = two_by_two();
        assert_eq!(interior_passage_a(&w, 0, 2, 2).unwrap(), 5.0);
        assert_eq!(interior_passage_a(&w, -2, 2, 2).unwrap(), 4.0);
        assert_eq!(interior_passage_a(&w, 2, 2, 2).unwrap(), 3.0);
        let t = interior_from_corner(&w).unwrap();
        for x in -2..=2 {
            assert_eq!(t.a(x).unwrap(), interior_passage_a(&w, x, 2, 2).unwrap());
        }
        assert!(interior_passage_a(&w, 3, 2, 2).is_err());
    }

    #[test]
    fn a_is_flat_around_zero() {
        for seed in 0..20 {
            let w = sample_equilibrium(0.5, 5, 4, seed).unwrap();
            let a0 = interior_passage_a(&w, 0, 5, 4).unwrap();
            assert_eq!(interior_passage_a(&w, 1, 5, 4).unwrap(), a0);
            assert_eq!(interior_passage_a(&w, -1, 5, 4).unwrap(), a0);
        }
        let z = WeightArray::from_fn(3, 3, BoundaryKind::equilibrium(0.5).unwrap(), |i, j| {
            if i == 0 || j == 0 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        for x in -3..=3 {
            assert_eq!(interior_passage_a(&z, x, 3, 3).unwrap(), 0.0);
        }
    }

    #[test]
    fn two_by_two_decomposition() {
        let d = decompose(&compute_field(&two_by_two()), TiePolicy::Rightmost);
        assert_eq!((d.exit, d.u, d.a, d.g_mn), (-2, 6.0, 4.0, 10.0));
    }

    #[test]
    fn zeroed_axes_decomposition() {
        let w = apply_boundary(&sample_equilibrium(0.3, 6, 5, 8).unwrap(), &BoundaryKind::ZeroBoth).unwrap();
        let f = compute_field(&w);
        let a0 = interior_passage_a(&w, 0, 6, 5).unwrap();
        for policy in [TiePolicy::Rightmost, TiePolicy::Leftmost] {
            let d = decompose(&f, policy);
            assert_eq!(d.u, 0.0);
            assert_eq!(f.g_mn(), a0);
            assert_eq!(d.exit, backtrack_path(&f, policy).exit);
        }
    }

    #[test]
    fn decomposition_matches_backtracking() {
        for seed in 0..100 {
            let f = compute_field(&sample_equilibrium(0.6, 8, 6, seed).unwrap());
            let d = decompose(&f, TiePolicy::Rightmost);
            assert!((d.u + d.a - f.g_mn()).abs() <= 1e-9);
            assert_eq!(d.exit, backtrack_path(&f, TiePolicy::Rightmost).exit);
            assert_ne!(d.exit, 0);
            assert_eq!(d.maximizers, 1);
        }
    }

    #[test]
    fn characteristic_points() {
        assert_eq!(characteristic_point(0.5, 100.0).unwrap(), (25, 25));
        assert_eq!(characteristic_point(0.3, 1000.0).unwrap(), (490, 90));
        assert_eq!(characteristic_point(0.5, 4.0).unwrap(), (1, 1));
        assert!(matches!(characteristic_point(0.5, 3.0), Err(Error::Degenerate { .. })));
        assert!(characteristic_point(1.2, 100.0).is_err());
    }

    #[test]
    fn expected_passage_values() {
        assert!((expected_passage(0.5, 100.0).unwrap() - 100.0).abs() < 1e-12);
        assert!((expected_passage(0.3, 1000.0).unwrap() - 1000.0).abs() < 1e-9);
    }
}
