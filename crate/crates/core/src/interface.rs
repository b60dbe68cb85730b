//! Competition interface, the time-reversed field, and their duality with the
//! maximal path.

use std::io::Write;

use crate::error::Result;
use crate::lpp::{backtrack_path, compute_field, LppField, TiePolicy};
use crate::weights::{BoundaryKind, CustomBoundary, WeightArray};

/// Which edge of the rectangle stopped the interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Reached the column `i = m` below the top row.
    East,
    /// Reached the row `j = n` left of the last column.
    North,
}

/// First-hit coordinate of the interface on a row or column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hit {
    At(usize),
    Never,
}

impl Hit {
    /// The coordinate, with `Never` mapped to `sentinel` (one past the edge).
    pub fn or_sentinel(self, sentinel: usize) -> usize {
        match self {
            Hit::At(x) => x,
            Hit::Never => sentinel,
        }
    }
}

/// The up-right path started at the origin that always steps to the
/// neighbour with the smaller `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompetitionInterface {
    pub sites: Vec<(usize, usize)>,
    pub termination: Termination,
    m: usize,
    n: usize,
    /// Steps taken on an exact `G` tie; such steps go right.
    pub ties: usize,
}

impl CompetitionInterface {
    /// `v(r)`: smallest i with `(i, r)` on the interface.
    pub fn v(&self, row: usize) -> Hit {
        self.sites.iter().find(|s| s.1 == row).map_or(Hit::Never, |s| Hit::At(s.0))
    }

    /// `w(c)`: smallest j with `(c, j)` on the interface.
    pub fn w(&self, col: usize) -> Hit {
        self.sites.iter().find(|s| s.0 == col).map_or(Hit::Never, |s| Hit::At(s.1))
    }

    /// `[m - v(n)]^+ - [n - w(m)]^+`, never-hit coordinates counting as `m + 1`
    /// and `n + 1`.
    pub fn z_star(&self) -> i64 {
        let (m, n) = (self.m as i64, self.n as i64);
        let v = self.v(self.n).or_sentinel(self.m + 1) as i64;
        let w = self.w(self.m).or_sentinel(self.n + 1) as i64;
        (m - v).max(0) - (n - w).max(0)
    }

    pub fn end_site(&self) -> (usize, usize) {
        *self.sites.last().expect("interface starts at the origin")
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }
}

/// Follow the smaller of `G(i+1, j)` and `G(i, j+1)` until either lies
/// outside the rectangle.
pub fn build_interface(f: &LppField) -> CompetitionInterface {
    let (m, n) = (f.m(), f.n());
    let (mut i, mut j) = (0, 0);
    let mut sites = vec![(0, 0)];
    let mut ties = 0;
    while i < m && j < n {
        let right = f.g(i + 1, j);
        let up = f.g(i, j + 1);
        if right == up {
            ties += 1;
        }
        if right <= up {
            i += 1;
        } else {
            j += 1;
        }
        sites.push((i, j));
    }
    let termination = if i == m { Termination::East } else { Termination::North };
    CompetitionInterface { sites, termination, m, n, ties }
}

pub fn z_star_of(f: &LppField) -> i64 {
    build_interface(f).z_star()
}

/// Write the interface as `k,i,j` rows.
pub fn write_interface_csv<W: Write>(c: &CompetitionInterface, out: &mut W) -> Result<()> {
    writeln!(out, "k,i,j")?;
    for (k, (i, j)) in c.sites.iter().enumerate() {
        writeln!(out, "{k},{i},{j}")?;
    }
    Ok(())
}

/// The reversed weights and the field recomputed from them.
#[derive(Clone, Debug)]
pub struct Reversal {
    pub weights: WeightArray,
    pub field: LppField,
}

impl Reversal {
    /// Largest `|G*(i, j) - (G(m, n) - G(m - i, n - j))|` over the rectangle.
    pub fn identity_residual(&self, f: &LppField) -> f64 {
        let (m, n) = (f.m(), f.n());
        let total = f.g_mn();
        let mut worst: f64 = 0.0;
        for j in 0..=n {
            for i in 0..=m {
                let h = total - f.g(m - i, n - j);
                worst = worst.max((self.field.g(i, j) - h).abs());
            }
        }
        worst
    }
}

/// Build `omega*`: `omega*(i, 0) = I(m-i+1, n)`, `omega*(0, j) = J(m, n-j+1)`,
/// `omega*(i, j) = X(m-i, n-j)`, and run the recurrence on it.
///
/// An equilibrium input keeps its boundary label, since the reversed array
/// has the same law; any other input is labelled with its explicit axes.
pub fn reverse_process(f: &LppField) -> Reversal {
    let (m, n) = (f.m(), f.n());
    let south: Vec<f64> = (1..=m).map(|i| f.inc_i(m - i + 1, n)).collect();
    let west: Vec<f64> = (1..=n).map(|j| f.inc_j(m, n - j + 1)).collect();
    let kind = match f.weights().boundary() {
        BoundaryKind::Equilibrium(d) => BoundaryKind::Equilibrium(*d),
        _ => BoundaryKind::Custom(CustomBoundary { south: south.clone(), west: west.clone() }),
    };
    let weights = WeightArray::from_fn(m, n, kind, |i, j| match (i, j) {
        (_, 0) => south[i - 1],
        (0, _) => west[j - 1],
        _ => f.x(m - i, n - j),
    })
    .expect("increments are finite and nonnegative");
    let field = compute_field(&weights);
    Reversal { weights, field }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityVerdict {
    /// Whether `phi*_k = (m, n) - pi_{m+n-k}` for every `0 <= k <= m + n - |Z|`.
    pub holds: bool,
    pub first_mismatch: Option<usize>,
    /// Set when a tie was resolved by policy in the path or the interface,
    /// in which case the statement need not apply.
    pub ambiguous: bool,
    pub exit: i64,
    /// Exit point of the reversed interface, which equals `exit` when the
    /// duality holds.
    pub reversed_z_star: i64,
}

/// Compare the reversed field's interface with the reflected maximal path.
pub fn check_reversal_duality(f: &LppField) -> DualityVerdict {
    let (m, n) = (f.m(), f.n());
    let path = backtrack_path(f, TiePolicy::Rightmost);
    let rev = reverse_process(f);
    let phi = build_interface(&rev.field);
    let last = m + n - path.exit.unsigned_abs() as usize;
    let mut first_mismatch = None;
    for k in 0..=last {
        let (pi, pj) = path.sites[m + n - k];
        if phi.sites.get(k) != Some(&(m - pi, n - pj)) {
            first_mismatch = Some(k);
            break;
        }
    }
    if first_mismatch.is_none() && phi.sites.len() != last + 1 {
        first_mismatch = Some(phi.sites.len().min(last + 1));
    }
    DualityVerdict {
        holds: first_mismatch.is_none(),
        first_mismatch,
        ambiguous: path.ties > 0 || phi.ties > 0,
        exit: path.exit,
        reversed_z_star: phi.z_star(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_by_two;
    use crate::weights::sample_equilibrium;

    #[test]
    fn two_by_two_interface() {
        let f = compute_field(&two_by_two());
        let c = build_interface(&f);
        assert_eq!(c.sites, vec![(0, 0), (1, 0), (2, 0)]);
        assert_eq!(c.termination, Termination::East);
        assert_eq!(c.v(2), Hit::Never);
        assert_eq!(c.w(2), Hit::At(0));
        assert_eq!(c.z_star(), -2);
        assert_eq!(z_star_of(&f), -2);
        let mut buf = Vec::new();
        write_interface_csv(&c, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,i,j\n0,0,0\n1,1,0\n2,2,0\n");
    }

    #[test]
    fn heavy_first_row_pins_interface_to_axis() {
        let kind = BoundaryKind::Custom(CustomBoundary { south: vec![1.0; 5], west: vec![100.0; 3] });
        let w = WeightArray::from_fn(5, 3, kind, |i, j| match (i, j) {
            (_, 0) => 1.0,
            (0, _) => 100.0,
            (_, 1) => 100.0,
            _ => 1.0,
        })
        .unwrap();
        let c = build_interface(&compute_field(&w));
        assert!(c.sites.iter().all(|s| s.1 == 0));
        assert_eq!(c.end_site(), (5, 0));
        assert_eq!(c.z_star(), -3);
    }

    #[test]
    fn hit_implication_and_exclusive_parts() {
        for seed in 0..200 {
            let f = compute_field(&sample_equilibrium(0.4, 9, 6, seed).unwrap());
            let c = build_interface(&f);
            let (m, n) = (9, 6);
            let v = c.v(n).or_sentinel(m + 1);
            let w = c.w(m).or_sentinel(n + 1);
            if v >= m {
                assert!(w < n);
            }
            let a = m.saturating_sub(v);
            let b = n.saturating_sub(w);
            assert!((a == 0) != (b == 0), "seed {seed}: {a} {b}");
            for s in c.sites.windows(2) {
                assert_eq!(s[1].0 + s[1].1, s[0].0 + s[0].1 + 1);
            }
        }
    }

    #[test]
    fn reversal_corners() {
        let f = compute_field(&two_by_two());
        let r = reverse_process(&f);
        assert_eq!(r.field.g(0, 0), 0.0);
        assert_eq!(r.field.g_mn(), f.g_mn());
        assert_eq!(r.identity_residual(&f), 0.0);
    }

    #[test]
    fn reversal_identity_on_random_instances() {
        for seed in 0..100 {
            let f = compute_field(&sample_equilibrium(0.5, 6, 6, seed).unwrap());
            let r = reverse_process(&f);
            assert!(r.identity_residual(&f) <= 1e-12 * f.g_mn().max(1.0), "seed {seed}");
            assert!(r.field.recurrence_residual() <= 1e-12 * f.g_mn());
        }
    }

    #[test]
    fn duality_on_random_instances() {
        for seed in 0..100 {
            let f = compute_field(&sample_equilibrium(0.5, 8, 5, seed).unwrap());
            let d = check_reversal_duality(&f);
            assert!(!d.ambiguous);
            assert!(d.holds, "seed {seed}: {d:?}");
            assert_eq!(d.reversed_z_star, d.exit);
        }
    }

    #[test]
    fn duality_on_two_by_two() {
        let d = check_reversal_duality(&compute_field(&two_by_two()));
        assert!(d.holds);
        assert_eq!(d.exit, -2);
    }
}
