use super::path::TiePolicy;

/// What a two-row sweep keeps: the corner value, the exit point of the chosen
/// maximal path, the axis weight at that exit, and the north and east edges.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamSummary {
    pub g_mn: f64,
    pub exit: i64,
    pub u_exit: f64,
    /// `G(i, n)` for `i = 0..=m`.
    pub north: Vec<f64>,
    /// `G(m, j)` for `j = 0..=n`.
    pub east: Vec<f64>,
}

/// Last-passage sweep holding two rows, with weights supplied site by site.
///
/// Each site carries the exit label of the maximal path reaching it, inherited
/// from the predecessor that attains the maximum; ties follow `policy` exactly
/// as backtracking does, so the label at `(m, n)` is the backtracked `Z`.
#[allow(clippy::needless_range_loop)]
pub fn stream_passage(m: usize, n: usize, policy: TiePolicy, weight: impl Fn(usize, usize) -> f64) -> StreamSummary {
    let w = m + 1;
    let mut g = vec![0.0; w];
    let mut exit = vec![0i64; w];
    let mut south = vec![0.0; w];
    let mut west = vec![0.0; n + 1];
    let mut east = Vec::with_capacity(n + 1);
    for i in 1..=m {
        g[i] = g[i - 1] + weight(i, 0);
        exit[i] = i as i64;
    }
    south.copy_from_slice(&g);
    east.push(g[m]);
    for j in 1..=n {
        g[0] += weight(0, j);
        west[j] = g[0];
        exit[0] = -(j as i64);
        for i in 1..=m {
            let left = g[i - 1];
            let below = g[i];
            let from_left = match left.partial_cmp(&below) {
                Some(std::cmp::Ordering::Greater) => true,
                Some(std::cmp::Ordering::Less) => false,
                _ => policy == TiePolicy::Leftmost,
            };
            if from_left {
                g[i] = left + weight(i, j);
                exit[i] = exit[i - 1];
            } else {
                g[i] = below + weight(i, j);
            }
        }
        east.push(g[m]);
    }
    let z = exit[m];
    let u_exit = if z > 0 { south[z as usize] } else { west[(-z) as usize] };
    StreamSummary { g_mn: g[m], exit: z, u_exit, north: g, east }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpp::{axis_weight_u, backtrack_path, compute_field};
    use crate::weights::{apply_boundary, sample_equilibrium, BoundaryKind};

    #[test]
    fn matches_full_field() {
        for seed in 0..40 {
            for kind in [None, Some(BoundaryKind::ZeroBoth), Some(BoundaryKind::ZeroWest)] {
                let mut w = sample_equilibrium(0.45, 11, 7, seed).unwrap();
                if let Some(k) = &kind {
                    w = apply_boundary(&w, k).unwrap();
                }
                let f = compute_field(&w);
                for policy in [TiePolicy::Rightmost, TiePolicy::Leftmost] {
                    let s = stream_passage(11, 7, policy, |i, j| w.get(i, j));
                    assert_eq!(s.g_mn, f.g_mn());
                    let p = backtrack_path(&f, policy);
                    assert_eq!(s.exit, p.exit);
                    assert_eq!(s.u_exit, axis_weight_u(&f, p.exit).unwrap());
                    assert!((0..=11).all(|i| s.north[i] == f.g(i, 7)));
                    assert!((0..=7).all(|j| s.east[j] == f.g(11, j)));
                }
            }
        }
    }
}
