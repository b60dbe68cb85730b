use crate::error::{Error, Result};

use super::field::LppField;

/// Which maximal path to return when several exist.
///
/// `Rightmost` is the maximal path lying furthest to the right (it leaves the
/// origin along the i-axis whenever that is optimal); `Leftmost` is its mirror.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TiePolicy {
    Rightmost,
    Leftmost,
}

impl std::str::FromStr for TiePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rightmost" => Ok(TiePolicy::Rightmost),
            "leftmost" => Ok(TiePolicy::Leftmost),
            other => Err(Error::Config(format!("unknown tie policy {other}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Right,
    Up,
}

/// An up-right path from `(0, 0)` to `(m, n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePath {
    pub sites: Vec<(usize, usize)>,
    pub policy: TiePolicy,
    /// Signed exit point: `Z > 0` leaves the i-axis at `(Z, 0)`, `Z < 0` the
    /// j-axis at `(0, -Z)`.
    pub exit: i64,
    pub weight: f64,
    /// Number of exact ties resolved by the policy.
    pub ties: usize,
}

impl LatticePath {
    pub fn steps(&self) -> impl Iterator<Item = Step> + '_ {
        self.sites.windows(2).map(|w| if w[1].0 > w[0].0 { Step::Right } else { Step::Up })
    }

    pub fn end(&self) -> (usize, usize) {
        *self.sites.last().expect("path has at least one site")
    }
}

/// Signed exit point of a forward-ordered site sequence.
pub(crate) fn exit_point(sites: &[(usize, usize)]) -> i64 {
    match sites.get(1) {
        None => 0,
        Some(&(1, 0)) => sites.iter().take_while(|s| s.1 == 0).last().map_or(0, |s| s.0 as i64),
        Some(_) => -sites.iter().take_while(|s| s.0 == 0).last().map_or(0, |s| s.1 as i64),
    }
}

/// Walk back from `(m, n)` through predecessors that attain the maximum.
pub fn backtrack_path(f: &LppField, policy: TiePolicy) -> LatticePath {
    let (mut i, mut j) = (f.m(), f.n());
    let mut rev = Vec::with_capacity(f.m() + f.n() + 1);
    let mut ties = 0;
    rev.push((i, j));
    while (i, j) != (0, 0) {
        if i == 0 {
            j -= 1;
        } else if j == 0 {
            i -= 1;
        } else {
            let left = f.g(i - 1, j);
            let below = f.g(i, j - 1);
            if left > below {
                i -= 1;
            } else if below > left {
                j -= 1;
            } else {
                ties += 1;
                match policy {
                    TiePolicy::Rightmost => j -= 1,
                    TiePolicy::Leftmost => i -= 1,
                }
            }
        }
        rev.push((i, j));
    }
    rev.reverse();
    let weight = rev.iter().map(|&(p, q)| f.weights().get(p, q)).sum();
    LatticePath { exit: exit_point(&rev), sites: rev, policy, weight, ties }
}

/// Right-most and left-most i-coordinates of `p` on the row `j = l`.
pub fn path_row_coordinates(p: &LatticePath, l: usize) -> Result<(usize, usize)> {
    let n = p.end().1;
    if l > n {
        return Err(Error::OutOfRange { index: l as i64, lo: 0, hi: n as i64 });
    }
    let mut on_row = p.sites.iter().filter(|s| s.1 == l).map(|s| s.0);
    let first = on_row.next().expect("an up-right path visits every row");
    let last = on_row.next_back().unwrap_or(first);
    Ok((last, first))
}
