//! Totally asymmetric simple exclusion started from the conditioned Palm
//! state: a hole `H_0` at site 0, a particle `P_0` at site 1, and independent
//! Bernoulli(rho) occupations elsewhere.
//!
//! Particles are labelled right to left and holes left to right, counting
//! from `P_0` and `H_0`; particles right of site 1 and holes left of site 0
//! carry negative labels. The exchange of `P_j` and `H_i` happens at a time
//! `T(i, j)` with the same law as the last-passage time `G(i, j)`.

use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, sequential, SiteStream};
use crate::weights::check_density;

/// Sites kept between the tracked labels and the window edges for a run of
/// length `horizon`: the edge influence and a label each move at most one
/// site per unit-rate jump, so their combined displacement is dominated by a
/// Poisson(2 horizon) count; the slack puts that beyond six standard
/// deviations.
pub fn safety_margin(horizon: f64) -> usize {
    let h2 = 2.0 * horizon.max(0.0);
    (h2 + 6.0 * h2.sqrt() + 6.0).ceil() as usize
}

/// Initial occupation of site `x` (sites 0 and 1 are forced).
fn occupied(stream: &SiteStream, rho: f64, x: i64) -> bool {
    match x {
        0 => false,
        1 => true,
        _ => {
            // Fold the signed site into the two stream coordinates.
            let (a, b) = if x < 0 { ((-x) as usize, 1) } else { (x as usize, 0) };
            stream.uniform(a, b) < rho
        }
    }
}

/// Smallest window holding `P_0..=P_tracked`, `H_0..=H_tracked` and the
/// safety margin for `horizon` around them.
pub fn auto_window(rho: f64, tracked: usize, horizon: f64, seed: u64) -> Result<(i64, i64)> {
    check_density(rho)?;
    let stream = SiteStream::new(seed);
    let mut left = 0i64;
    let mut found = 0;
    while found < tracked {
        left -= 1;
        if occupied(&stream, rho, left) {
            found += 1;
        }
    }
    let mut right = 1i64;
    found = 0;
    while found < tracked {
        right += 1;
        if !occupied(&stream, rho, right) {
            found += 1;
        }
    }
    let margin = safety_margin(horizon) as i64;
    Ok((left - margin, right + margin))
}

/// One exchange of a particle with the hole to its right.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exchange {
    pub t: f64,
    pub particle: i64,
    pub hole: i64,
    /// Site the particle jumped to.
    pub site: i64,
}

#[derive(Clone, Debug)]
pub struct TasepTrajectory {
    rho: f64,
    lo: i64,
    /// `occ[x - lo]` is true for a particle.
    occ: Vec<bool>,
    /// Label of the particle or hole at each site.
    label: Vec<i64>,
    tracked: usize,
    t: f64,
    rng: ChaCha8Rng,
    /// Left ends of the `(1, 0)` pairs, as window offsets.
    active: Vec<usize>,
    slot: Vec<usize>,
    /// Exchanges involving a tracked particle or a tracked hole.
    pub events: Vec<Exchange>,
    /// `t_matrix[i][j] = T(i, j)` for tracked `i, j`.
    t_matrix: Vec<Vec<Option<f64>>>,
    /// Recorded exchanges where `P_j` did not land on `i - j + 1`.
    pub identity_violations: usize,
    pub total_jumps: u64,
    /// Offsets up to which the window edges may have influenced the state.
    left_front: usize,
    right_front: usize,
}

const NO_SLOT: usize = usize::MAX;

/// Palm-conditioned initial state on `window = (lo, hi)`, recording exchanges
/// among `P_0..=P_tracked` and `H_0..=H_tracked`.
pub fn init_palm_conditioned(rho: f64, window: (i64, i64), tracked: usize, seed: u64) -> Result<TasepTrajectory> {
    check_density(rho)?;
    let (lo, hi) = window;
    if lo > 0 || hi < 1 {
        return Err(Error::Tasep(format!("window [{lo}, {hi}] must contain sites 0 and 1")));
    }
    let stream = SiteStream::new(seed);
    let len = (hi - lo + 1) as usize;
    let occ: Vec<bool> = (lo..=hi).map(|x| occupied(&stream, rho, x)).collect();
    let mut label = vec![0i64; len];
    let origin = (-lo) as usize;
    let (mut p, mut h) = (0i64, 0i64);
    for k in (0..=origin).rev() {
        // Scanning left from the origin: holes count down, particles up.
        if occ[k] {
            p += 1;
            label[k] = p;
        } else {
            label[k] = h;
            h -= 1;
        }
    }
    let (mut p, mut h) = (0i64, 0i64);
    for k in origin + 1..len {
        if occ[k] {
            label[k] = p;
            p -= 1;
        } else {
            h += 1;
            label[k] = h;
        }
    }
    let mut traj = TasepTrajectory {
        rho,
        lo,
        occ,
        label,
        tracked,
        t: 0.0,
        rng: sequential(derive_seed(seed, "tasep-clocks", 0)),
        active: Vec::new(),
        slot: vec![NO_SLOT; len],
        events: Vec::new(),
        t_matrix: vec![vec![None; tracked + 1]; tracked + 1],
        identity_violations: 0,
        total_jumps: 0,
        left_front: 0,
        right_front: len - 1,
    };
    traj.t_matrix[0][0] = Some(0.0);
    for k in 0..len.saturating_sub(1) {
        traj.refresh(k);
    }
    Ok(traj)
}

impl TasepTrajectory {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.lo + self.occ.len() as i64 - 1)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn is_occupied(&self, x: i64) -> bool {
        self.occ[(x - self.lo) as usize]
    }

    pub fn particle_position(&self, j: i64) -> Option<i64> {
        self.find(true, j)
    }

    pub fn hole_position(&self, i: i64) -> Option<i64> {
        self.find(false, i)
    }

    fn find(&self, particle: bool, l: i64) -> Option<i64> {
        (0..self.occ.len()).find(|&k| self.occ[k] == particle && self.label[k] == l).map(|k| k as i64 + self.lo)
    }

    /// `T(i, j)` if the exchange of `H_i` and `P_j` has been observed.
    pub fn exchange_time(&self, i: usize, j: usize) -> Option<f64> {
        self.t_matrix.get(i)?.get(j).copied().flatten()
    }

    pub fn tracked(&self) -> usize {
        self.tracked
    }

    /// Particle labels decrease and hole labels increase by exactly one from
    /// left to right.
    pub fn labels_ordered(&self) -> bool {
        let mut last_p: Option<i64> = None;
        let mut last_h: Option<i64> = None;
        for (k, &o) in self.occ.iter().enumerate() {
            let (prev, step) = if o { (&mut last_p, -1) } else { (&mut last_h, 1) };
            if let Some(v) = *prev {
                if self.label[k] != v + step {
                    return false;
                }
            }
            *prev = Some(self.label[k]);
        }
        true
    }

    fn refresh(&mut self, k: usize) {
        let want = k + 1 < self.occ.len() && self.occ[k] && !self.occ[k + 1];
        let has = self.slot[k] != NO_SLOT;
        if want && !has {
            self.slot[k] = self.active.len();
            self.active.push(k);
        } else if !want && has {
            let s = self.slot[k];
            let last = *self.active.last().expect("slot implies nonempty");
            self.active.swap_remove(s);
            if last != k {
                self.slot[last] = s;
            }
            self.slot[k] = NO_SLOT;
        }
    }

    fn is_tracked(&self, l: i64) -> bool {
        (0..=self.tracked as i64).contains(&l)
    }

    /// Perform the next jump if it happens by `horizon`.
    ///
    /// Each `(1, 0)` pair flips at rate 1, so the next event comes after an
    /// `Exp(#pairs)` wait at a uniformly chosen pair.
    pub fn step(&mut self, horizon: f64) -> Option<Exchange> {
        if self.active.is_empty() {
            return None;
        }
        let u: f64 = self.rng.gen();
        let wait = -(1.0 - u).ln() / self.active.len() as f64;
        if self.t + wait > horizon {
            return None;
        }
        self.t += wait;
        let k = self.active[self.rng.gen_range(0..self.active.len())];
        self.occ.swap(k, k + 1);
        self.label.swap(k, k + 1);
        self.total_jumps += 1;
        for x in [k.wrapping_sub(1), k, k + 1] {
            if x < self.occ.len() {
                self.refresh(x);
            }
        }
        let ex = Exchange { t: self.t, particle: self.label[k + 1], hole: self.label[k], site: k as i64 + 1 + self.lo };
        let (pt, ht) = (self.is_tracked(ex.particle), self.is_tracked(ex.hole));
        if pt || ht {
            self.events.push(ex);
        }
        if pt && ht {
            let (i, j) = (ex.hole, ex.particle);
            self.t_matrix[i as usize][j as usize] = Some(ex.t);
            if ex.site != i - j + 1 {
                self.identity_violations += 1;
            }
        }
        Some(ex)
    }

    /// Run to `horizon`.
    ///
    /// The window edges differ from the infinite lattice (nothing enters or
    /// leaves), and that difference spreads inward one site per jump across
    /// the edge at its front. The run fails if a tracked label is ever
    /// inside that contaminated region, since its motion may then be wrong.
    pub fn simulate(mut self, horizon: f64) -> Result<Self> {
        if self.contaminated_tracked() {
            return Err(Error::Tasep("tracked label starts at the window edge".into()));
        }
        while let Some(ex) = self.step(horizon) {
            let k = (ex.site - 1 - self.lo) as usize;
            if k == self.left_front {
                self.left_front += 1;
            }
            if k + 1 == self.right_front {
                self.right_front -= 1;
            }
            if (k <= self.left_front || k + 1 >= self.right_front) && self.contaminated_tracked() {
                return Err(Error::Tasep(format!("boundary influence reached a tracked label at t={}", ex.t)));
            }
        }
        self.t = horizon;
        Ok(self)
    }

    fn contaminated_tracked(&self) -> bool {
        let hit = |k: usize| self.is_tracked(self.label[k]);
        (0..=self.left_front).any(hit) || (self.right_front..self.occ.len()).any(hit)
    }
}

/// Jump times of `P_0` and of `H_0`.
pub fn burke_marginals(traj: &TasepTrajectory) -> (Vec<f64>, Vec<f64>) {
    let p0 = traj.events.iter().filter(|e| e.particle == 0).map(|e| e.t).collect();
    let h0 = traj.events.iter().filter(|e| e.hole == 0).map(|e| e.t).collect();
    (p0, h0)
}

/// Event log as `t,kind,label,site`, one row per tracked participant; the
/// site is the position after the exchange.
pub fn write_event_log<W: Write>(traj: &TasepTrajectory, out: &mut W) -> Result<()> {
    writeln!(out, "t,kind,label,site")?;
    for e in &traj.events {
        if traj.is_tracked(e.particle) {
            writeln!(out, "{},P,{},{}", e.t, e.particle, e.site)?;
        }
        if traj.is_tracked(e.hole) {
            writeln!(out, "{},H,{},{}", e.t, e.hole, e.site - 1)?;
        }
    }
    Ok(())
}

/// Exchange-time matrix as `i,j,T` rows; unobserved exchanges have an empty `T`.
pub fn write_t_matrix<W: Write>(traj: &TasepTrajectory, out: &mut W) -> Result<()> {
    writeln!(out, "i,j,T")?;
    for (i, row) in traj.t_matrix.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            match v {
                Some(t) => writeln!(out, "{i},{j},{t}")?,
                None => writeln!(out, "{i},{j},")?,
            }
        }
    }
    Ok(())
}
