//! Weight arrays on the lattice rectangle `[0..m] x [0..n]`.
//!
//! Site `(i, j)` is column `i`, row `j`; the i-axis (`j = 0`) is the south
//! boundary and the j-axis (`i = 0`) the west boundary. Exponentials are
//! always parametrised by rate, so `Exp(r)` has mean `1 / r`.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::rng::SiteStream;

/// Per-site multipliers applied to equilibrium axis weights.
///
/// `south[i - 1]` scales `omega(i, 0)` and `west[j - 1]` scales `omega(0, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub south: Vec<f64>,
    pub west: Vec<f64>,
}

impl Reduction {
    /// The same multiplier on every site of each axis.
    pub fn uniform(south: f64, west: f64, m: usize, n: usize) -> Self {
        Self { south: vec![south; m], west: vec![west; n] }
    }
}

/// Explicit axis values; same indexing as [`Reduction`].
#[derive(Clone, Debug, PartialEq)]
pub struct CustomBoundary {
    pub south: Vec<f64>,
    pub west: Vec<f64>,
}

/// A particle density in `(0, 1)` stored together with its complement, so
/// that transposition (`rho <-> 1 - rho`) is an exact involution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Density {
    rho: f64,
    complement: f64,
}

impl Density {
    pub fn new(rho: f64) -> Result<Self> {
        check_density(rho)?;
        Ok(Self { rho, complement: 1.0 - rho })
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.rho
    }

    /// `1 - rho`, the rate of the i-axis weights.
    #[inline]
    pub fn complement(self) -> f64 {
        self.complement
    }

    pub fn flipped(self) -> Self {
        Self { rho: self.complement, complement: self.rho }
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rho)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryKind {
    /// Axis weights `Exp(1 - rho)` on the i-axis and `Exp(rho)` on the j-axis.
    Equilibrium(Density),
    /// Equilibrium axes scaled down by per-site multipliers in `[0, 1]`.
    Rarefaction { density: Density, reduction: Reduction },
    ZeroWest,
    ZeroSouth,
    ZeroBoth,
    Custom(CustomBoundary),
}

impl BoundaryKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryKind::Equilibrium(_) => "equilibrium",
            BoundaryKind::Rarefaction { .. } => "rarefaction",
            BoundaryKind::ZeroWest => "zero-west",
            BoundaryKind::ZeroSouth => "zero-south",
            BoundaryKind::ZeroBoth => "zero-both",
            BoundaryKind::Custom(_) => "custom",
        }
    }

    /// Equilibrium with density `rho`.
    pub fn equilibrium(rho: f64) -> Result<Self> {
        Ok(BoundaryKind::Equilibrium(Density::new(rho)?))
    }

    pub fn density(&self) -> Option<Density> {
        match self {
            BoundaryKind::Equilibrium(d) | BoundaryKind::Rarefaction { density: d, .. } => Some(*d),
            _ => None,
        }
    }

    pub fn rho(&self) -> Option<f64> {
        self.density().map(Density::get)
    }

    fn transposed(&self) -> BoundaryKind {
        match self {
            BoundaryKind::Equilibrium(d) => BoundaryKind::Equilibrium(d.flipped()),
            BoundaryKind::Rarefaction { density, reduction } => BoundaryKind::Rarefaction {
                density: density.flipped(),
                reduction: Reduction { south: reduction.west.clone(), west: reduction.south.clone() },
            },
            BoundaryKind::ZeroWest => BoundaryKind::ZeroSouth,
            BoundaryKind::ZeroSouth => BoundaryKind::ZeroWest,
            BoundaryKind::ZeroBoth => BoundaryKind::ZeroBoth,
            BoundaryKind::Custom(c) => {
                BoundaryKind::Custom(CustomBoundary { south: c.west.clone(), west: c.south.clone() })
            }
        }
    }
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rho() {
            Some(rho) => write!(f, "{}({rho})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

pub fn check_density(rho: f64) -> Result<f64> {
    if rho > 0.0 && rho < 1.0 {
        Ok(rho)
    } else {
        Err(Error::Density(rho))
    }
}

/// Record of the site stream a seeded array was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub seed: u64,
    /// Set when the array is the transpose of a sampled array.
    pub transposed: bool,
}

impl Provenance {
    /// The uniform that produced the weight now stored at `(i, j)`.
    pub fn uniform(&self, i: usize, j: usize) -> f64 {
        let s = SiteStream::new(self.seed);
        if self.transposed {
            s.uniform(j, i)
        } else {
            s.uniform(i, j)
        }
    }

    fn std_exp(&self, i: usize, j: usize) -> f64 {
        -self.uniform(i, j).ln()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightArray {
    m: usize,
    n: usize,
    boundary: BoundaryKind,
    omega: Vec<f64>,
    provenance: Option<Provenance>,
}

impl WeightArray {
    /// Build an array from explicit values, row-major with `omega[j * (m + 1) + i]`.
    pub fn from_parts(m: usize, n: usize, boundary: BoundaryKind, omega: Vec<f64>) -> Result<Self> {
        if omega.len() != (m + 1) * (n + 1) {
            return Err(Error::Mismatch(format!(
                "expected {} weights for {m}x{n}, got {}",
                (m + 1) * (n + 1),
                omega.len()
            )));
        }
        let w = Self { m, n, boundary, omega, provenance: None };
        w.validate()?;
        Ok(w)
    }

    /// Build from a closure over sites; `f(0, 0)` is ignored and stored as 0.
    pub fn from_fn(m: usize, n: usize, boundary: BoundaryKind, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut omega = Vec::with_capacity((m + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=m {
                omega.push(if i == 0 && j == 0 { 0.0 } else { f(i, j) });
            }
        }
        Self::from_parts(m, n, boundary, omega)
    }

    fn validate(&self) -> Result<()> {
        for j in 0..=self.n {
            for i in 0..=self.m {
                let v = self.get(i, j);
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::Weight { i, j, value: v });
                }
            }
        }
        if self.get(0, 0) != 0.0 {
            return Err(Error::Weight { i: 0, j: 0, value: self.get(0, 0) });
        }
        let zero_south = matches!(self.boundary, BoundaryKind::ZeroSouth | BoundaryKind::ZeroBoth);
        let zero_west = matches!(self.boundary, BoundaryKind::ZeroWest | BoundaryKind::ZeroBoth);
        if zero_south {
            if let Some(i) = (1..=self.m).find(|&i| self.get(i, 0) != 0.0) {
                return Err(Error::Weight { i, j: 0, value: self.get(i, 0) });
            }
        }
        if zero_west {
            if let Some(j) = (1..=self.n).find(|&j| self.get(0, j) != 0.0) {
                return Err(Error::Weight { i: 0, j, value: self.get(0, j) });
            }
        }
        Ok(())
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn boundary(&self) -> &BoundaryKind {
        &self.boundary
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.omega[j * (self.m + 1) + i]
    }

    /// Row-major weights, `j * (m + 1) + i`.
    pub fn as_slice(&self) -> &[f64] {
        &self.omega
    }

    pub fn south(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.m).map(|i| self.get(i, 0))
    }

    pub fn west(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n).map(|j| self.get(0, j))
    }

    pub fn interior(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n).flat_map(move |j| (1..=self.m).map(move |i| self.get(i, j)))
    }

    /// Copy with a different boundary label and replaced axis values.
    fn with_axes(&self, boundary: BoundaryKind, south: impl Fn(usize) -> f64, west: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        out.boundary = boundary;
        for i in 1..=self.m {
            out.omega[i] = south(i);
        }
        for j in 1..=self.n {
            out.omega[j * (self.m + 1)] = west(j);
        }
        out
    }
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        Err(Error::Dimensions { m, n })
    } else {
        Ok(())
    }
}

/// Independent exponential weights with equilibrium axes at density `rho`.
///
/// Site `(i, j)` gets `-ln(U_ij) / rate` with `U_ij` from the seeded site stream.
pub fn sample_equilibrium(rho: f64, m: usize, n: usize, seed: u64) -> Result<WeightArray> {
    sample_equilibrium_at(Density::new(rho)?, m, n, seed)
}

pub fn sample_equilibrium_at(density: Density, m: usize, n: usize, seed: u64) -> Result<WeightArray> {
    check_dims(m, n)?;
    let site = equilibrium_sites(density, seed);
    let mut omega = Vec::with_capacity((m + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=m {
            omega.push(site(i, j));
        }
    }
    Ok(WeightArray {
        m,
        n,
        boundary: BoundaryKind::Equilibrium(density),
        omega,
        provenance: Some(Provenance { seed, transposed: false }),
    })
}

/// The weight [`sample_equilibrium`] puts at `(i, j)`, computed on demand.
pub fn equilibrium_sites(density: Density, seed: u64) -> impl Fn(usize, usize) -> f64 {
    let stream = SiteStream::new(seed);
    move |i, j| match (i, j) {
        (0, 0) => 0.0,
        (_, 0) => stream.exp(i, 0, density.complement()),
        (0, _) => stream.exp(0, j, density.get()),
        _ => stream.std_exp(i, j),
    }
}

/// Move an equilibrium array from density `rho` to `lambda` on the same randomness.
///
/// The i-axis is scaled by `(1 - rho) / (1 - lambda)`, the j-axis by
/// `rho / lambda`, the interior is untouched. Seeded arrays are regenerated
/// from their stored uniforms, which realises the same scaling without
/// accumulating rounding across repeated couplings.
pub fn couple_density(w: &WeightArray, lambda: f64) -> Result<WeightArray> {
    couple_density_at(w, Density::new(lambda)?)
}

pub fn couple_density_at(w: &WeightArray, lambda: Density) -> Result<WeightArray> {
    let rho = match w.boundary {
        BoundaryKind::Equilibrium(d) => d,
        _ => return Err(Error::NotEquilibrium),
    };
    let kind = BoundaryKind::Equilibrium(lambda);
    let out = match w.provenance {
        Some(p) => w.with_axes(
            kind,
            |i| p.std_exp(i, 0) / lambda.complement(),
            |j| p.std_exp(0, j) / lambda.get(),
        ),
        None => {
            let fs = rho.complement() / lambda.complement();
            let fw = rho.get() / lambda.get();
            w.with_axes(kind, |i| w.get(i, 0) * fs, |j| w.get(0, j) * fw)
        }
    };
    Ok(out)
}

/// Replace or rescale the axes of `w` according to `kind`; the interior is kept.
pub fn apply_boundary(w: &WeightArray, kind: &BoundaryKind) -> Result<WeightArray> {
    let (m, n) = (w.m, w.n);
    match kind {
        BoundaryKind::Equilibrium(_) => {
            Err(Error::Config("apply_boundary cannot produce an equilibrium boundary; sample one".into()))
        }
        BoundaryKind::Rarefaction { density, reduction } => {
            match w.boundary {
                BoundaryKind::Equilibrium(base) if base == *density => {}
                _ => return Err(Error::NotEquilibrium),
            }
            if reduction.south.len() != m || reduction.west.len() != n {
                return Err(Error::Mismatch(format!(
                    "reduction has {}+{} multipliers, lattice needs {m}+{n}",
                    reduction.south.len(),
                    reduction.west.len()
                )));
            }
            if let Some(&bad) = reduction.south.iter().chain(&reduction.west).find(|&&c| !(0.0..=1.0).contains(&c)) {
                return Err(Error::Multiplier(bad));
            }
            Ok(w.with_axes(kind.clone(), |i| w.get(i, 0) * reduction.south[i - 1], |j| w.get(0, j) * reduction.west[j - 1]))
        }
        BoundaryKind::ZeroWest => Ok(w.with_axes(kind.clone(), |i| w.get(i, 0), |_| 0.0)),
        BoundaryKind::ZeroSouth => Ok(w.with_axes(kind.clone(), |_| 0.0, |j| w.get(0, j))),
        BoundaryKind::ZeroBoth => Ok(w.with_axes(kind.clone(), |_| 0.0, |_| 0.0)),
        BoundaryKind::Custom(c) => {
            if c.south.len() != m || c.west.len() != n {
                return Err(Error::Mismatch(format!(
                    "custom boundary has {}+{} values, lattice needs {m}+{n}",
                    c.south.len(),
                    c.west.len()
                )));
            }
            let out = w.with_axes(kind.clone(), |i| c.south[i - 1], |j| c.west[j - 1]);
            out.validate()?;
            Ok(out)
        }
    }
}

/// `omega'(i, j) = omega(j, i)`; equilibrium density `rho` becomes `1 - rho`.
pub fn transpose(w: &WeightArray) -> WeightArray {
    let (m, n) = (w.n, w.m);
    let mut omega = Vec::with_capacity(w.omega.len());
    for j in 0..=n {
        for i in 0..=m {
            omega.push(w.get(j, i));
        }
    }
    WeightArray {
        m,
        n,
        boundary: w.boundary.transposed(),
        omega,
        provenance: w.provenance.map(|p| Provenance { seed: p.seed, transposed: !p.transposed }),
    }
}

/// CSV form: a header record `m,n,kind,rho,seed`, then `i,j,omega` rows.
pub fn write_csv<W: Write>(w: &WeightArray, out: &mut W) -> Result<()> {
    writeln!(out, "m,n,kind,rho,seed")?;
    let rho = w.boundary.rho().map(|r| r.to_string()).unwrap_or_default();
    let seed = w.provenance.map(|p| p.seed.to_string()).unwrap_or_default();
    writeln!(out, "{},{},{},{},{}", w.m, w.n, w.boundary.name(), rho, seed)?;
    writeln!(out, "i,j,omega")?;
    for j in 0..=w.n {
        for i in 0..=w.m {
            writeln!(out, "{i},{j},{}", w.get(i, j))?;
        }
    }
    Ok(())
}

/// Parse the CSV form. Rarefaction and custom arrays come back as `Custom`
/// with their axis values, since multipliers are not stored.
pub fn read_csv<R: BufRead>(input: R) -> Result<WeightArray> {
    let lines: Vec<String> = input.lines().collect::<std::io::Result<_>>()?;
    let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    if lines.len() < 3 || lines[0].trim() != "m,n,kind,rho,seed" || lines[2].trim() != "i,j,omega" {
        return Err(perr(1, "missing weight CSV headers"));
    }
    let meta: Vec<&str> = lines[1].trim().split(',').collect();
    if meta.len() != 5 {
        return Err(perr(2, "expected 5 metadata fields"));
    }
    let m: usize = meta[0].parse().map_err(|_| perr(2, "bad m"))?;
    let n: usize = meta[1].parse().map_err(|_| perr(2, "bad n"))?;
    let rho: Option<f64> = if meta[3].is_empty() { None } else { Some(meta[3].parse().map_err(|_| perr(2, "bad rho"))?) };
    let seed: Option<u64> = if meta[4].is_empty() { None } else { Some(meta[4].parse().map_err(|_| perr(2, "bad seed"))?) };
    let mut omega = vec![f64::NAN; (m + 1) * (n + 1)];
    for (k, line) in lines.iter().enumerate().skip(3) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 3 {
            return Err(perr(k + 1, "expected i,j,omega"));
        }
        let i: usize = f[0].parse().map_err(|_| perr(k + 1, "bad i"))?;
        let j: usize = f[1].parse().map_err(|_| perr(k + 1, "bad j"))?;
        let v: f64 = f[2].parse().map_err(|_| perr(k + 1, "bad omega"))?;
        if i > m || j > n {
            return Err(perr(k + 1, "site outside lattice"));
        }
        omega[j * (m + 1) + i] = v;
    }
    let south: Vec<f64> = (1..=m).map(|i| omega[i]).collect();
    let west: Vec<f64> = (1..=n).map(|j| omega[j * (m + 1)]).collect();
    let kind = match (meta[2], rho) {
        ("equilibrium", Some(rho)) => BoundaryKind::equilibrium(rho)?,
        ("zero-west", _) => BoundaryKind::ZeroWest,
        ("zero-south", _) => BoundaryKind::ZeroSouth,
        ("zero-both", _) => BoundaryKind::ZeroBoth,
        ("rarefaction", _) | ("custom", _) => BoundaryKind::Custom(CustomBoundary { south, west }),
        (other, _) => return Err(perr(2, &format!("unknown kind {other}"))),
    };
    let mut w = WeightArray::from_parts(m, n, kind, omega)?;
    if let (Some(seed), BoundaryKind::Equilibrium(d)) = (seed, &w.boundary) {
        // Only trust the seed if it regenerates the stored values exactly.
        let fresh = sample_equilibrium_at(*d, m, n, seed)?;
        if fresh.omega == w.omega {
            w.provenance = fresh.provenance;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_zero_and_rest_positive() {
        let w = sample_equilibrium(0.5, 2, 2, 42).unwrap();
        assert_eq!(w.get(0, 0), 0.0);
        let positive = w.as_slice().iter().filter(|&&v| v > 0.0).count();
        assert_eq!(positive, 8);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_equilibrium(0.3, 9, 4, 5).unwrap();
        let b = sample_equilibrium(0.3, 9, 4, 5).unwrap();
        assert_eq!(a, b);
        let c = sample_equilibrium(0.3, 9, 4, 6).unwrap();
        assert_ne!(a.as_slice(), c.as_slice());
    }

    #[test]
    fn sampling_errors() {
        assert!(matches!(sample_equilibrium(0.0, 2, 2, 1), Err(Error::Density(_))));
        assert!(matches!(sample_equilibrium(1.0, 2, 2, 1), Err(Error::Density(_))));
        assert!(matches!(sample_equilibrium(0.5, 0, 2, 1), Err(Error::Dimensions { .. })));
    }

    #[test]
    fn south_axis_mean() {
        // 10^5 draws of Exp(0.7) have mean 1/0.7 and standard error (1/0.7)/sqrt(1e5).
        let mut sum = 0.0;
        let draws = 100_000;
        for s in 0..100u64 {
            let w = sample_equilibrium(0.3, 1000, 1, s).unwrap();
            sum += w.south().sum::<f64>();
        }
        let mean = sum / draws as f64;
        let se = (1.0 / 0.7) / (draws as f64).sqrt();
        assert!((mean - 1.0 / 0.7).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn coupling_identity_and_factors() {
        let w = sample_equilibrium(0.5, 6, 5, 3).unwrap();
        assert_eq!(couple_density(&w, 0.5).unwrap(), w);
        let c = couple_density(&w, 0.75).unwrap();
        assert_eq!(c.boundary().rho(), Some(0.75));
        for i in 1..=6 {
            assert_eq!(c.get(i, 0), 2.0 * w.get(i, 0));
        }
        for j in 1..=5 {
            let expect = w.get(0, j) * (2.0 / 3.0);
            assert!((c.get(0, j) - expect).abs() <= 4.0 * f64::EPSILON * expect);
        }
        assert!(w.interior().eq(c.interior()));
    }

    #[test]
    fn coupling_without_provenance_scales() {
        let w = sample_equilibrium(0.5, 3, 3, 3).unwrap();
        let bare = WeightArray::from_parts(3, 3, w.boundary().clone(), w.as_slice().to_vec()).unwrap();
        let c = couple_density(&bare, 0.75).unwrap();
        for i in 1..=3 {
            assert_eq!(c.get(i, 0), 2.0 * w.get(i, 0));
        }
    }

    #[test]
    fn coupling_round_trip_within_ulp() {
        for seed in 0..20 {
            let w = sample_equilibrium(0.35, 8, 8, seed).unwrap();
            let back = couple_density(&couple_density(&w, 0.8).unwrap(), 0.35).unwrap();
            for (a, b) in w.as_slice().iter().zip(back.as_slice()) {
                assert!((a - b).abs() <= f64::EPSILON * a.abs(), "{a} vs {b}");
            }
            let bare = WeightArray::from_parts(8, 8, w.boundary().clone(), w.as_slice().to_vec()).unwrap();
            let back = couple_density(&couple_density(&bare, 0.8).unwrap(), 0.35).unwrap();
            for (a, b) in w.as_slice().iter().zip(back.as_slice()) {
                assert!((a - b).abs() <= 2.0 * f64::EPSILON * a.abs(), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn coupling_rejects_non_equilibrium() {
        let w = sample_equilibrium(0.5, 3, 3, 3).unwrap();
        let z = apply_boundary(&w, &BoundaryKind::ZeroBoth).unwrap();
        assert!(matches!(couple_density(&z, 0.6), Err(Error::NotEquilibrium)));
    }

    #[test]
    fn zero_boundaries() {
        let w = sample_equilibrium(0.4, 5, 4, 9).unwrap();
        let z = apply_boundary(&w, &BoundaryKind::ZeroBoth).unwrap();
        assert!(z.south().all(|v| v == 0.0) && z.west().all(|v| v == 0.0));
        assert!(z.interior().eq(w.interior()));
        let zw = apply_boundary(&w, &BoundaryKind::ZeroWest).unwrap();
        assert!(zw.west().all(|v| v == 0.0) && zw.south().eq(w.south()));
        let zs = apply_boundary(&w, &BoundaryKind::ZeroSouth).unwrap();
        assert!(zs.south().all(|v| v == 0.0) && zs.west().eq(w.west()));
    }

    #[test]
    fn rarefaction_multipliers() {
        let w = sample_equilibrium(0.4, 5, 4, 9).unwrap();
        let density = Density::new(0.4).unwrap();
        let ones = BoundaryKind::Rarefaction { density, reduction: Reduction::uniform(1.0, 1.0, 5, 4) };
        let same = apply_boundary(&w, &ones).unwrap();
        assert_eq!(same.as_slice(), w.as_slice());
        let half = BoundaryKind::Rarefaction { density, reduction: Reduction::uniform(0.5, 1.0, 5, 4) };
        let r = apply_boundary(&w, &half).unwrap();
        for i in 1..=5 {
            assert_eq!(r.get(i, 0), 0.5 * w.get(i, 0));
            assert!(r.get(i, 0) <= w.get(i, 0));
        }
        let bad = BoundaryKind::Rarefaction { density, reduction: Reduction::uniform(1.5, 1.0, 5, 4) };
        assert!(matches!(apply_boundary(&w, &bad), Err(Error::Multiplier(_))));
        let short = BoundaryKind::Rarefaction { density, reduction: Reduction::uniform(0.5, 1.0, 4, 4) };
        assert!(matches!(apply_boundary(&w, &short), Err(Error::Mismatch(_))));
    }

    #[test]
    fn custom_boundary() {
        let w = sample_equilibrium(0.4, 2, 3, 9).unwrap();
        let c = BoundaryKind::Custom(CustomBoundary { south: vec![1.0, 2.0], west: vec![3.0, 4.0, 5.0] });
        let out = apply_boundary(&w, &c).unwrap();
        assert_eq!(out.get(2, 0), 2.0);
        assert_eq!(out.get(0, 3), 5.0);
        let neg = BoundaryKind::Custom(CustomBoundary { south: vec![-1.0, 2.0], west: vec![3.0, 4.0, 5.0] });
        assert!(apply_boundary(&w, &neg).is_err());
    }

    #[test]
    fn transpose_behaviour() {
        let w = sample_equilibrium(0.3, 4, 7, 1).unwrap();
        let t = transpose(&w);
        assert_eq!((t.m(), t.n()), (7, 4));
        assert_eq!(t.boundary().rho(), Some(0.7));
        assert_eq!(t.get(5, 0), w.get(0, 5));
        assert_eq!(transpose(&t), w);
        // The transposed array still carries enough provenance to couple exactly.
        let c = couple_density(&t, 0.9).unwrap();
        assert!((c.get(3, 0) - t.get(3, 0) * 0.3 / 0.1).abs() < 1e-12 * c.get(3, 0));
    }

    #[test]
    fn csv_round_trip() {
        let w = sample_equilibrium(0.3, 3, 2, 77).unwrap();
        let mut buf = Vec::new();
        write_csv(&w, &mut buf).unwrap();
        let back = read_csv(&buf[..]).unwrap();
        assert_eq!(back, w);
        let z = apply_boundary(&w, &BoundaryKind::ZeroWest).unwrap();
        let mut buf = Vec::new();
        write_csv(&z, &mut buf).unwrap();
        assert_eq!(read_csv(&buf[..]).unwrap().as_slice(), z.as_slice());
    }

    #[test]
    fn from_parts_validates() {
        assert!(WeightArray::from_parts(1, 1, BoundaryKind::ZeroBoth, vec![0.0, 1.0, 0.0, 1.0]).is_err());
        assert!(WeightArray::from_parts(1, 1, BoundaryKind::ZeroBoth, vec![0.0, 0.0, 0.0, 1.0]).is_ok());
        assert!(WeightArray::from_parts(1, 1, BoundaryKind::ZeroBoth, vec![0.5, 0.0, 0.0, 1.0]).is_err());
        assert!(WeightArray::from_parts(1, 1, BoundaryKind::ZeroBoth, vec![0.0; 3]).is_err());
    }
}
