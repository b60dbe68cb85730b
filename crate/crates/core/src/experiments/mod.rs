//! Monte Carlo experiments and their reports.
//!
//! Every sample `k` of an experiment draws its randomness from
//! `derive_seed(master, experiment tag, k)`, samples are generated in
//! parallel and gathered in index order, and all reductions run
//! sequentially afterwards, so a report depends only on its configuration.

mod bridge;
mod burke;
mod equilibrium;
mod rarefaction;
mod report;

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lpp::TiePolicy;
use crate::rng::derive_seed;
use crate::weights::{check_density, BoundaryKind, Reduction};

pub use bridge::{tasep_bridge, BridgeSettings};
pub use burke::{burke_increment_test, DownRightPath};
pub use equilibrium::{
    exit_tail, mean_formula_check, variance_comparison_check, variance_identity_check, variance_scaling,
    zstar_distribution_check,
};
pub use rarefaction::{rarefaction_fluctuations, transversal_fluctuations, zeroed_boundary_bounds};
pub use report::{emit_plot_data, read_report_csv, Check, EstimatorReport, Row, StoredReport, REPORT_SCHEMA};

/// Boundary family for an experiment; rarefaction multipliers are uniform
/// per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryChoice {
    Equilibrium,
    Rarefaction { south: f64, west: f64 },
    ZeroWest,
    ZeroSouth,
    ZeroBoth,
}

impl BoundaryChoice {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "equilibrium" => Ok(Self::Equilibrium),
            "rarefaction" => Ok(Self::Rarefaction { south: 0.5, west: 0.5 }),
            "zero-west" => Ok(Self::ZeroWest),
            "zero-south" => Ok(Self::ZeroSouth),
            "zero-both" => Ok(Self::ZeroBoth),
            other => Err(Error::Config(format!("unknown boundary {other}"))),
        }
    }

    /// The kind to apply on top of an equilibrium array at `rho`, or `None`
    /// for equilibrium itself.
    pub fn kind(&self, rho: f64, m: usize, n: usize) -> Result<Option<BoundaryKind>> {
        Ok(match *self {
            Self::Equilibrium => None,
            Self::Rarefaction { south, west } => {
                let density = BoundaryKind::equilibrium(rho)?.density().expect("equilibrium has a density");
                Some(BoundaryKind::Rarefaction { density, reduction: Reduction::uniform(south, west, m, n) })
            }
            Self::ZeroWest => Some(BoundaryKind::ZeroWest),
            Self::ZeroSouth => Some(BoundaryKind::ZeroSouth),
            Self::ZeroBoth => Some(BoundaryKind::ZeroBoth),
        })
    }
}

impl fmt::Display for BoundaryChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Equilibrium => write!(f, "equilibrium"),
            Self::Rarefaction { south, west } => write!(f, "rarefaction({south},{west})"),
            Self::ZeroWest => write!(f, "zero-west"),
            Self::ZeroSouth => write!(f, "zero-south"),
            Self::ZeroBoth => write!(f, "zero-both"),
        }
    }
}

/// Statistical levels shared by all verdicts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    /// Significance level of each individual test.
    pub alpha: f64,
    /// Multiple of the combined standard error allowed for identities.
    pub se_multiplier: f64,
    /// Confidence level of regression intervals and binomial bounds.
    pub confidence: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { alpha: 0.01, se_multiplier: 3.0, confidence: 0.95 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub rho: f64,
    pub t_grid: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub boundary: BoundaryChoice,
    pub tolerance: Tolerance,
    pub tie: TiePolicy,
    /// Fixed rectangle for experiments that do not follow the characteristic.
    pub dims: Option<(usize, usize)>,
}

impl ExperimentConfig {
    pub fn new(name: &str, rho: f64, t_grid: Vec<f64>, samples: usize, seed: u64) -> Self {
        Self {
            name: name.to_string(),
            rho,
            t_grid,
            samples,
            seed,
            boundary: BoundaryChoice::Equilibrium,
            tolerance: Tolerance::default(),
            tie: TiePolicy::Rightmost,
            dims: None,
        }
    }

    pub fn with_dims(mut self, m: usize, n: usize) -> Self {
        self.dims = Some((m, n));
        self
    }

    pub fn with_boundary(mut self, b: BoundaryChoice) -> Self {
        self.boundary = b;
        self
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        check_density(self.rho)?;
        if self.samples < 2 {
            return Err(Error::TooFewSamples { got: self.samples, need: 2 });
        }
        if self.t_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("t-grid must be strictly increasing".into()));
        }
        if self.t_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Config("t-grid values must be positive".into()));
        }
        if let BoundaryChoice::Rarefaction { south, west } = self.boundary {
            for c in [south, west] {
                if !(0.0..=1.0).contains(&c) {
                    return Err(Error::Multiplier(c));
                }
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> Result<(usize, usize)> {
        self.dims.ok_or_else(|| Error::Config(format!("{} needs m and n", self.name)))
    }

    pub fn single_t(&self) -> Result<f64> {
        match self.t_grid.as_slice() {
            [t] => Ok(*t),
            _ => Err(Error::Config(format!("{} needs exactly one t value", self.name))),
        }
    }

    /// Seed of sample `k` within the stream tagged `tag`.
    pub fn sample_seed(&self, tag: &str, k: usize) -> u64 {
        derive_seed(self.seed, tag, k as u64)
    }

    /// One-line description echoed into reports.
    pub fn describe(&self) -> String {
        let grid: Vec<String> = self.t_grid.iter().map(|t| t.to_string()).collect();
        let dims = self.dims.map(|(m, n)| format!(" m={m} n={n}")).unwrap_or_default();
        format!(
            "rho={} t=[{}] samples={} seed={} boundary={}{dims}",
            self.rho,
            grid.join(","),
            self.samples,
            self.seed,
            self.boundary
        )
    }
}

/// Evaluate `f` on sample indices `0..n` in parallel, returned in index order.
pub(crate) fn par_samples<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}
