//! Experiment configuration files and the experiment dispatcher.
//!
//! Files are INI-style: `key = value` lines grouped under `[experiment]`,
//! `[tolerance]` and `[params]`. Unknown sections and keys are errors.
//!
//! ```text
//! [experiment]
//! name = variance-identity
//! rho = 0.6
//! m = 24
//! n = 16
//! samples = 100000
//! seed = 7
//!
//! [tolerance]
//! alpha = 0.01
//! ```

use std::path::Path;
use std::str::FromStr;

use ini::Ini;

use crate::error::{Error, Result};
use crate::experiments::{
    burke_increment_test, exit_tail, mean_formula_check, rarefaction_fluctuations, tasep_bridge,
    transversal_fluctuations, variance_comparison_check, variance_identity_check, variance_scaling,
    zeroed_boundary_bounds, zstar_distribution_check, BoundaryChoice, BridgeSettings, DownRightPath, EstimatorReport,
    ExperimentConfig,
};
use crate::lpp::TiePolicy;

/// Names accepted by [`run_experiment`].
pub const EXPERIMENTS: &[&str] = &[
    "mean-formula",
    "variance-identity",
    "variance-scaling",
    "exit-tail",
    "zstar-law",
    "rarefaction",
    "transversal",
    "burke",
    "variance-comparison",
    "zeroed-bounds",
    "tasep-bridge",
];

/// Parameters used by individual experiments on top of [`ExperimentConfig`].
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    /// Second density for `variance-comparison`.
    pub lambda: f64,
    /// Interior time for `transversal`; defaults to `t / 2`.
    pub s: Option<f64>,
    pub a_grid: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Largest admissible ratio of weighted tails.
    pub max_ratio: f64,
    /// Exponent in the `a^(3 alpha)` weights of `transversal`.
    pub tail_alpha: f64,
    /// Down-right path for `burke`.
    pub path: String,
    pub bridge: BridgeSettings,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            lambda: 0.6,
            s: None,
            a_grid: vec![0.5, 1.0, 1.5, 2.0],
            deltas: vec![0.05, 0.1, 0.2],
            max_ratio: 5.0,
            tail_alpha: 0.9,
            path: "north-east".into(),
            bridge: BridgeSettings::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub config: ExperimentConfig,
    pub params: Params,
}

impl ExperimentSpec {
    pub fn new(config: ExperimentConfig) -> Self {
        Self { config, params: Params::default() }
    }

    /// Every setting as configuration text that [`parse_config`] reads back
    /// to an equal spec.
    pub fn to_ini(&self) -> String {
        let c = &self.config;
        let p = &self.params;
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut s = String::from("[experiment]\n");
        s += &format!("name = {}\nrho = {}\n", c.name, c.rho);
        if !c.t_grid.is_empty() {
            s += &format!("t = {}\n", list(&c.t_grid));
        }
        s += &format!("samples = {}\nseed = {}\nboundary = {}\n", c.samples, c.seed, boundary_key(c.boundary));
        s += &format!("tie = {}\n", if c.tie == TiePolicy::Rightmost { "rightmost" } else { "leftmost" });
        if let Some((m, n)) = c.dims {
            s += &format!("m = {m}\nn = {n}\n");
        }
        s += "\n[tolerance]\n";
        s += &format!(
            "alpha = {}\nse_multiplier = {}\nconfidence = {}\n",
            c.tolerance.alpha, c.tolerance.se_multiplier, c.tolerance.confidence
        );
        s += "\n[params]\n";
        s += &format!("lambda = {}\n", p.lambda);
        if let Some(v) = p.s {
            s += &format!("s = {v}\n");
        }
        s += &format!("a_grid = {}\ndeltas = {}\n", list(&p.a_grid), list(&p.deltas));
        s += &format!("max_ratio = {}\ntail_alpha = {}\npath = {}\n", p.max_ratio, p.tail_alpha, p.path);
        s += &format!(
            "tracked = {}\nhorizon = {}\nmin_passing_cells = {}\npooled_interarrivals = {}\n",
            p.bridge.tracked, p.bridge.horizon, p.bridge.min_passing_cells, p.bridge.pooled_interarrivals
        );
        if let BoundaryChoice::Rarefaction { south, west } = c.boundary {
            s += &format!("south_multiplier = {south}\nwest_multiplier = {west}\n");
        }
        s
    }
}

fn boundary_key(b: BoundaryChoice) -> &'static str {
    match b {
        BoundaryChoice::Equilibrium => "equilibrium",
        BoundaryChoice::Rarefaction { .. } => "rarefaction",
        BoundaryChoice::ZeroWest => "zero-west",
        BoundaryChoice::ZeroSouth => "zero-south",
        BoundaryChoice::ZeroBoth => "zero-both",
    }
}

fn parse<T: FromStr>(section: &str, key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("{section}.{key}: cannot parse {value:?}")))
}

/// Comma-separated list of numbers.
pub fn parse_list(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| Error::Config(format!("bad number {s:?} in list"))))
        .collect()
}

/// Parse a configuration from text. Missing keys keep their defaults; the
/// `experiment.name` key is required.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let ini = Ini::load_from_str(text).map_err(|e| Error::Parse { line: e.line, msg: e.msg.to_string() })?;
    let mut c = ExperimentConfig::new("", 0.5, vec![], 1000, 0);
    let mut p = Params::default();
    let (mut m, mut n) = (None, None);
    let mut multipliers: (Option<f64>, Option<f64>) = (None, None);
    for (section, props) in ini.iter() {
        let section = section.unwrap_or("");
        for (key, value) in props.iter() {
            match (section, key) {
                ("experiment", "name") => c.name = value.trim().to_string(),
                ("experiment", "rho") => c.rho = parse(section, key, value)?,
                ("experiment", "t") => c.t_grid = parse_list(value)?,
                ("experiment", "samples") => c.samples = parse(section, key, value)?,
                ("experiment", "seed") => c.seed = parse(section, key, value)?,
                ("experiment", "boundary") => c.boundary = BoundaryChoice::parse(value.trim())?,
                ("experiment", "tie") => c.tie = value.trim().parse()?,
                ("experiment", "m") => m = Some(parse(section, key, value)?),
                ("experiment", "n") => n = Some(parse(section, key, value)?),
                ("tolerance", "alpha") => c.tolerance.alpha = parse(section, key, value)?,
                ("tolerance", "se_multiplier") => c.tolerance.se_multiplier = parse(section, key, value)?,
                ("tolerance", "confidence") => c.tolerance.confidence = parse(section, key, value)?,
                ("params", "lambda") => p.lambda = parse(section, key, value)?,
                ("params", "s") => p.s = Some(parse(section, key, value)?),
                ("params", "a_grid") => p.a_grid = parse_list(value)?,
                ("params", "deltas") => p.deltas = parse_list(value)?,
                ("params", "max_ratio") => p.max_ratio = parse(section, key, value)?,
                ("params", "tail_alpha") => p.tail_alpha = parse(section, key, value)?,
                ("params", "path") => p.path = value.trim().to_string(),
                ("params", "tracked") => p.bridge.tracked = parse(section, key, value)?,
                ("params", "horizon") => p.bridge.horizon = parse(section, key, value)?,
                ("params", "min_passing_cells") => p.bridge.min_passing_cells = parse(section, key, value)?,
                ("params", "pooled_interarrivals") => p.bridge.pooled_interarrivals = parse(section, key, value)?,
                ("params", "south_multiplier") => multipliers.0 = Some(parse(section, key, value)?),
                ("params", "west_multiplier") => multipliers.1 = Some(parse(section, key, value)?),
                ("", _) => return Err(Error::Config(format!("key {key:?} outside a section"))),
                _ => return Err(Error::Config(format!("unknown key {section}.{key}"))),
            }
        }
    }
    match (m, n) {
        (Some(m), Some(n)) => c.dims = Some((m, n)),
        (None, None) => {}
        _ => return Err(Error::Config("m and n must be given together".into())),
    }
    if let BoundaryChoice::Rarefaction { south, west } = &mut c.boundary {
        *south = multipliers.0.unwrap_or(*south);
        *west = multipliers.1.unwrap_or(*west);
    } else if multipliers != (None, None) {
        return Err(Error::Config("multipliers need boundary = rarefaction".into()));
    }
    if c.name.is_empty() {
        return Err(Error::Config("experiment.name is required".into()));
    }
    Ok(ExperimentSpec { config: c, params: p })
}

pub fn load_config(path: &Path) -> Result<ExperimentSpec> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Run the experiment named in `spec.config.name`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<EstimatorReport> {
    let cfg = &spec.config;
    let p = &spec.params;
    cfg.validate()?;
    match cfg.name.as_str() {
        "mean-formula" => mean_formula_check(cfg),
        "variance-identity" => variance_identity_check(cfg),
        "variance-scaling" => variance_scaling(cfg),
        "exit-tail" => exit_tail(cfg, &p.a_grid, &p.deltas, p.max_ratio),
        "zstar-law" => zstar_distribution_check(cfg),
        "rarefaction" => rarefaction_fluctuations(cfg),
        "transversal" => {
            let s = p.s.unwrap_or(cfg.single_t()? / 2.0);
            transversal_fluctuations(cfg, s, &p.a_grid, p.tail_alpha, p.max_ratio)
        }
        "burke" => {
            let (m, n) = cfg.dims()?;
            burke_increment_test(cfg, &DownRightPath::parse(&p.path, m, n)?)
        }
        "variance-comparison" => variance_comparison_check(cfg, p.lambda),
        "zeroed-bounds" => zeroed_boundary_bounds(cfg),
        "tasep-bridge" => tasep_bridge(cfg, &p.bridge),
        other => Err(Error::Config(format!("unknown experiment {other}; known: {}", EXPERIMENTS.join(", ")))),
    }
}
