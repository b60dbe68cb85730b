//! The acceptance suite: twelve criteria, each producing one report.
//!
//! `Profile::Full` uses the acceptance sizes; `Profile::Quick` shrinks sample
//! counts for smoke runs. Reports contain no timing or host data, so a fixed
//! master seed reproduces them byte for byte.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::config::{run_experiment, ExperimentSpec, Params};
use crate::error::{Error, Result};
use crate::experiments::{
    burke_increment_test, exit_tail, mean_formula_check, rarefaction_fluctuations, tasep_bridge,
    transversal_fluctuations, variance_comparison_check, variance_identity_check, variance_scaling,
    zeroed_boundary_bounds, zstar_distribution_check, BoundaryChoice, BridgeSettings, Check, DownRightPath,
    EstimatorReport, ExperimentConfig,
};
use crate::interface::{build_interface, check_reversal_duality, reverse_process};
use crate::lpp::{
    backtrack_path, brute_force_passage, check_monotone_coupling, compute_field, decompose, interior_from_corner,
    CouplingVerdict, TiePolicy,
};
use crate::rng::derive_seed;
use crate::weights::{apply_boundary, couple_density, sample_equilibrium, transpose, WeightArray};

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 24301;

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "oracle equivalence"),
    (2, "structural identities"),
    (3, "increments along down-right paths"),
    (4, "mean formula"),
    (5, "variance identity"),
    (6, "variance exponent"),
    (7, "exit tails"),
    (8, "interface exit law"),
    (9, "exclusion process bridge"),
    (10, "rarefaction fluctuations"),
    (11, "variance comparison"),
    (12, "reproducibility"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Full,
    Quick,
}

impl Profile {
    fn pick(self, full: usize, quick: usize) -> usize {
        match self {
            Profile::Full => full,
            Profile::Quick => quick,
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Full => "full",
            Profile::Quick => "quick",
        })
    }
}

pub fn criterion_title(id: u8) -> Option<&'static str> {
    CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1)
}

/// Run one criterion.
pub fn run_criterion(id: u8, profile: Profile, seed: u64) -> Result<EstimatorReport> {
    let title = criterion_title(id).ok_or_else(|| Error::Config(format!("no criterion {id}")))?;
    let mut rep = match id {
        1 => oracle_equivalence(profile, seed)?,
        2 => structural_identities(profile, seed)?,
        3 => burke_suite(profile, seed)?,
        4 => mean_suite(profile, seed)?,
        5 => {
            let cfg = ExperimentConfig::new("variance-identity", 0.6, vec![], profile.pick(100_000, 10_000), seed)
                .with_dims(24, 16);
            variance_identity_check(&cfg)?
        }
        6 => variance_scaling(&ExperimentConfig::new(
            "variance-scaling",
            0.5,
            vec![250.0, 500.0, 1000.0, 2000.0],
            profile.pick(500, 100),
            seed,
        ))?,
        7 => exit_tail(
            &ExperimentConfig::new("exit-tail", 0.5, vec![1000.0], profile.pick(5000, 500), seed),
            &[0.5, 1.0, 1.5, 2.0],
            &[0.05, 0.1, 0.2],
            5.0,
        )?,
        8 => zstar_distribution_check(&ExperimentConfig::new("zstar-law", 0.5, vec![400.0], profile.pick(2000, 400), seed))?,
        9 => tasep_bridge(
            &ExperimentConfig::new("tasep-bridge", 0.3, vec![], profile.pick(2000, 400), seed),
            &BridgeSettings::default(),
        )?,
        10 => rarefaction_suite(profile, seed)?,
        11 => {
            let cfg = ExperimentConfig::new("variance-comparison", 0.4, vec![], profile.pick(100_000, 10_000), seed)
                .with_dims(30, 20);
            variance_comparison_check(&cfg, 0.6)?
        }
        12 => reproducibility(seed)?,
        _ => unreachable!("criterion ids are checked above"),
    };
    rep.experiment = format!("criterion-{id:02}");
    rep.config = format!("{title}; profile={profile}; seed={seed}; {}", rep.config);
    Ok(rep)
}

fn oracle_equivalence(profile: Profile, seed: u64) -> Result<EstimatorReport> {
    let max_side = profile.pick(7, 5);
    let seeds = profile.pick(100, 20);
    let choices = [BoundaryChoice::Equilibrium, BoundaryChoice::ZeroBoth, BoundaryChoice::Rarefaction { south: 0.5, west: 0.5 }];
    let mut worst: f64 = 0.0;
    let mut instances = 0;
    for (b, choice) in choices.iter().enumerate() {
        for m in 1..=max_side {
            for n in 1..=max_side {
                for s in 0..seeds {
                    let rho = [0.3, 0.5, 0.7][s % 3];
                    let idx = ((b * 8 + m) * 8 + n) * 1000 + s;
                    let w = sample_equilibrium(rho, m, n, derive_seed(seed, "oracle", idx as u64))?;
                    let w = match choice.kind(rho, m, n)? {
                        Some(k) => apply_boundary(&w, &k)?,
                        None => w,
                    };
                    let diff = (compute_field(&w).g_mn() - brute_force_passage(&w)?).abs();
                    worst = worst.max(diff);
                    instances += 1;
                }
            }
        }
    }
    let mut rep = EstimatorReport::new("oracle", format!("m,n<={max_side} seeds={seeds} boundaries=3"));
    rep.info("instances", instances as f64);
    rep.check(Check::at_most("max_abs_difference", worst, 1e-12));
    Ok(rep)
}

#[derive(Default)]
struct Tally {
    instances: usize,
    failures: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.instances += 1;
        self.failures += usize::from(!ok);
    }

    fn report(&self, rep: &mut EstimatorReport, name: &str) {
        rep.info(format!("{name}_instances"), self.instances as f64);
        rep.check(Check::zero(format!("{name}_failures"), self.failures));
    }
}

fn structural_identities(profile: Profile, seed: u64) -> Result<EstimatorReport> {
    let count = profile.pick(200, 100);
    let (m, n) = (9, 7);
    let names = [
        "recurrence",
        "increment_recursions",
        "decomposition",
        "flat_a_near_zero",
        "monotone_coupling",
        "reversal_duality",
        "reversed_field",
        "hit_implication",
        "transposition",
    ];
    let mut tallies: Vec<Tally> = names.iter().map(|_| Tally::default()).collect();
    let mut ambiguous = 0;
    for k in 0..count {
        let rho = [0.3, 0.5, 0.7][k % 3];
        let w = sample_equilibrium(rho, m, n, derive_seed(seed, "structure", k as u64))?;
        let f = compute_field(&w);
        let tol = 1e-12 * f.g_mn().max(1.0);
        tallies[0].record(recurrence_exact(&w));
        tallies[1].record(increments_consistent(&w, tol));
        let d = decompose(&f, TiePolicy::Rightmost);
        tallies[2].record((d.u + d.a - f.g_mn()).abs() <= tol && d.exit == backtrack_path(&f, TiePolicy::Rightmost).exit);
        let table = interior_from_corner(&w)?;
        tallies[3].record(table.a(-1)? == table.a(0)? && table.a(0)? == table.a(1)?);
        let lambda = (rho + 0.15).min(0.9);
        tallies[4].record(check_monotone_coupling(&w, &couple_density(&w, lambda)?)? == CouplingVerdict::Holds);
        let dual = check_reversal_duality(&f);
        ambiguous += usize::from(dual.ambiguous);
        tallies[5].record(dual.holds && dual.reversed_z_star == dual.exit);
        tallies[6].record(reverse_process(&f).identity_residual(&f) <= tol);
        let c = build_interface(&f);
        let v = c.v(n).or_sentinel(m + 1);
        let wv = c.w(m).or_sentinel(n + 1);
        tallies[7].record(v < m || wv < n);
        let ft = compute_field(&transpose(&w));
        tallies[8].record(backtrack_path(&ft, TiePolicy::Rightmost).exit == -d.exit);
    }
    let mut rep = EstimatorReport::new("structure", format!("m={m} n={n} instances={count}"));
    for (name, t) in names.iter().zip(&tallies) {
        t.report(&mut rep, name);
    }
    rep.info("duality_ambiguous_instances", ambiguous as f64);
    let zeroed = zeroed_boundary_bounds(&ExperimentConfig::new("zeroed-bounds", 0.5, vec![], count, seed).with_dims(6, 4))?;
    rep.absorb("zeroed_", zeroed);
    Ok(rep)
}

/// `G(i,j) == max(G(i-1,j), G(i,j-1)) + omega(i,j)` bit for bit.
fn recurrence_exact(w: &WeightArray) -> bool {
    let f = compute_field(w);
    (0..=w.n()).all(|j| {
        (0..=w.m()).all(|i| {
            let left = if i > 0 { f.g(i - 1, j) } else { 0.0 };
            let below = if j > 0 { f.g(i, j - 1) } else { 0.0 };
            f.g(i, j) == left.max(below) + w.get(i, j)
        })
    })
}

/// Increments against differences of `G`, and `X` against the minimum of
/// the two incoming increments.
fn increments_consistent(w: &WeightArray, tol: f64) -> bool {
    let f = compute_field(w);
    let (m, n) = (w.m(), w.n());
    for j in 0..=n {
        for i in 0..=m {
            if i > 0 && (f.inc_i(i, j) - (f.g(i, j) - f.g(i - 1, j))).abs() > tol {
                return false;
            }
            if j > 0 && (f.inc_j(i, j) - (f.g(i, j) - f.g(i, j - 1))).abs() > tol {
                return false;
            }
            if i > 0 && j > 0 {
                let (up, side) = (f.inc_i(i, j - 1), f.inc_j(i - 1, j));
                let om = w.get(i, j);
                if f.inc_i(i, j) != (up - side).max(0.0) + om
                    || f.inc_j(i, j) != (side - up).max(0.0) + om
                    || f.x(i - 1, j - 1) != up.min(side)
                {
                    return false;
                }
            }
        }
    }
    true
}

fn burke_suite(profile: Profile, seed: u64) -> Result<EstimatorReport> {
    let side = profile.pick(40, 20);
    let samples = profile.pick(2000, 300);
    let mut rep = EstimatorReport::new("burke", format!("m=n={side} samples={samples}"));
    for rho in [0.3, 0.5, 0.7] {
        let cfg = ExperimentConfig::new("burke", rho, vec![], samples, seed).with_dims(side, side);
        for path in ["north-east", "staircase"] {
            let r = burke_increment_test(&cfg, &DownRightPath::parse(path, side, side)?)?;
            rep.absorb(&format!("rho{rho}_{path}_"), r);
        }
    }
    Ok(rep)
}

fn mean_suite(profile: Profile, seed: u64) -> Result<EstimatorReport> {
    let samples = profile.pick(10_000, 1000);
    let mut rep = EstimatorReport::new("mean-formula", format!("samples={samples}"));
    for (rho, t) in [(0.5, 100.0), (0.3, 1000.0)] {
        let r = mean_formula_check(&ExperimentConfig::new("mean-formula", rho, vec![t], samples, seed))?;
        rep.absorb(&format!("rho{rho}_"), r);
    }
    Ok(rep)
}

fn rarefaction_suite(profile: Profile, seed: u64) -> Result<EstimatorReport> {
    let samples = profile.pick(500, 100);
    let cfg = ExperimentConfig::new("rarefaction", 0.5, vec![250.0, 500.0, 1000.0, 2000.0], samples, seed)
        .with_boundary(BoundaryChoice::ZeroBoth);
    let mut rep = EstimatorReport::new("rarefaction", cfg.describe());
    rep.absorb("", rarefaction_fluctuations(&cfg)?);
    let tcfg = ExperimentConfig::new("transversal", 0.5, vec![1000.0], profile.pick(2000, 300), seed)
        .with_boundary(BoundaryChoice::ZeroBoth);
    rep.absorb("transversal_", transversal_fluctuations(&tcfg, 500.0, &[0.5, 1.0, 2.0], 0.9, 5.0)?);
    Ok(rep)
}

/// Small versions of several experiments, each run twice; the report CSVs
/// must agree byte for byte.
fn reproducibility(seed: u64) -> Result<EstimatorReport> {
    let specs = [
        ExperimentConfig::new("variance-identity", 0.6, vec![], 2000, seed).with_dims(24, 16),
        ExperimentConfig::new("zstar-law", 0.5, vec![400.0], 200, seed),
        ExperimentConfig::new("burke", 0.5, vec![], 100, seed).with_dims(20, 20),
        ExperimentConfig::new("tasep-bridge", 0.3, vec![], 100, seed),
        ExperimentConfig::new("rarefaction", 0.5, vec![250.0, 500.0, 1000.0], 50, seed).with_boundary(BoundaryChoice::ZeroBoth),
    ];
    let mut rep = EstimatorReport::new("reproducibility", format!("experiments={}", specs.len()));
    let mut mismatches = 0;
    for cfg in specs {
        let mut spec = ExperimentSpec::new(cfg);
        spec.params = Params { bridge: BridgeSettings { pooled_interarrivals: 500, ..BridgeSettings::default() }, ..Params::default() };
        let a = report_bytes(&run_experiment(&spec)?)?;
        let b = report_bytes(&run_experiment(&spec)?)?;
        rep.info(format!("{}_bytes", spec.config.name), a.len() as f64);
        mismatches += usize::from(a != b);
    }
    rep.check(Check::zero("byte_mismatches", mismatches));
    Ok(rep)
}

pub fn report_bytes(r: &EstimatorReport) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    r.write_csv(&mut buf)?;
    Ok(buf)
}

/// Outcome of one criterion within [`verify_all`].
#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub report_path: PathBuf,
    pub seconds: f64,
}

/// Run the selected criteria, writing `criterion-NN.csv` and
/// `criterion-NN.txt` into `out_dir` and a `summary.txt` with one PASS/FAIL
/// line per criterion.
pub fn verify_all(profile: Profile, seed: u64, ids: &[u8], out_dir: &Path) -> Result<Vec<CriterionOutcome>> {
    std::fs::create_dir_all(out_dir)?;
    let mut outcomes = Vec::new();
    let mut summary = String::new();
    for &id in ids {
        let start = std::time::Instant::now();
        let rep = run_criterion(id, profile, seed)?;
        let seconds = start.elapsed().as_secs_f64();
        let path = out_dir.join(format!("criterion-{id:02}.csv"));
        std::fs::write(&path, report_bytes(&rep)?)?;
        std::fs::write(out_dir.join(format!("criterion-{id:02}.txt")), rep.to_text())?;
        let title = criterion_title(id).expect("checked by run_criterion");
        summary.push_str(&summary_line(id, title, &rep));
        summary.push('\n');
        outcomes.push(CriterionOutcome { id, title, passed: rep.passed(), report_path: path, seconds });
    }
    std::fs::write(out_dir.join("summary.txt"), summary)?;
    Ok(outcomes)
}

/// `criterion NN PASS|FAIL title` plus the names of failed checks.
pub fn summary_line(id: u8, title: &str, rep: &EstimatorReport) -> String {
    let failed: Vec<&str> = rep.failed_checks().iter().map(|c| c.name.as_str()).collect();
    let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
    let mut line = format!("criterion {id:02} {verdict} {title}");
    if !failed.is_empty() {
        line.push_str(&format!(" [failed: {}]", failed.join(", ")));
    }
    line
}
