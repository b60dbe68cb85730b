use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cornergrowth::config::{load_config, parse_list, run_experiment, ExperimentSpec};
use cornergrowth::experiments::{emit_plot_data, BoundaryChoice, ExperimentConfig};
use cornergrowth::interface::{build_interface, write_interface_csv, Hit};
use cornergrowth::lpp::{backtrack_path, compute_field, write_field_csv, TiePolicy};
use cornergrowth::manifest::RunManifest;
use cornergrowth::tasep::{auto_window, init_palm_conditioned, write_event_log, write_t_matrix};
use cornergrowth::verify::{verify_all, Profile, CRITERIA, DEFAULT_SEED};
use cornergrowth::weights::{apply_boundary, sample_equilibrium, WeightArray};
use cornergrowth::Error;

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "CGM_OUT_DIR";

#[derive(Parser)]
#[command(name = "cgm", version, about = "Corner growth model and last-passage percolation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Equilibrium density in (0, 1).
    #[arg(long)]
    rho: Option<f64>,
    /// Time, or a comma-separated t-grid for experiments.
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// equilibrium, rarefaction, zero-west, zero-south or zero-both.
    #[arg(long)]
    boundary: Option<String>,
    /// rightmost or leftmost.
    #[arg(long)]
    tie: Option<String>,
    /// Output directory; defaults to $CGM_OUT_DIR, then ./cgm-out.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a weight array and write its last-passage field.
    Field(Common),
    /// Maximal path and exit point.
    Path(Common),
    /// Competition interface and Z*.
    Interface(Common),
    /// Simulate the exclusion process from the conditioned start.
    Tasep {
        #[command(flatten)]
        common: Common,
        /// Labels 0..=tracked of particles and holes are recorded.
        #[arg(long, default_value_t = 5)]
        tracked: usize,
    },
    /// Run one named experiment.
    Experiment {
        name: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance suite.
    VerifyAll {
        /// Reduced sample counts.
        #[arg(long)]
        quick: bool,
        /// Comma-separated criterion numbers; all by default.
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failures are usage errors (exit 2) or failed verdicts (exit 1).
enum Failure {
    Usage(String),
    Verdict,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn out_dir(flag: Option<PathBuf>) -> std::io::Result<PathBuf> {
    let dir = flag.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("cgm-out"));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(path: &Path) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn tie_policy(c: &Common) -> Result<TiePolicy, Error> {
    c.tie.as_deref().unwrap_or("rightmost").parse()
}

/// Equilibrium sample with the requested boundary applied.
fn weights(c: &Common) -> Result<WeightArray, Error> {
    let rho = c.rho.unwrap_or(0.5);
    let (m, n) = (c.m.unwrap_or(25), c.n.unwrap_or(25));
    let w = sample_equilibrium(rho, m, n, c.seed.unwrap_or(0))?;
    let choice = BoundaryChoice::parse(c.boundary.as_deref().unwrap_or("equilibrium"))?;
    match choice.kind(rho, m, n)? {
        Some(kind) => apply_boundary(&w, &kind),
        None => Ok(w),
    }
}

fn field_cmd(c: Common) -> Outcome {
    let w = weights(&c)?;
    let f = compute_field(&w);
    let dir = out_dir(c.out)?;
    let path = dir.join("field.csv");
    let mut out = create(&path)?;
    write_field_csv(&f, &mut out)?;
    out.flush()?;
    println!("G({}, {}) = {}", w.m(), w.n(), f.g_mn());
    println!("wrote {}", path.display());
    Ok(())
}

fn path_cmd(c: Common) -> Outcome {
    let w = weights(&c)?;
    let f = compute_field(&w);
    let p = backtrack_path(&f, tie_policy(&c)?);
    let dir = out_dir(c.out)?;
    let path = dir.join("path.csv");
    let mut out = create(&path)?;
    writeln!(out, "k,i,j")?;
    for (k, (i, j)) in p.sites.iter().enumerate() {
        writeln!(out, "{k},{i},{j}")?;
    }
    out.flush()?;
    println!("G = {}", f.g_mn());
    println!("Z = {}", p.exit);
    println!("ties = {}", p.ties);
    println!("wrote {}", path.display());
    Ok(())
}

fn interface_cmd(c: Common) -> Outcome {
    let w = weights(&c)?;
    let f = compute_field(&w);
    let phi = build_interface(&f);
    let dir = out_dir(c.out)?;
    let path = dir.join("interface.csv");
    let mut out = create(&path)?;
    write_interface_csv(&phi, &mut out)?;
    out.flush()?;
    let show = |h: Hit| match h {
        Hit::At(x) => x.to_string(),
        Hit::Never => "never".into(),
    };
    println!("Z* = {}", phi.z_star());
    println!("v(n) = {}", show(phi.v(w.n())));
    println!("w(m) = {}", show(phi.w(w.m())));
    println!("termination = {:?}", phi.termination);
    println!("ties = {}", phi.ties);
    println!("wrote {}", path.display());
    Ok(())
}

fn tasep_cmd(c: Common, tracked: usize) -> Outcome {
    let rho = c.rho.unwrap_or(0.5);
    let horizon: f64 = match c.t.as_deref() {
        Some(s) => s.trim().parse().map_err(|_| Failure::Usage(format!("bad time {s:?}")))?,
        None => 50.0,
    };
    let seed = c.seed.unwrap_or(0);
    let window = auto_window(rho, tracked, horizon, seed)?;
    let traj = init_palm_conditioned(rho, window, tracked, seed)?.simulate(horizon)?;
    let dir = out_dir(c.out)?;
    let (events, matrix) = (dir.join("tasep-events.csv"), dir.join("tasep-t-matrix.csv"));
    let mut out = create(&events)?;
    write_event_log(&traj, &mut out)?;
    out.flush()?;
    let mut out = create(&matrix)?;
    write_t_matrix(&traj, &mut out)?;
    out.flush()?;
    println!("window = [{}, {}]", window.0, window.1);
    println!("jumps = {}", traj.total_jumps);
    println!("identity violations = {}", traj.identity_violations);
    println!("wrote {} and {}", events.display(), matrix.display());
    Ok(())
}

fn experiment_cmd(name: Option<String>, config: Option<PathBuf>, c: Common) -> Outcome {
    let mut spec = match &config {
        Some(p) => load_config(p)?,
        None => ExperimentSpec::new(ExperimentConfig::new("", 0.5, vec![], 1000, DEFAULT_SEED)),
    };
    let cfg = &mut spec.config;
    if let Some(n) = name {
        cfg.name = n;
    }
    if cfg.name.is_empty() {
        return Err(Failure::Usage("experiment name missing".into()));
    }
    if let Some(r) = c.rho {
        cfg.rho = r;
    }
    if let Some(t) = &c.t {
        cfg.t_grid = parse_list(t)?;
    }
    match (c.m, c.n) {
        (Some(m), Some(n)) => cfg.dims = Some((m, n)),
        (None, None) => {}
        _ => return Err(Failure::Usage("--m and --n go together".into())),
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(s) = c.samples {
        cfg.samples = s;
    }
    if let Some(b) = &c.boundary {
        cfg.boundary = BoundaryChoice::parse(b)?;
    }
    if c.tie.is_some() {
        cfg.tie = tie_policy(&c)?;
    }
    let dir = out_dir(c.out)?;
    let mut manifest = RunManifest::start(&format!("experiment {}", cfg.name), cfg.seed, Some(&spec));
    let report = run_experiment(&spec)?;
    let name = &spec.config.name;
    let csv = dir.join(format!("{name}.csv"));
    let mut out = create(&csv)?;
    report.write_csv(&mut out)?;
    out.flush()?;
    let text = dir.join(format!("{name}.txt"));
    std::fs::write(&text, report.to_text())?;
    let plot = dir.join(format!("{name}-plot.csv"));
    let mut out = create(&plot)?;
    emit_plot_data(&report, &mut out)?;
    out.flush()?;
    for p in [&csv, &text, &plot] {
        manifest.output(p);
    }
    manifest.finish();
    manifest.write_to(&dir.join(format!("{name}-manifest.ini")))?;
    print!("{}", report.to_text());
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verdict)
    }
}

fn verify_cmd(quick: bool, only: Option<String>, seed: Option<u64>, out: Option<PathBuf>) -> Outcome {
    let ids: Vec<u8> = match only {
        Some(s) => s
            .split(',')
            .map(|x| x.trim().parse::<u8>().map_err(|_| Failure::Usage(format!("bad criterion {x:?}"))))
            .collect::<Result<_, _>>()?,
        None => CRITERIA.iter().map(|c| c.0).collect(),
    };
    let profile = if quick { Profile::Quick } else { Profile::Full };
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let dir = out_dir(out)?;
    let mut manifest = RunManifest::start(&format!("verify-all profile={profile}"), seed, None);
    let outcomes = verify_all(profile, seed, &ids, &dir)?;
    for o in &outcomes {
        println!("criterion {:02} {} {} ({:.1}s)", o.id, if o.passed { "PASS" } else { "FAIL" }, o.title, o.seconds);
        manifest.output(&o.report_path);
    }
    manifest.output(dir.join("summary.txt"));
    manifest.finish();
    manifest.write_to(&dir.join("manifest.ini"))?;
    if outcomes.iter().all(|o| o.passed) {
        Ok(())
    } else {
        Err(Failure::Verdict)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Field(c) => field_cmd(c),
        Command::Path(c) => path_cmd(c),
        Command::Interface(c) => interface_cmd(c),
        Command::Tasep { common, tracked } => tasep_cmd(common, tracked),
        Command::Experiment { name, config, common } => experiment_cmd(name, config, common),
        Command::VerifyAll { quick, only, seed, out } => verify_cmd(quick, only, seed, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
