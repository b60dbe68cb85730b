//! Run manifests: what was run, with which settings, and what it wrote.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::config::{parse_config, ExperimentSpec};
use crate::error::Result;

pub const TOOL_VERSION: &str = concat!("cgm ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub master_seed: u64,
    /// Configuration text accepted by [`parse_config`], when the run had one.
    pub config: Option<String>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<PathBuf>,
    pub environment: Vec<(String, String)>,
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Host facts that can explain timing differences but never output ones.
pub fn environment_fingerprint() -> Vec<(String, String)> {
    vec![
        ("os".into(), std::env::consts::OS.into()),
        ("arch".into(), std::env::consts::ARCH.into()),
        ("threads".into(), rayon::current_num_threads().to_string()),
        ("debug_assertions".into(), cfg!(debug_assertions).to_string()),
    ]
}

impl RunManifest {
    pub fn start(command: &str, master_seed: u64, spec: Option<&ExperimentSpec>) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            master_seed,
            config: spec.map(ExperimentSpec::to_ini),
            started_unix: unix_now(),
            finished_unix: 0.0,
            outputs: Vec::new(),
            environment: environment_fingerprint(),
        }
    }

    pub fn output(&mut self, path: impl Into<PathBuf>) {
        self.outputs.push(path.into());
    }

    pub fn finish(&mut self) {
        self.finished_unix = unix_now();
    }

    /// The run settings come first, in the configuration format, so the
    /// manifest can be handed back to `--config` with the trailing
    /// bookkeeping removed by [`config_from_manifest`].
    pub fn write<W: Write>(&self, out: &mut W) -> Result<()> {
        if let Some(cfg) = &self.config {
            writeln!(out, "{cfg}")?;
        }
        writeln!(out, "[run]")?;
        writeln!(out, "tool = {}", self.tool_version)?;
        writeln!(out, "command = {}", self.command)?;
        writeln!(out, "master_seed = {}", self.master_seed)?;
        writeln!(out, "started_unix = {:.3}", self.started_unix)?;
        writeln!(out, "finished_unix = {:.3}", self.finished_unix)?;
        writeln!(out, "\n[outputs]")?;
        for (k, p) in self.outputs.iter().enumerate() {
            writeln!(out, "file{k} = {}", p.display())?;
        }
        writeln!(out, "\n[environment]")?;
        for (k, v) in &self.environment {
            writeln!(out, "{k} = {v}")?;
        }
        Ok(())
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write(&mut f)?;
        f.flush()?;
        Ok(())
    }
}

/// Recover the experiment settings from a manifest written by an
/// `experiment` run.
pub fn config_from_manifest(text: &str) -> Result<ExperimentSpec> {
    let cut = text.find("[run]").unwrap_or(text.len());
    parse_config(&text[..cut])
}
