use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("density {0} must lie strictly between 0 and 1")]
    Density(f64),
    #[error("lattice dimensions must be at least 1 (got m={m}, n={n})")]
    Dimensions { m: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    Mismatch(String),
    #[error("multiplier {0} outside [0, 1]")]
    Multiplier(f64),
    #[error("negative or non-finite weight {value} at ({i}, {j})")]
    Weight { i: usize, j: usize, value: f64 },
    #[error("operation requires an equilibrium boundary")]
    NotEquilibrium,
    #[error("coupling hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("index {index} out of range {lo}..={hi}")]
    OutOfRange { index: i64, lo: i64, hi: i64 },
    #[error("enumeration bound exceeded: m + n = {0} > 16")]
    EnumerationBound(usize),
    #[error("degenerate characteristic point for rho={rho}, t={t}")]
    Degenerate { rho: f64, t: f64 },
    #[error("not enough samples: {got} < {need}")]
    TooFewSamples { got: usize, need: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid path spec: {0}")]
    PathSpec(String),
    #[error("tasep: {0}")]
    Tasep(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
