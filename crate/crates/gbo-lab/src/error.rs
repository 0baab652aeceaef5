use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 16")]
    BadGridSize(usize),
    #[error("domain length must be positive, got {0}")]
    BadDomainLength(f64),
    #[error("pad factor must be >= 1")]
    BadPadFactor,
    #[error("nonlinearity power k must be even and >= 4, got {0}")]
    BadPower(u32),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("fractional exponent {0} below -1/2")]
    BadExponent(f64),
    #[error("{0}")]
    InvalidConfig(String),
    #[error("solution blew up at t = {t}: {what}")]
    BlowUp { t: f64, what: String },
    #[error("boundary-mass guard violated at t = {t}: boundary fraction {fraction:.3e}")]
    BoundaryGuard { t: f64, fraction: f64 },
    #[error("trajectory records are not uniformly spaced in time")]
    NonUniformCadence,
    #[error("need at least {need} trajectory records, got {got}")]
    TooFewRecords { need: usize, got: usize },
    #[error("weights R + R1 = {0} do not fit inside a quarter of the domain")]
    WeightsTooLarge(f64),
    #[error("infeasible point: {0}")]
    Infeasible(String),
    #[error("extremizer report is not converged")]
    NotConverged,
    #[error("kernel violates its declared bounds: {0}")]
    KernelBounds(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
