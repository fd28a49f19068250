use crate::lattice::Site;
use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("paths share no common antidiagonal level")]
    DisjointLevelRange,
    #[error("box {width}x{height} exceeds the size bounds")]
    BoxTooLarge { width: u64, height: u64 },
    #[error("invalid box: lo {lo} is not coordinatewise <= hi {hi}")]
    InvalidBox { lo: Site, hi: Site },
    #[error("site {0} leaves the generable region")]
    OutOfDomain(Site),
    #[error("invalid distribution parameters: {0}")]
    InvalidDistribution(String),
    #[error("field does not cover site {0}")]
    FieldDoesNotCoverBox(Site),
    #[error("sites {0} and {1} are not ordered coordinatewise")]
    NotComparable(Site, Site),
    #[error("{steps} steps is too many for brute-force enumeration (max {max})")]
    TooLargeForEnumeration { steps: u64, max: u64 },
    #[error("terminal {terminal} is not northeast of {site} with the required margin")]
    TerminalNotNortheast { terminal: Site, site: Site },
    #[error("domains do not match")]
    DomainMismatch,
    #[error("plaquette closure defect {0:e} exceeds tolerance")]
    ClosureViolated(f64),
    #[error("recovery defect {0:e} exceeds tolerance")]
    RecoveryViolated(f64),
    #[error("site {0} is outside the box")]
    OutOfBox(Site),
    #[error("bulk field must be Exponential(1)")]
    WrongBulkDistribution,
    #[error("sample of size {got} is below the minimum {min}")]
    SampleTooSmall { got: usize, min: usize },
    #[error("parameter {name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("alphas must satisfy {0} < {1}")]
    NotOrdered(f64, f64),
    #[error("invalid path measure: {0}")]
    InvalidMeasure(String),
    #[error("quantile level {0} is outside [0, 1]")]
    SOutOfRange(f64),
    #[error("invalid coalescing pairing: {0}")]
    PairingInvalid(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
