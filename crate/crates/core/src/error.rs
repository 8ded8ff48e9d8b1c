use alloc::string::String;

/// Broad classes of failure, used by callers that map errors onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input or parameters outside an operation's domain.
    Validation,
    /// A rational surrogate is too coarse for the requested multipliers.
    Precision,
    /// A size, domain or convergence guard refused the computation.
    Guard,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid denominator: must be at least 1")]
    InvalidDenominator,
    #[error("invalid multiplier {0}: must be at least 2")]
    InvalidMultiplier(u64),
    #[error("unsupported irrational tag `{0}`")]
    UnsupportedTag(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("term too large to materialize ({0}); use term_mod")]
    TooLarge(String),
    #[error("sequence is not increasing at index {0}")]
    NotIncreasing(u64),
    #[error("modulus guard exceeded: {0}")]
    ModulusGuard(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p-adic log needs u ≡ 1 (mod p), or (mod 4) when p = 2")]
    LogDomain,
    #[error("p-adic exp needs val(z) > 1/(p-1)")]
    ExpDomain,
    #[error("{a} is not a unit modulo {p}")]
    NotAUnit { a: u64, p: u64 },
    #[error("interpolation base must be at least 2, got {0}")]
    InvalidBase(u64),
    #[error("certificate guard failed: no analytic model")]
    NoAnalyticModel,
    #[error("mismatched p-adic operands")]
    PadicMismatch,
    #[error("empty point cloud")]
    EmptyCloud,
    #[error("frequency 0 measures total mass; use the mass instead")]
    UseMassInstead,
    #[error("no n0 with a(n+1) - a(n) < eps*a(n) within the search bound")]
    NonLacunarityNotWitnessed,
    #[error("x0 too large for an eps-dense witness set: {0}")]
    ShrinkX0(String),
    #[error("insufficient surrogate precision: {0}")]
    InsufficientPrecision(String),
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("degenerate scale window: {0}")]
    DegenerateWindow(String),
    #[error("invalid level: n must be at least 1")]
    InvalidLevel,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            InsufficientPrecision(_) => ErrorKind::Precision,
            TooLarge(_)
            | ModulusGuard(_)
            | LogDomain
            | ExpDomain
            | NoAnalyticModel
            | NonLacunarityNotWitnessed
            | ShrinkX0(_)
            | GuardExceeded(_)
            | NotIncreasing(_) => ErrorKind::Guard,
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
