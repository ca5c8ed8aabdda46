use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("generator matrix is rank deficient (rank {rank} < {rows} rows)")]
    RankDeficient { rank: usize, rows: usize },

    #[error("component code too large to enumerate: k = {0}")]
    CodeTooLarge(usize),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid qc profile: {0}")]
    InvalidProfile(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("target girth {target} is not achievable (limit {limit})")]
    GirthUnreachable { target: usize, limit: usize },

    #[error("shift search exhausted without reaching girth {0}")]
    SearchExhausted(usize),

    #[error("degree mismatch at check {check}: degree {degree}, component length {n}")]
    DegreeMismatch { check: usize, degree: usize, n: usize },

    #[error("parity-check matrix leaves no information bits")]
    NoInformationBits,

    #[error("curves do not share a parameter range")]
    DisjointCurves,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
