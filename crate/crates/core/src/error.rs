use thiserror::Error;

use crate::ir::{BitsError, EncodeError, ExecError, MalformedProgram, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("class {class} does not support parameter n = {n}")]
    UnsupportedParameter { class: String, n: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("candidate does not match schema: {0}")]
    Schema(String),
    #[error("program does not match the expected template: {0}")]
    TemplateMismatch(String),
    #[error("malformed candidate: {0}")]
    MalformedCandidate(String),
    #[error("wildcard count {w} exceeds n/2 for n = {n}")]
    EvasivenessViolated { n: usize, w: usize },
    #[error("oracle responses are not monotone: {0}")]
    NotMonotone(String),
    #[error("no instance met the density bound after {0} draws")]
    ResampleLimitExceeded(usize),
    #[error("obfuscators target different classes: {0} vs {1}")]
    ClassMismatch(String, String),
    #[error("{what} overhead {ratio:.3} exceeds declared {declared:.3} on sample {sample}")]
    OverheadExceeded {
        what: &'static str,
        sample: usize,
        ratio: f64,
        declared: f64,
    },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("unknown {kind} id: {id}")]
    UnknownId { kind: &'static str, id: String },
    #[error("asset {asset} cannot be verified publicly")]
    FlavourUnsupported { asset: String },
    #[error("setter-verifiable bundle is missing its secret part")]
    MissingSecret,
    #[error("bundle is corrupt: {0}")]
    BundleCorrupt(String),
    #[error("attack budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error(transparent)]
    Malformed(#[from] MalformedProgram),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Bits(#[from] BitsError),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
