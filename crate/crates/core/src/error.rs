//! Crate-wide error type.

use std::fmt;

#[derive(Debug)]
pub enum Error {
    /// Bad network architecture (zero width, empty layer list, ...).
    InvalidArchitecture(String),
    /// Vector/matrix dimensions do not line up.
    ShapeMismatch(String),
    /// A backward pass was handed a cache from a different forward pass.
    StaleCache(String),
    /// Loss or gradients became non-finite during training.
    TrainingDiverged(String),
    /// An operation was asked to produce zero items.
    EmptyRequest(String),
    /// Density requested for a distribution kind with no tractable pdf.
    UnsupportedDensity(String),
    /// Not enough data to satisfy the request without replacement.
    InsufficientData(String),
    /// Conditional query issued without the required inputs.
    MissingInputs(String),
    /// Invalid configuration value or combination.
    Config(String),
    /// A scored set with only one class where both are required.
    DegenerateLabels(String),
    /// Two report entries share a tag.
    DuplicateTag(String),
    Io(std::io::Error),
    /// Malformed serialized artifact.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArchitecture(m) => write!(f, "invalid architecture: {m}"),
            Error::ShapeMismatch(m) => write!(f, "shape mismatch: {m}"),
            Error::StaleCache(m) => write!(f, "stale forward cache: {m}"),
            Error::TrainingDiverged(m) => write!(f, "training diverged: {m}"),
            Error::EmptyRequest(m) => write!(f, "empty request: {m}"),
            Error::UnsupportedDensity(m) => write!(f, "unsupported density: {m}"),
            Error::InsufficientData(m) => write!(f, "insufficient data: {m}"),
            Error::MissingInputs(m) => write!(f, "missing inputs: {m}"),
            Error::Config(m) => write!(f, "config error: {m}"),
            Error::DegenerateLabels(m) => write!(f, "degenerate labels: {m}"),
            Error::DuplicateTag(m) => write!(f, "duplicate tag: {m}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
