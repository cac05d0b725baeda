use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} is not normalized (squared norm {norm})")]
    NotNormalized { what: &'static str, norm: f64 },

    #[error("couplings and initial states differ in length ({couplings} vs {inits})")]
    LengthMismatch { couplings: usize, inits: usize },

    #[error("apparatus must contain at least one qubit")]
    EmptyApparatus,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid time {0}: times must be finite and nonnegative")]
    InvalidTime(f64),

    #[error("time grid is not sorted at index {0}")]
    UnsortedGrid(usize),

    #[error("capacity exceeded: {what} = {requested} exceeds the limit {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("pointer generator is not Hermitian (max deviation {0})")]
    NotHermitian(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("first-order expansion invalid: |cos(2gt)| = {0} <= 0.1")]
    ExpansionInvalid(f64),

    #[error(
        "window/distribution mismatch: observer mass over the window is {theta}, below {threshold}"
    )]
    WindowMismatch { theta: f64, threshold: f64 },

    #[error("negative probability {0}")]
    NegativeProbability(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
