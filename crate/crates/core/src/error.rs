use thiserror::Error;

use crate::rational::ParseRationalError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid constraint profile: {0}")]
    InvalidConstraints(String),

    #[error("invalid signaling scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid response policy: {0}")]
    InvalidResponse(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("signal {0} is sent with probability zero")]
    UnreachableSignal(usize),

    #[error("closed form needs a 2-state, 2-action instance (got {states}x{actions})")]
    NotBinary { states: usize, actions: usize },

    #[error("closed form needs a state-matching receiver and an action-matching sender")]
    NotPartiallyAligned,

    #[error("constraints are not implementable")]
    NotImplementable,

    #[error("infeasible constraints: {0}")]
    InfeasibleConstraints(String),

    #[error("no scheme on the 1/{grid} grid admits a quota-respecting response")]
    EmptyGrid { grid: u32 },

    #[error("instance generator gave up after {draws} draws")]
    GeneratorExhausted { draws: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    ParseRational(#[from] ParseRationalError),

    #[error("instance file: {0}")]
    Format(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
