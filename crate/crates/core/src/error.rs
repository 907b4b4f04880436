use thiserror::Error;

/// Errors raised by the simulation, classification and finite-space engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("residual variance vanishes at t = {t}: drift undefined at or after the information horizon")]
    DegenerateVariance { t: f64 },

    #[error("integrand `{family}` cannot be evaluated: {reason}")]
    NotEvaluable { family: String, reason: String },

    #[error("time {t} is not a node of the grid")]
    NotOnGrid { t: f64 },

    #[error("refused: {0}")]
    Refused(String),

    #[error("path-by-path Stieltjes sum exceeded the overflow guard ({guard:e}) on path {path}")]
    NotIntegrable { path: usize, guard: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("process is not adapted: stage {stage}, block {block}")]
    NotAdapted { stage: usize, block: usize },

    #[error("process is not a martingale: stage {stage}, block {block}")]
    NotMartingale { stage: usize, block: usize },

    #[error("absolute continuity violated at stage {stage}: {detail}")]
    AbsoluteContinuity { stage: usize, detail: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
