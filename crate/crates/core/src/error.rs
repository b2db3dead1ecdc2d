//! Error taxonomy shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A variance/scale estimate collapsed to zero (e.g. constant input).
    #[error("degenerate scale: {0}")]
    DegenerateScale(String),

    #[error("series too short: n = {n}, need at least {need}")]
    SeriesTooShort { n: usize, need: usize },

    #[error("insufficient past values: backward windows of length {need} past values, only {have} available")]
    InsufficientPast { need: usize, have: usize },

    #[error("unsupported Volterra order r = {0}; only r in {{1, 2}} is implemented")]
    UnsupportedOrder(u32),

    /// p(2β−1) = 1 sits on the boundary between the central and non-central
    /// regimes and belongs to neither.
    #[error("boundary case p(2*beta - 1) = 1 is not supported (p = {p}, beta = {beta})")]
    UnsupportedBoundary { p: u32, beta: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature tolerance not reached: requested {requested:e}, achieved {achieved:e} (best estimate {estimate})")]
    Tolerance {
        requested: f64,
        achieved: f64,
        estimate: f64,
    },

    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv output: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
