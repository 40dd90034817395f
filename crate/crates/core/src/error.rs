//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("time grid must be strictly increasing")]
    NonIncreasingGrid,

    #[error("Yosida index n = {n} must exceed the growth bound alpha = {alpha}")]
    YosidaIndexOutOfRange { n: f64, alpha: f64 },

    #[error("trajectory blew up (non-finite state) at step {step}, t = {t}")]
    Blowup { step: usize, t: f64 },

    #[error("fixed-point iteration diverging at iteration {iteration} (sup distance {distance})")]
    Divergence { iteration: usize, distance: f64 },

    #[error("test function carries no closed generator; the extended-generator formula needs one")]
    MissingClosedGenerator,

    #[error("the semigroup-composed formula requires a vanishing Gaussian coefficient (B = 0)")]
    GaussianTermPresent,

    #[error("Lyapunov audit did not pass: {0}")]
    AuditFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
