use thiserror::Error;

/// Errors raised by the lab's constructions and evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty or reversed interval ({lo}, {hi})")]
    InvalidInterval { lo: String, hi: String },

    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    ResourceCap {
        what: &'static str,
        needed: u64,
        cap: u64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unassigned point {0}: it lies in the null set left out by the pieces")]
    UnassignedPoint(String),

    #[error("ordering violation: expected x < y, got x = {x}, y = {y}")]
    Ordering { x: String, y: String },

    #[error("did not converge within {subdivisions} subdivisions; value bracketed in [{lower}, {upper}]")]
    DidNotConverge {
        subdivisions: usize,
        lower: f64,
        upper: f64,
    },

    #[error("diagonal contact: piece {piece} has slope {slope} inside the band [{q_lo}, {q_hi}], the region integral diverges")]
    DiagonalContact {
        piece: usize,
        slope: f64,
        q_lo: f64,
        q_hi: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0} is an exceptional (non-regular) value")]
    ExceptionalValue(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
