use thiserror::Error;

use crate::grid::Domain;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at sample {0}")]
    NonFinite(usize),

    #[error("field is in the {found:?} domain, expected {expected:?}")]
    DomainMismatch { expected: Domain, found: Domain },

    #[error("axis {axis} is invalid for a {n}-dimensional field")]
    InvalidAxis { axis: usize, n: usize },

    #[error("annulus index {k} is outside the resolvable range [{min}, {max}]")]
    AnnulusOutOfRange { k: i32, min: i32, max: i32 },

    #[error("dyadic cube (level {v}) does not meet the grid window")]
    CubeOutsideWindow { v: i32 },

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("level {level} is out of range (maximum {max})")]
    LevelOutOfRange { level: usize, max: usize },

    #[error("scale not resolvable on this grid: {0}")]
    Unresolvable(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
