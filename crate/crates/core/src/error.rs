use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter constraint violated: {0}")]
    InvalidParameter(String),

    #[error("invalid tail curve: {0}")]
    InvalidCurve(String),

    #[error("x = {x} lies beyond the truncation point {limit}")]
    OutOfRange { x: f64, limit: f64 },

    #[error("truncated construction: {0}")]
    Truncated(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("quadrature tolerance not met: achieved relative error {achieved:e}, requested {requested:e}")]
    Tolerance { achieved: f64, requested: f64 },

    #[error("lattice needs {cells} cells, limit is {limit}")]
    CellLimit { cells: usize, limit: usize },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("pilot acceptance {acceptance:e} is below the floor {floor:e}; use the quadrature route")]
    LowAcceptance { acceptance: f64, floor: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("malformed distribution spec: {0}")]
    Spec(String),
}

impl Error {
    /// True for errors that come from numerical limits rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::OutOfRange { .. }
                | Error::Truncated(_)
                | Error::Divergent(_)
                | Error::Tolerance { .. }
                | Error::CellLimit { .. }
                | Error::Inconclusive(_)
                | Error::LowAcceptance { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
