use thiserror::Error;

/// Errors raised by the exact-arithmetic and geometry layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("linear system is inconsistent")]
    Inconsistent,

    #[error("identically zero denominator factor (1 - e^0)")]
    ZeroDenominator,

    #[error("denominator collapse under specialization: factor {0} becomes zero")]
    DenominatorCollapse(String),

    #[error("stability condition lies on a wall: {0}")]
    OnWall(String),

    #[error("{0} is not a minimal anticone")]
    NotMinimalAnticone(String),

    #[error("invalid GIT data: {0}")]
    InvalidData(String),

    #[error("stability conditions are not adjacent: the segment crosses {0} walls")]
    NotAdjacent(usize),

    #[error("degenerate wall crossing: {0}")]
    Degenerate(String),

    #[error("one-sided wall: M+ or M- is empty")]
    OneSidedWall,

    #[error("wall crossing is not crepant")]
    NonCrepant,

    #[error("epsilon {0} is too large: the sample point leaves the chamber adjacent to the wall")]
    EpsilonTooLarge(String),

    #[error("convergence certificate failed: {0}")]
    NotConvex(String),

    #[error("window lift did not terminate within {0} steps")]
    LiftDiverged(usize),

    #[error("sanity check failed: {0}")]
    Check(String),

    #[error("parse error in {field}: {msg}")]
    Parse { field: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            msg: msg.into(),
        }
    }
}
