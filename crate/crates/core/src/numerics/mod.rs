//! Exact Q(√3) and float scalars, and unit directions built from them.

mod direction;
mod scalar;
mod surd;

pub use direction::Direction;
pub use scalar::{scalar_cmp, sum_in, Mode, Scalar, Tolerance};
pub use surd::Surd;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed exact and float operands")]
    MixedModes,
    #[error("tolerance must be a positive finite number, got {0}")]
    InvalidTolerance(f64),
    #[error("direction is not a unit vector (squared norm {0})")]
    NotUnit(String),
    #[error("{0}")]
    Parse(String),
}
