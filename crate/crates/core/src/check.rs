use std::fmt;

use crate::numerics::Scalar;

/// The first cell at which two sides of a claimed equality differ.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub cell: String,
    pub left: Scalar,
    pub right: Scalar,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {} != {}", self.cell, self.left, self.right)
    }
}

/// Result of checking an equality over a whole table.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Holds,
    Fails(Mismatch),
}

impl Outcome {
    pub fn holds(&self) -> bool {
        matches!(self, Outcome::Holds)
    }

    pub fn mismatch(&self) -> Option<&Mismatch> {
        match self {
            Outcome::Holds => None,
            Outcome::Fails(m) => Some(m),
        }
    }
}

/// A conditional probability; `Undefined` when the conditioning event has
/// probability zero.
#[derive(Clone, Debug, PartialEq)]
pub enum Conditional {
    Defined(Scalar),
    Undefined,
}

impl Conditional {
    pub fn value(&self) -> Option<&Scalar> {
        match self {
            Conditional::Defined(s) => Some(s),
            Conditional::Undefined => None,
        }
    }
}

impl fmt::Display for Conditional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conditional::Defined(s) => s.fmt(f),
            Conditional::Undefined => f.write_str("undefined"),
        }
    }
}
