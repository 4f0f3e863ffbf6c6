use super::scalar::{Mode, Scalar, Tolerance};
use super::NumericError;

/// A unit vector in R³ with [`Scalar`] components.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction {
    x: Scalar,
    y: Scalar,
    z: Scalar,
}

impl Direction {
    /// Checks that all components share a mode and that the vector has unit
    /// length (exactly, or within `tol` in float mode).
    pub fn new(x: Scalar, y: Scalar, z: Scalar, tol: Tolerance) -> Result<Self, NumericError> {
        let mode = x.mode();
        if y.mode() != mode || z.mode() != mode {
            return Err(NumericError::MixedModes);
        }
        let norm = &(&(&x * &x) + &(&y * &y)) + &(&z * &z);
        if !norm.same(&Scalar::one(mode), tol) {
            return Err(NumericError::NotUnit(norm.to_string()));
        }
        Ok(Direction { x, y, z })
    }

    pub fn components(&self) -> [&Scalar; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn mode(&self) -> Mode {
        self.x.mode()
    }

    pub fn to_float(&self) -> Direction {
        Direction {
            x: self.x.to_float(),
            y: self.y.to_float(),
            z: self.z.to_float(),
        }
    }

    pub fn dot(&self, other: &Direction) -> Result<Scalar, NumericError> {
        let xx = self.x.checked_mul(&other.x)?;
        let yy = self.y.checked_mul(&other.y)?;
        let zz = self.z.checked_mul(&other.z)?;
        xx.checked_add(&yy)?.checked_add(&zz)
    }
}
