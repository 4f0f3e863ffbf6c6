use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An element `rational + surd * sqrt(3)` of the quadratic field Q(√3).
///
/// Both coordinates are arbitrary-precision rationals kept in lowest terms, so
/// equality is structural: two values are equal iff both coordinates agree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Surd {
    rational: BigRational,
    surd: BigRational,
}

impl Surd {
    pub fn new(rational: BigRational, surd: BigRational) -> Self {
        Surd { rational, surd }
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Surd::new(ratio(numer, denom), BigRational::zero())
    }

    /// `numer/denom * sqrt(3)`.
    pub fn sqrt3_times(numer: i64, denom: i64) -> Self {
        Surd::new(BigRational::zero(), ratio(numer, denom))
    }

    pub fn zero() -> Self {
        Surd::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Surd::new(BigRational::one(), BigRational::zero())
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.surd
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    /// Sign of `p + q√3`, decided without leaving the rationals.
    ///
    /// When `p` and `q` have opposite signs the magnitude comparison
    /// `|p| ? |q|√3` is equivalent to `p² ? 3q²`.
    pub fn signum(&self) -> Ordering {
        let p = sign_of(&self.rational);
        let q = sign_of(&self.surd);
        match (p, q) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (s, t) if s == t => s,
            (s, t) => {
                let p2 = &self.rational * &self.rational;
                let q2 = &self.surd * &self.surd * BigRational::from_integer(BigInt::from(3));
                // p² = 3q² has no nonzero rational solution.
                if p2 > q2 {
                    s
                } else {
                    t
                }
            }
        }
    }

    /// Field norm `p² − 3q²`; zero only for the zero element.
    pub fn norm(&self) -> BigRational {
        &self.rational * &self.rational
            - &self.surd * &self.surd * BigRational::from_integer(BigInt::from(3))
    }

    pub fn conjugate(&self) -> Surd {
        Surd::new(self.rational.clone(), -self.surd.clone())
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<Surd> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conjugate();
        Some(Surd::new(c.rational / &n, c.surd / n))
    }

    pub fn to_f64(&self) -> f64 {
        let p = self.rational.to_f64().unwrap_or(f64::NAN);
        let q = self.surd.to_f64().unwrap_or(f64::NAN);
        p + q * 3f64.sqrt()
    }
}

fn sign_of(r: &BigRational) -> Ordering {
    if r.is_zero() {
        Ordering::Equal
    } else if r.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

pub(crate) fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl<'a> Add<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        Surd::new(&self.rational + &rhs.rational, &self.surd + &rhs.surd)
    }
}

impl<'a> Sub<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        Surd::new(&self.rational - &rhs.rational, &self.surd - &rhs.surd)
    }
}

impl<'a> Mul<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        // (p + q√3)(r + s√3) = (pr + 3qs) + (ps + qr)√3
        let three = BigRational::from_integer(BigInt::from(3));
        Surd::new(
            &self.rational * &rhs.rational + &self.surd * &rhs.surd * three,
            &self.rational * &rhs.surd + &self.surd * &rhs.rational,
        )
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd::new(-self.rational.clone(), -self.surd.clone())
    }
}

fn write_ratio(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    write!(f, "{}/{}", r.numer(), r.denom())
}

/// Canonical form `p/q + r/s*sqrt3`, always with both coordinates spelled out.
impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ratio(f, &self.rational)?;
        f.write_str(" + ")?;
        write_ratio(f, &self.surd)?;
        f.write_str("*sqrt3")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_mixed_terms() {
        // 1/2 + √3 - 2 = -3/2 + √3 > 0 since 3 > 9/4
        let v = Surd::new(ratio(-3, 2), ratio(1, 1));
        assert_eq!(v.signum(), Ordering::Greater);
        // 2 - √3 > 0
        let v = Surd::new(ratio(2, 1), ratio(-1, 1));
        assert_eq!(v.signum(), Ordering::Greater);
        // 7/4 - √3 > 0 (49/16 > 3), 17/10 - √3 < 0 (289/100 < 3)
        assert_eq!(
            Surd::new(ratio(7, 4), ratio(-1, 1)).signum(),
            Ordering::Greater
        );
        assert_eq!(
            Surd::new(ratio(17, 10), ratio(-1, 1)).signum(),
            Ordering::Less
        );
    }

    #[test]
    fn recip_of_zero_is_none() {
        assert!(Surd::zero().recip().is_none());
    }

    #[test]
    fn recip_roundtrip() {
        let v = Surd::new(ratio(3, 7), ratio(-2, 5));
        let inv = v.recip().unwrap();
        assert_eq!(&v * &inv, Surd::one());
    }

    #[test]
    fn display_is_lowest_terms() {
        let v = Surd::new(ratio(2, 8), ratio(0, 3));
        assert_eq!(v.to_string(), "1/4 + 0/1*sqrt3");
        let v = Surd::new(ratio(-6, 4), ratio(3, -9));
        assert_eq!(v.to_string(), "-3/2 + -1/3*sqrt3");
    }
}
