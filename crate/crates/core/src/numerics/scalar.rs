use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::surd::Surd;
use super::NumericError;

/// Which arithmetic a [`Scalar`] lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Mode {
    type Err = NumericError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(NumericError::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

/// Absolute tolerance used when comparing float-mode scalars.
///
/// Exact scalars ignore it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-9);

    pub fn new(value: f64) -> Result<Self, NumericError> {
        if value.is_finite() && value > 0.0 {
            Ok(Tolerance(value))
        } else {
            Err(NumericError::InvalidTolerance(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::DEFAULT
    }
}

/// A probability-valued number.
///
/// Exact scalars are elements of Q(√3); float scalars are plain `f64`. The two
/// modes never mix: arithmetic across modes is an error (or a panic through the
/// operator traits), and [`Scalar::to_float`] is the only way across.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Surd),
    Float(f64),
}

impl Scalar {
    pub fn zero(mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(Surd::zero()),
            Mode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(Surd::one()),
            Mode::Float => Scalar::Float(1.0),
        }
    }

    /// Exact rational `numer/denom`.
    pub fn ratio(numer: i64, denom: i64) -> Scalar {
        Scalar::Exact(Surd::from_ratio(numer, denom))
    }

    /// Exact `p_n/p_d + q_n/q_d * sqrt(3)`.
    pub fn surd(p_numer: i64, p_denom: i64, q_numer: i64, q_denom: i64) -> Scalar {
        Scalar::Exact(Surd::new(
            super::surd::ratio(p_numer, p_denom),
            super::surd::ratio(q_numer, q_denom),
        ))
    }

    pub fn from_rational(r: BigRational) -> Scalar {
        Scalar::Exact(Surd::new(r, BigRational::zero()))
    }

    /// Small integer in the requested mode.
    pub fn int(value: i64, mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::ratio(value, 1),
            Mode::Float => Scalar::Float(value as f64),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn as_exact(&self) -> Option<&Surd> {
        match self {
            Scalar::Exact(s) => Some(s),
            Scalar::Float(_) => None,
        }
    }

    /// Real embedding of the value.
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(s) => s.to_f64(),
            Scalar::Float(v) => *v,
        }
    }

    /// Lossy conversion into float mode.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    /// Converts into `mode`. Exact → float is lossy; float → exact is refused.
    pub fn into_mode(self, mode: Mode) -> Result<Scalar, NumericError> {
        match (self, mode) {
            (s @ Scalar::Exact(_), Mode::Exact) | (s @ Scalar::Float(_), Mode::Float) => Ok(s),
            (s @ Scalar::Exact(_), Mode::Float) => Ok(s.to_float()),
            (Scalar::Float(_), Mode::Exact) => Err(NumericError::MixedModes),
        }
    }

    /// Zero test; float scalars are zero within `tol`.
    pub fn is_zero(&self, tol: Tolerance) -> bool {
        match self {
            Scalar::Exact(s) => s.is_zero(),
            Scalar::Float(v) => v.abs() <= tol.get(),
        }
    }

    fn same_mode(&self, other: &Scalar) -> Result<(), NumericError> {
        if self.mode() == other.mode() {
            Ok(())
        } else {
            Err(NumericError::MixedModes)
        }
    }

    pub fn checked_add(&self, rhs: &Scalar) -> Result<Scalar, NumericError> {
        self.same_mode(rhs)?;
        Ok(match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a + b),
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, rhs: &Scalar) -> Result<Scalar, NumericError> {
        self.same_mode(rhs)?;
        Ok(match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a - b),
            _ => unreachable!(),
        })
    }

    pub fn checked_mul(&self, rhs: &Scalar) -> Result<Scalar, NumericError> {
        self.same_mode(rhs)?;
        Ok(match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a * b),
            _ => unreachable!(),
        })
    }

    /// Division; a float divisor counts as zero only when it is exactly `0.0`.
    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, NumericError> {
        self.same_mode(rhs)?;
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                let inv = b.recip().ok_or(NumericError::DivisionByZero)?;
                Ok(Scalar::Exact(a * &inv))
            }
            (Scalar::Float(a), Scalar::Float(b)) => {
                if *b == 0.0 {
                    Err(NumericError::DivisionByZero)
                } else {
                    Ok(Scalar::Float(a / b))
                }
            }
            _ => unreachable!(),
        }
    }

    /// Ordering with float values within `tol` reported as equal.
    pub fn compare(&self, other: &Scalar, tol: Tolerance) -> Result<Ordering, NumericError> {
        self.same_mode(other)?;
        Ok(match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => {
                if (a - b).abs() <= tol.get() {
                    Ordering::Equal
                } else if a < b {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            _ => unreachable!(),
        })
    }

    /// Equality under `tol`. Scalars of different modes are never equal.
    pub fn same(&self, other: &Scalar, tol: Tolerance) -> bool {
        matches!(self.compare(other, tol), Ok(Ordering::Equal))
    }

    /// `0 <= self <= 1` under the real embedding (with `tol` slack for floats).
    pub fn is_probability(&self, tol: Tolerance) -> bool {
        let mode = self.mode();
        let lo = self.compare(&Scalar::zero(mode), tol);
        let hi = self.compare(&Scalar::one(mode), tol);
        matches!(lo, Ok(Ordering::Greater | Ordering::Equal))
            && matches!(hi, Ok(Ordering::Less | Ordering::Equal))
    }
}

/// Ordering of two scalars at the default tolerance.
pub fn scalar_cmp(a: &Scalar, b: &Scalar) -> Result<Ordering, NumericError> {
    a.compare(b, Tolerance::DEFAULT)
}

/// Sum of `items` starting from zero in `mode`.
///
/// # Panics
///
/// If any item is in a different mode.
pub fn sum_in<'a, I>(mode: Mode, items: I) -> Scalar
where
    I: IntoIterator<Item = &'a Scalar>,
{
    items
        .into_iter()
        .fold(Scalar::zero(mode), |acc, s| &acc + s)
}

macro_rules! panicking_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("scalar {}: {e}", stringify!($method)),
                }
            }
        }

        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $trait::$method(&self, &rhs)
            }
        }
    };
}

panicking_op!(Add, add, checked_add);
panicking_op!(Sub, sub, checked_sub);
panicking_op!(Mul, mul, checked_mul);
panicking_op!(Div, div, checked_div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(s) => Scalar::Exact(-s),
            Scalar::Float(v) => Scalar::Float(-v),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<Surd> for Scalar {
    fn from(s: Surd) -> Self {
        Scalar::Exact(s)
    }
}

/// Exact scalars print as `p/q + r/s*sqrt3`; floats as Rust's shortest
/// round-tripping decimal, always with a `.` or exponent so that they never
/// re-parse as exact.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(s) => s.fmt(f),
            Scalar::Float(v) => write!(f, "{v:?}"),
        }
    }
}

fn parse_ratio(text: &str) -> Result<BigRational, NumericError> {
    let bad = || NumericError::Parse(format!("malformed rational `{text}`"));
    let text = text.trim();
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(NumericError::DivisionByZero);
    }
    Ok(BigRational::new(n, d))
}

/// Accepts `p/q + r/s*sqrt3`, `p/q - r/s*sqrt3`, a bare rational `p/q` or
/// integer, and decimal float literals (anything containing `.`, `e` or
/// spelled `inf`/`nan`).
impl FromStr for Scalar {
    type Err = NumericError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        if text.is_empty() {
            return Err(NumericError::Parse("empty scalar".into()));
        }
        if let Some(head) = text.strip_suffix("sqrt3") {
            let head = head.trim_end();
            let head = head
                .strip_suffix('*')
                .ok_or_else(|| NumericError::Parse(format!("expected `*sqrt3` in `{text}`")))?;
            // Split at the binary +/- separating the two coordinates; skip a
            // leading sign on the rational part.
            let bytes = head.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&i| {
                    (bytes[i] == b'+' || bytes[i] == b'-')
                        && head[..i]
                            .trim_end()
                            .chars()
                            .last()
                            .is_some_and(|c| c.is_ascii_digit())
                })
                .ok_or_else(|| NumericError::Parse(format!("malformed surd `{text}`")))?;
            let p = parse_ratio(&head[..split])?;
            let mut q = parse_ratio(&head[split + 1..])?;
            if bytes[split] == b'-' {
                q = -q;
            }
            return Ok(Scalar::Exact(Surd::new(p, q)));
        }
        let lower = text.to_ascii_lowercase();
        if lower.contains(['.', 'e']) || lower.contains("inf") || lower.contains("nan") {
            return lower
                .parse::<f64>()
                .map(Scalar::Float)
                .map_err(|_| NumericError::Parse(format!("malformed float `{text}`")));
        }
        parse_ratio(text).map(Scalar::from_rational)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_rational_and_surd() {
        let v = &Scalar::ratio(1, 1) + &Scalar::surd(0, 1, 1, 1);
        assert_eq!(v, Scalar::surd(1, 1, 1, 1));
    }

    #[test]
    fn half_root_three_squared() {
        let h = Scalar::surd(0, 1, 1, 2);
        assert_eq!(&h * &h, Scalar::ratio(3, 4));
    }

    #[test]
    fn quarter_times_three_halves() {
        // 1/4 * (1 + 1/2): rational oracle gives 3/8
        let v = &Scalar::ratio(1, 4) * &(&Scalar::ratio(1, 1) + &Scalar::ratio(1, 2));
        assert_eq!(v, Scalar::ratio(3, 8));
    }

    #[test]
    fn mixed_modes_rejected() {
        let e = Scalar::ratio(1, 2);
        let f = Scalar::Float(0.5);
        assert_eq!(e.checked_add(&f), Err(NumericError::MixedModes));
        assert_eq!(e.checked_mul(&f), Err(NumericError::MixedModes));
        assert_eq!(scalar_cmp(&e, &f), Err(NumericError::MixedModes));
        assert!(!e.same(&f, Tolerance::DEFAULT));
    }

    #[test]
    #[should_panic(expected = "mixed")]
    fn operator_panics_on_mixed_modes() {
        let _ = Scalar::ratio(1, 2) + Scalar::Float(0.5);
    }

    #[test]
    fn division_by_zero() {
        let one = Scalar::ratio(1, 1);
        assert_eq!(
            one.checked_div(&Scalar::zero(Mode::Exact)),
            Err(NumericError::DivisionByZero)
        );
        assert_eq!(
            Scalar::Float(1.0).checked_div(&Scalar::Float(0.0)),
            Err(NumericError::DivisionByZero)
        );
    }

    #[test]
    fn comparisons() {
        assert_eq!(
            scalar_cmp(&Scalar::surd(0, 1, 1, 2), &Scalar::ratio(1, 2)),
            Ok(Ordering::Greater)
        );
        assert_eq!(
            scalar_cmp(&Scalar::ratio(1, 4), &Scalar::ratio(1, 4)),
            Ok(Ordering::Equal)
        );
        assert_eq!(
            scalar_cmp(&Scalar::surd(1, 2, 1, 1), &Scalar::ratio(2, 1)),
            Ok(Ordering::Greater)
        );
        let tol = Tolerance::DEFAULT;
        assert!(Scalar::Float(0.25).same(&Scalar::Float(0.25 + 1e-12), tol));
        assert!(!Scalar::Float(0.25).same(&Scalar::Float(0.25 + 1e-6), tol));
    }

    #[test]
    fn parse_and_print() {
        let cases = [
            ("1/4 + 0/1*sqrt3", Scalar::ratio(1, 4)),
            ("1/2 + 1/1*sqrt3", Scalar::surd(1, 2, 1, 1)),
            ("-1/2 + -3/4*sqrt3", Scalar::surd(-1, 2, -3, 4)),
            ("1/2 - 3/4*sqrt3", Scalar::surd(1, 2, -3, 4)),
            ("2/4", Scalar::ratio(1, 2)),
            ("1", Scalar::ratio(1, 1)),
            ("-3", Scalar::ratio(-3, 1)),
        ];
        for (text, want) in cases {
            assert_eq!(text.parse::<Scalar>().unwrap(), want, "{text}");
        }
        assert_eq!("0.25".parse::<Scalar>().unwrap(), Scalar::Float(0.25));
        assert_eq!("1e-3".parse::<Scalar>().unwrap(), Scalar::Float(1e-3));
        assert_eq!(Scalar::Float(1.0).to_string(), "1.0");
        assert_eq!(Scalar::ratio(2, 8).to_string(), "1/4 + 0/1*sqrt3");
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
        assert!("1/2 + sqrt3".parse::<Scalar>().is_err());
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
        assert!(Tolerance::new(1e-6).is_ok());
    }

    #[test]
    fn probability_range() {
        let tol = Tolerance::DEFAULT;
        assert!(Scalar::ratio(0, 1).is_probability(tol));
        assert!(Scalar::ratio(1, 1).is_probability(tol));
        assert!(!Scalar::ratio(5, 4).is_probability(tol));
        assert!(!Scalar::ratio(-1, 4).is_probability(tol));
        assert!(Scalar::surd(0, 1, 1, 2).is_probability(tol));
        assert!(!Scalar::surd(0, 1, 1, 1).is_probability(tol));
    }
}
