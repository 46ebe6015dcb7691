//! Scalars in two arithmetic modes.
//!
//! All polynomial and linear-algebra machinery is generic over [`Field`], which
//! is implemented for [`BigRational`] (exact mode) and `f64` (float mode). A
//! computation picks its mode once through the type parameter, so operands of
//! different modes can never meet inside a generic routine. [`Scalar`] is the
//! runtime-tagged form used at API boundaries; its checked operations reject
//! mixed-mode operands.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::linalg::{self, Matrix};
use super::poly::Polynomial;
use super::sturm;
use super::NumError;

/// Arithmetic mode of a computation.
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
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(NumError::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

/// Coefficient field used by the generic numeric routines.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn from_rational(r: &BigRational) -> Self;

    fn from_i64(n: i64) -> Self;

    fn to_f64(&self) -> f64;

    fn into_scalar(self) -> Scalar;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `a / b` for small integers.
    fn ratio(a: i64, b: i64) -> Self {
        Self::from_i64(a) / Self::from_i64(b)
    }

    /// Zero test: exact in exact mode, `|x| <= tol` in float mode.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Dense solve `A x = b`: fraction-free elimination in exact mode,
    /// partial pivoting in float mode.
    fn solve_dense(a: &Matrix<Self>, b: &[Self]) -> Result<Vec<Self>, NumError> {
        linalg::solve(a, b)
    }

    /// Certifies `p > 0` on the open interval `(a, b)`; `None` when the mode
    /// cannot certify.
    fn certify_positive(_p: &Polynomial<Self>, _a: &Self, _b: &Self) -> Option<bool> {
        None
    }
}

impl Field for BigRational {
    const MODE: Mode = Mode::Exact;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Exact(self)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn solve_dense(a: &Matrix<Self>, b: &[Self]) -> Result<Vec<Self>, NumError> {
        linalg::solve_fraction_free(a, b)
    }

    fn certify_positive(p: &Polynomial<Self>, a: &Self, b: &Self) -> Option<bool> {
        Some(sturm::is_positive_on_open(p, a, b))
    }
}

impl Field for f64 {
    const MODE: Mode = Mode::Float;

    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Float(self)
    }

    fn is_negligible(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }
}

/// Converts a rational to the nearest-ish double without overflowing on huge
/// numerators and denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both parts down to 64 significant bits.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let n = (r.numer() >> ns as usize).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> ds as usize).to_f64().unwrap_or(f64::NAN);
    (n / d) * 2f64.powi((ns - ds) as i32)
}

/// Parses `"3"`, `"-7/4"`, `"0.125"` or `".5"` into an exact rational.
/// Decimal literals with `d` fractional digits get denominator `10^d`.
pub fn parse_rational(text: &str) -> Result<BigRational, NumError> {
    let s = text.trim();
    let bad = || NumError::Parse(format!("invalid rational literal `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num.trim()).ok_or_else(bad)?;
        let d = parse_decimal(den.trim()).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(NumError::Parse(format!("zero denominator in `{text}`")));
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(numer, denom);
    Some(if neg { -value } else { value })
}

/// Renders a rational as `"p"` or `"p/q"` in lowest terms.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A number tagged with its arithmetic mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(x) => *x > 0.0,
        }
    }

    fn binary(
        &self,
        other: &Scalar,
        exact: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Result<Scalar, NumError> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(exact(a, b))),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(float(*a, *b))),
            _ => Err(NumError::ModeMismatch),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, NumError> {
        self.binary(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, NumError> {
        self.binary(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, NumError> {
        self.binary(other, |a, b| a * b, |a, b| a * b)
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, NumError> {
        if other.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        self.binary(other, |a, b| a / b, |a, b| a / b)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => f.write_str(&format_rational(r)),
            Scalar::Float(x) => write!(f, "{x:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_rational("0.3").unwrap(), q(3, 10));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("6/8").unwrap(), q(3, 4));
        assert_eq!(parse_rational("0.5/2").unwrap(), q(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn canonical_form() {
        let r = q(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(format_rational(&q(12, 1)), "12");
    }

    #[test]
    fn mixed_mode_is_rejected() {
        let a = Scalar::Exact(q(1, 2));
        let b = Scalar::Float(0.5);
        assert_eq!(a.checked_add(&b), Err(NumError::ModeMismatch));
        assert_eq!(b.checked_mul(&a), Err(NumError::ModeMismatch));
        assert_eq!(
            a.checked_add(&Scalar::Exact(q(1, 3))).unwrap(),
            Scalar::Exact(q(5, 6))
        );
        assert_eq!(
            a.checked_div(&Scalar::Exact(q(0, 1))),
            Err(NumError::DivisionByZero)
        );
    }

    #[test]
    fn huge_rationals_convert() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = BigRational::new(big.clone() * 3, big);
        assert!((rational_to_f64(&r) - 3.0).abs() < 1e-15);
    }
}
