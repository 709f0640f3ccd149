//! Coefficient backends.
//!
//! Every tensor routine in this crate is generic over [`Scalar`]. Three
//! backends exist:
//!
//! * `f64` for numerical integration,
//! * [`Rational`] (arbitrary precision) for exact identity checks,
//! * [`Laurent`](crate::symbolic::Laurent) for symbolic reduction of the
//!   ansatz families to ODE systems.
//!
//! The exact backends ignore tolerance arguments; `f64` compares with a
//! relative tolerance.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rational;

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Tolerance used by structural checks when the caller does not pass one.
    const DEFAULT_TOL: f64;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;

    /// Exact zero test (no tolerance).
    fn is_zero(&self) -> bool;

    /// Principal `n`-th root when it is representable in this backend.
    fn root(&self, n: u32) -> Option<Self>;

    /// Strict positivity. For symbolic values this means "positive whenever
    /// every parameter is positive", decided conservatively.
    fn is_positive(&self) -> bool;

    /// Numeric value; NaN for symbolic values that are not constants.
    fn to_f64(&self) -> f64;

    /// Pivot preference in elimination. Larger is better, zero means unusable.
    fn pivot_weight(&self) -> f64;

    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn powi(&self, n: i32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n.unsigned_abs() {
            acc = acc * self.clone();
        }
        if n < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }

    fn approx_zero(&self, tol: f64) -> bool {
        self.approx_eq(&Self::zero(), tol)
    }
}

impl Scalar for f64 {
    const DEFAULT_TOL: f64 = 1e-9;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn root(&self, n: u32) -> Option<Self> {
        if n == 0 || !self.is_finite() {
            return None;
        }
        if *self < 0.0 {
            if n % 2 == 0 {
                None
            } else {
                Some(-(-self).powf(1.0 / n as f64))
            }
        } else {
            Some(self.powf(1.0 / n as f64))
        }
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn pivot_weight(&self) -> f64 {
        self.abs()
    }
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = 1.0_f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= tol * scale
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

impl Scalar for Rational {
    const DEFAULT_TOL: f64 = 0.0;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn root(&self, n: u32) -> Option<Self> {
        rational_root(self, n)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn pivot_weight(&self) -> f64 {
        if Zero::is_zero(self) {
            0.0
        } else {
            1.0
        }
    }
    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn powi(&self, n: i32) -> Self {
        num_traits::Pow::pow(self, n)
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale so the integer quotient carries about 64 significant bits.
            let nb = r.numer().bits() as i64;
            let db = r.denom().bits() as i64;
            let s = 64 - (nb - db);
            let quotient = if s >= 0 {
                (r.numer() << (s as usize)) / r.denom()
            } else {
                r.numer() / (r.denom() << ((-s) as usize))
            };
            let base = quotient.to_f64().unwrap_or(f64::NAN);
            let exp = (-s).clamp(-2000, 2000) as i32;
            // split the exponent so neither factor overflows on its own
            base * 2f64.powi(exp / 2) * 2f64.powi(exp - exp / 2)
        }
    }
}

/// Exact principal root of a rational, when both numerator and denominator
/// are perfect `n`-th powers.
pub fn rational_root(r: &Rational, n: u32) -> Option<Rational> {
    if n == 0 {
        return None;
    }
    if Signed::is_negative(r) {
        if n % 2 == 0 {
            return None;
        }
        return rational_root(&-r.clone(), n).map(|x| -x);
    }
    let num = int_root(r.numer(), n)?;
    let den = int_root(r.denom(), n)?;
    Some(Rational::new(num, den))
}

fn int_root(x: &BigInt, n: u32) -> Option<BigInt> {
    let candidate = x.nth_root(n);
    if num_traits::Pow::pow(&candidate, n) == *x {
        Some(candidate)
    } else {
        None
    }
}

/// Convenience constructor used throughout tests and fixtures.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
