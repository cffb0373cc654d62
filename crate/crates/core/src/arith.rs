//! Exact rational arithmetic and the λ-deformed scalar primitives everything
//! else in this crate is built from.
//!
//! The central type is [`Rational`], an arbitrary-precision rational kept in
//! canonical form (fully reduced, denominator positive). On top of it this
//! module provides the classical falling and rising factorials, the
//! λ-falling factorial
//!
//! ```text
//! (x)_{0,λ} = 1,   (x)_{n,λ} = x (x − λ) (x − 2λ) ⋯ (x − (n−1)λ),
//! ```
//!
//! and closed-form evaluation of the degenerate exponential and logarithm
//!
//! ```text
//! e_λ^x(t) = (1 + λt)^{x/λ},        log_λ(1 + t) = ((1 + t)^λ − 1) / λ,
//! ```
//!
//! which are exact rationals precisely when the exponent involved is an
//! integer. Evaluations that would leave the rationals (non-integer exponent,
//! λ = 0 in closed form) are rejected with an error rather than approximated;
//! callers that need those cases work with truncated power series instead.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest integer exponent accepted by the closed-form power evaluators.
///
/// A rational raised to an exponent beyond this produces numbers with
/// megabytes of digits; such inputs are rejected as resource abuse rather
/// than attempted.
const MAX_EXPONENT: i64 = 1 << 20;

/// Error type for scalar arithmetic and closed-form evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum ArithError {
    /// Division by zero (or a negative power of zero) was requested.
    DivisionByZero,
    /// `degen_exp_exact` was called with `x/λ` not an integer (this includes
    /// λ = 0); the value exists but is not rational.
    NonIntegerExponent,
    /// `degen_log_exact` was called with λ not a nonzero integer; the value
    /// exists but is not rational.
    NonIntegerLambda,
    /// The closed form was evaluated at a pole (zero base, negative exponent).
    PoleError,
    /// The exponent is an integer but too large to evaluate exactly.
    ExponentTooLarge,
    /// A rational literal could not be parsed.
    InvalidRational(String),
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::DivisionByZero => write!(f, "division by zero"),
            ArithError::NonIntegerExponent => {
                write!(f, "degenerate exponential exponent x/λ is not an integer")
            }
            ArithError::NonIntegerLambda => {
                write!(f, "degenerate logarithm requires λ to be a nonzero integer")
            }
            ArithError::PoleError => write!(f, "evaluation at a pole of the closed form"),
            ArithError::ExponentTooLarge => {
                write!(f, "integer exponent too large for exact evaluation")
            }
            ArithError::InvalidRational(s) => write!(f, "invalid rational literal `{s}`"),
        }
    }
}

impl std::error::Error for ArithError {}

/// An arbitrary-precision rational number in canonical form.
///
/// Canonical form means `gcd(p, q) = 1` and `q > 0`; it is established on
/// construction and preserved by every operation, so equality and hashing
/// are structural. The text form is `p/q`, or just `p` when `q = 1` — the
/// same shape [`FromStr`] accepts.
///
/// Arithmetic operators are exact. `/` panics on a zero divisor (as the
/// underlying big-rational type does); use [`Rational::checked_div`] when the
/// divisor is not known to be nonzero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `n/d` in canonical form. Panics if `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// Builds `n/d` from big integers in canonical form. Panics if `d == 0`.
    pub fn from_big(n: BigInt, d: BigInt) -> Self {
        assert!(!d.is_zero(), "zero denominator");
        Rational(BigRational::new(n, d))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// True when the denominator is 1.
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// The numerator when the value is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    /// Exact division with a zero check instead of a panic.
    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, ArithError> {
        if rhs.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    /// Multiplicative inverse; `DivisionByZero` on zero.
    pub fn recip(&self) -> Result<Rational, ArithError> {
        Rational::one().checked_div(self)
    }

    /// Integer power with negative exponents allowed. `0^0 = 1`; a negative
    /// power of zero is `DivisionByZero`.
    pub fn pow(&self, exp: i64) -> Result<Rational, ArithError> {
        if exp == 0 {
            return Ok(Rational::one());
        }
        if exp.unsigned_abs() > MAX_EXPONENT as u64 {
            return Err(ArithError::ExponentTooLarge);
        }
        if self.is_zero() {
            return if exp > 0 {
                Ok(Rational::zero())
            } else {
                Err(ArithError::DivisionByZero)
            };
        }
        let e = exp.unsigned_abs() as u32;
        let p = self.numer().pow(e);
        let q = self.denom().pow(e);
        Ok(if exp > 0 {
            Rational::from_big(p, q)
        } else {
            Rational::from_big(q, p)
        })
    }

    /// Nearest 64-bit float, for presentation only; exact values stay exact.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn min(self, other: Rational) -> Rational {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rational) -> Rational {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // BigRational prints `p` for integers and `p/q` otherwise, which is
        // exactly the canonical text form.
        write!(f, "{}", self.0)
    }
}

impl FromStr for Rational {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::InvalidRational(s.to_string());
        let mut parts = s.splitn(2, '/');
        let numer: BigInt = parts
            .next()
            .and_then(|p| p.trim().parse().ok())
            .ok_or_else(bad)?;
        let denom: BigInt = match parts.next() {
            Some(p) => p.trim().parse().map_err(|_| bad())?,
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err(bad());
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

impl std::hash::Hash for Rational {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        // Canonical form makes (numer, denom) a sound structural hash key.
        self.0.numer().hash(state);
        self.0.denom().hash(state);
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
}

impl From<u32> for Rational {
    fn from(n: u32) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }
}

macro_rules! forward_binop {
    ($imp:ident, $method:ident) => {
        impl $imp for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $imp<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl $imp<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl $imp<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

/// The deformation parameter λ of the degenerate special functions.
///
/// Any exact rational is accepted, λ = 0 included; each consumer states which
/// values it supports (the closed-form evaluators below need integer
/// exponents, the distribution and Bell-evaluation layers restrict λ to
/// reciprocals of integers, and λ = 0 is the classical limit).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegenParam {
    lambda: Rational,
}

impl DegenParam {
    pub fn new(lambda: Rational) -> Self {
        DegenParam { lambda }
    }

    /// Convenience constructor for small λ = n/d.
    pub fn from_ratio(n: i64, d: i64) -> Self {
        DegenParam::new(Rational::new(n, d))
    }

    /// The classical limit λ = 0.
    pub fn classical() -> Self {
        DegenParam::new(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.lambda
    }

    pub fn is_classical(&self) -> bool {
        self.lambda.is_zero()
    }

    /// Returns `m` when `1/λ = m` is a (signed) integer, i.e. when the
    /// numerator of λ in canonical form is ±1. This is the condition under
    /// which `e_λ^{±1}` evaluates to an exact rational.
    pub fn reciprocal_integer(&self) -> Option<BigInt> {
        if self.lambda.is_zero() {
            return None;
        }
        match self.lambda.numer().sign() {
            Sign::Plus if self.lambda.numer().is_one() => Some(self.lambda.denom().clone()),
            Sign::Minus if (-self.lambda.numer()).is_one() => Some(-self.lambda.denom()),
            _ => None,
        }
    }
}

impl fmt::Display for DegenParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lambda)
    }
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> Rational {
    let mut acc = BigInt::one();
    for j in 2..=n {
        acc *= j;
    }
    Rational::from(acc)
}

/// Binomial coefficient `C(n, k)` for integer arguments.
pub fn binomial(n: u64, k: u64) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k {
        num *= n - j;
        den *= j + 1;
    }
    Rational::from_big(num, den)
}

/// Falling factorial `(x)_n = x (x−1) ⋯ (x−n+1)`, with `(x)_0 = 1`.
pub fn falling_factorial(x: &Rational, n: u32) -> Rational {
    let mut acc = Rational::one();
    for j in 0..n {
        acc *= &(x - &Rational::from(j));
    }
    acc
}

/// Rising factorial `⟨x⟩_n = x (x+1) ⋯ (x+n−1)`, with `⟨x⟩_0 = 1`.
pub fn rising_factorial(x: &Rational, n: u32) -> Rational {
    let mut acc = Rational::one();
    for j in 0..n {
        acc *= &(x + &Rational::from(j));
    }
    acc
}

/// λ-falling factorial `(x)_{n,λ} = x (x−λ) ⋯ (x−(n−1)λ)`, with
/// `(x)_{0,λ} = 1`. At λ = 1 it is the ordinary falling factorial and at
/// λ = 0 it degenerates to the power `x^n`.
pub fn lambda_falling(x: &Rational, n: u32, lambda: &DegenParam) -> Rational {
    let mut acc = Rational::one();
    let mut shift = Rational::zero();
    for _ in 0..n {
        acc *= &(x - &shift);
        if acc.is_zero() {
            return acc;
        }
        shift += lambda.value();
    }
    acc
}

/// Closed-form degenerate exponential `e_λ^x(t) = (1 + λt)^{x/λ}`.
///
/// Exact only when the exponent `x/λ` is an integer; otherwise
/// `NonIntegerExponent` is returned (λ = 0 included — the classical `e^{xt}`
/// is transcendental) and the caller must fall back to the power-series
/// representation. A zero base with a negative exponent is a pole.
pub fn degen_exp_exact(
    x: &Rational,
    lambda: &DegenParam,
    t: &Rational,
) -> Result<Rational, ArithError> {
    if lambda.is_classical() {
        return Err(ArithError::NonIntegerExponent);
    }
    let exponent = x.checked_div(lambda.value())?;
    if !exponent.is_integer() {
        return Err(ArithError::NonIntegerExponent);
    }
    let e = exponent
        .numer()
        .to_i64()
        .ok_or(ArithError::ExponentTooLarge)?;
    let base = Rational::one() + &(lambda.value() * t);
    if base.is_zero() && e < 0 {
        return Err(ArithError::PoleError);
    }
    base.pow(e)
}

/// Closed-form degenerate logarithm `log_λ(1 + t) = ((1 + t)^λ − 1) / λ`.
///
/// Exact only when λ is a nonzero integer; otherwise `NonIntegerLambda` is
/// returned and the caller must fall back to the power-series representation.
/// For negative λ the point `t = −1` is a pole.
pub fn degen_log_exact(t: &Rational, lambda: &DegenParam) -> Result<Rational, ArithError> {
    if lambda.is_classical() || !lambda.value().is_integer() {
        return Err(ArithError::NonIntegerLambda);
    }
    let l = lambda
        .value()
        .numer()
        .to_i64()
        .ok_or(ArithError::ExponentTooLarge)?;
    let base = Rational::one() + t;
    if base.is_zero() && l < 0 {
        return Err(ArithError::PoleError);
    }
    let powered = base.pow(l)?;
    (powered - Rational::one()).checked_div(lambda.value())
}

/// Total order on pairs used for deterministic report sorting.
pub fn cmp_rationals(a: &Rational, b: &Rational) -> Ordering {
    a.cmp(b)
}
