//! Truncated formal power series over exact rationals.
//!
//! A [`FormalPowerSeries`] is a dense coefficient vector `c_0 .. c_N` with an
//! explicit truncation order `N`; all operations are exact on the retained
//! coefficients and silently drop degrees above `N` (the standard quotient
//! ring `Q[[t]] / t^{N+1}`). Binary operations require equal orders — mixing
//! truncation depths is almost always a bug in calling code, so it is
//! reported as [`SeriesError::OrderMismatch`] instead of being papered over.
//!
//! Besides generic arithmetic the module provides the two series this crate
//! revolves around:
//!
//! * [`degen_exp_series`]: `e_λ^x(t) = Σ_n (x)_{n,λ} t^n / n!`
//! * [`degen_log_series`]: `log_λ(1+t) = Σ_{n≥1} λ^{n−1} (1)_{n,1/λ} t^n / n!`
//!   (the classical `log(1+t)` when λ = 0)
//!
//! Powers of these generating functions are how the triangle tables are
//! cross-checked independently of their recurrences, so this module has to
//! stay free of any triangle code.

use std::fmt::Write as _;

use crate::arith::{factorial, lambda_falling, DegenParam, Rational};

/// Error type for series arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum SeriesError {
    /// Two series of different truncation orders were combined.
    OrderMismatch { left: usize, right: usize },
    /// Composition `f(g(t))` requires `g` to have zero constant term.
    NonzeroConstantTerm,
}

impl std::fmt::Display for SeriesError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeriesError::OrderMismatch { left, right } => {
                write!(f, "series truncation orders differ ({left} vs {right})")
            }
            SeriesError::NonzeroConstantTerm => {
                write!(f, "inner series of a composition must have zero constant term")
            }
        }
    }
}

impl std::error::Error for SeriesError {}

/// A formal power series truncated at a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalPowerSeries {
    /// `coeffs[n]` is the coefficient of `t^n`; length is `order + 1`.
    coeffs: Vec<Rational>,
}

impl FormalPowerSeries {
    /// Wraps a dense coefficient vector `c_0 .. c_N`. Panics on an empty
    /// vector (a series has at least its constant term).
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        FormalPowerSeries { coeffs }
    }

    /// The zero series at the given truncation order.
    pub fn zero(order: usize) -> Self {
        FormalPowerSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    /// The constant series `1`.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// The identity series `t`. Panics if `order == 0`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[1] = Rational::one();
        s
    }

    /// Truncation order `N` (the retained degree).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `t^n`. Panics if `n` exceeds the truncation order.
    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    /// Coefficient of `t^n / n!`, i.e. `n! · c_n` — the natural reading for
    /// exponential generating functions.
    pub fn egf_coeff(&self, n: usize) -> Rational {
        factorial(n as u32) * &self.coeffs[n]
    }

    fn check_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(FormalPowerSeries { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(FormalPowerSeries { coeffs })
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        FormalPowerSeries {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Exact truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let n = self.order();
        let mut coeffs = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += &(a * b);
                }
            }
        }
        Ok(FormalPowerSeries { coeffs })
    }

    /// `k`-th power by binary exponentiation on truncated products.
    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("orders agree by construction");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("orders agree by construction");
            }
        }
        result
    }

    /// Composition `f(g(t))` by Horner evaluation in the quotient ring.
    ///
    /// `g` must have zero constant term (otherwise the truncated composition
    /// would depend on coefficients of `f` beyond the retained order).
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        self.check_order(inner)?;
        if !inner.coeff(0).is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let order = self.order();
        let mut result = Self::zero(order);
        for c in self.coeffs.iter().rev() {
            result = result.mul(inner)?;
            result.coeffs[0] += c;
        }
        Ok(result)
    }

    /// Debug dump as CSV rows `n,coefficient`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,coefficient\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{n},{c}");
        }
        out
    }
}

/// Degenerate exponential `e_λ^x(t)` as a truncated series: coefficient of
/// `t^n` is `(x)_{n,λ} / n!`. At λ = 0 this is the classical `e^{xt}`.
pub fn degen_exp_series(x: &Rational, lambda: &DegenParam, order: usize) -> FormalPowerSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut num = Rational::one(); // (x)_{n,λ}, built incrementally
    let mut fact = Rational::one();
    for n in 0..=order {
        if n > 0 {
            num *= &(x - &(Rational::from(n as u64 - 1) * lambda.value()));
            fact *= &Rational::from(n as u64);
        }
        coeffs.push(num.checked_div(&fact).expect("factorial is nonzero"));
    }
    FormalPowerSeries::from_coeffs(coeffs)
}

/// Degenerate logarithm `log_λ(1+t)` as a truncated series: coefficient of
/// `t^n` (n ≥ 1) is `λ^{n−1} (1)_{n,1/λ} / n!`, and the classical
/// `log(1+t) = Σ (−1)^{n−1} t^n / n` when λ = 0.
pub fn degen_log_series(lambda: &DegenParam, order: usize) -> FormalPowerSeries {
    let mut coeffs = vec![Rational::zero(); order + 1];
    if lambda.is_classical() {
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            *c = Rational::new(sign, n as i64);
        }
        return FormalPowerSeries::from_coeffs(coeffs);
    }
    let inv_lambda = DegenParam::new(
        lambda
            .value()
            .recip()
            .expect("nonzero λ in the non-classical branch"),
    );
    let mut lambda_pow = lambda
        .value()
        .recip()
        .expect("nonzero λ in the non-classical branch"); // λ^{n−1} starting at n = 0
    let mut fact = Rational::one();
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        lambda_pow *= lambda.value();
        fact *= &Rational::from(n as u64);
        let numer = lambda_falling(&Rational::one(), n as u32, &inv_lambda);
        *c = (&lambda_pow * numer)
            .checked_div(&fact)
            .expect("factorial is nonzero");
    }
    FormalPowerSeries::from_coeffs(coeffs)
}

/// The Lah generating kernel `t/(1−t)` as a truncated series (coefficient 1
/// in every positive degree).
pub fn lah_kernel_series(order: usize) -> FormalPowerSeries {
    let mut coeffs = vec![Rational::one(); order + 1];
    coeffs[0] = Rational::zero();
    FormalPowerSeries::from_coeffs(coeffs)
}
