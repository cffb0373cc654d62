//! The five Bell/Lah-Bell polynomial families and the certified truncation
//! engine behind the ones defined by infinite series.
//!
//! Two of the families are plain polynomials and evaluate exactly for every
//! rational argument:
//!
//! * [`fully_degen_bell`]: `β_{n,λ}(x) = Σ_k S_{2,λ}(n,k) (x)_{k,λ}`
//! * [`lah_bell`]: `B^L_n(x) = Σ_k L(n,k) x^k`
//!
//! The other three are Dobinski-style normalized series of the shape
//!
//! ```text
//! e_λ^{-1}(x) · Σ_{k≥0} w(k) · x^k (1)_{k,λ} / k!
//! ```
//!
//! with weight `w(k) = (k)_{n,λ}` ([`bell_deg`]), `k^n` ([`dimorphic_bell`]),
//! or `⟨k⟩_n` ([`lah_bell_deg`]); [`lah_bell_zt`] is the latter divided by
//! `1 − e_λ^{-1}(x)`. How such a series is evaluated depends on the regime of
//! the evaluation point:
//!
//! * λ = 1/M ([`Regime::FiniteDobinski`]): `(1)_{k,λ}` vanishes for every
//!   k > M, the series terminates, and the result is an exact rational.
//! * λ = −1/M with |λx| < 1 ([`Regime::Truncated`]): the series converges at
//!   geometric rate |λx| and the evaluator returns a certified enclosure.
//! * λ = 0 ([`Regime::ClassicalLimit`]): the normalizer is transcendental;
//!   the series evaluators reject the point and only the two polynomial
//!   families apply.
//!
//! # How the tail is certified
//!
//! Writing `t_k` for the k-th term, the ratio of consecutive terms splits
//! into a weight-free part and a weight part:
//!
//! ```text
//! |t_{k+1} / t_k| = |x| · (1 + k|λ|)/(k + 1) · |w(k+1)/w(k)|
//! ```
//!
//! For each weight there is an elementary bound `ρ̄(k)` on `|w(j+1)/w(j)|`
//! valid for every j ≥ k — e.g. `(1 + 1/k)^n` for `k^n` and `(k+n)/k` for
//! `⟨k⟩_n` — and `(1 + j|λ|)/(j + 1) ≤ max((1 + k|λ|)/(k + 1), |λ|)` for
//! every j ≥ k. The product of the three factors is a nonincreasing envelope
//! `env(k)` with limit |λx| < 1. Fixing `r* = (1 + |λx|)/2`, the engine scans
//! for the first `K₀` with `env(K₀) ≤ r*`; from that index on the term
//! ratios are additionally *checked numerically term by term* rather than
//! trusted, and once a term `t_K` with `|t_K| · r*/(1 − r*)` below the
//! requested bound has been added, the geometric series argument certifies
//!
//! ```text
//! |Σ_{j>K} t_j|  ≤  |t_K| · r* / (1 − r*).
//! ```
//!
//! The returned interval is one-sided `[partial, partial + bound]` when all
//! terms are nonnegative (x > 0) and symmetric otherwise, and its width never
//! exceeds the budget's `tail_bound_target`.

use std::fmt;

use crate::arith::{
    degen_exp_exact, falling_factorial, lambda_falling, rising_factorial, DegenParam, Rational,
};
use crate::triangles::{lah, stirling2_deg};
use crate::value::Value;

/// Reject deformations finer than this (λ = ±1/M with M beyond the cap):
/// finite-regime sums have M + 1 terms, so these are resource abuse, not
/// legitimate evaluations.
pub const MAX_RECIPROCAL: u64 = 1 << 20;

/// Error type for Bell-family evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum BellError {
    /// The (x, λ) pair is outside every supported regime, or the evaluator
    /// does not support the point's regime.
    UnsupportedRegime(String),
    /// The series did not reach the requested tail bound within the term
    /// budget.
    BudgetExhausted { terms_used: u32 },
    /// 1 + λx = 0: the normalizer `e_λ^{-1}(x)` has a pole at the point.
    Pole,
    /// A zero divisor arose (the zero-truncated family at a point where
    /// `e_λ(x) = 1`).
    DivisionByZero,
}

impl fmt::Display for BellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BellError::UnsupportedRegime(why) => write!(f, "unsupported regime: {why}"),
            BellError::BudgetExhausted { terms_used } => write!(
                f,
                "truncation budget exhausted after {terms_used} terms without certifying the tail"
            ),
            BellError::Pole => write!(f, "evaluation point is a pole of the normalizer"),
            BellError::DivisionByZero => write!(f, "division by zero in the zero-truncated family"),
        }
    }
}

impl std::error::Error for BellError {}

/// Convergence regime of an evaluation point (see the module docs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// λ = 1/M: every Dobinski series terminates after M + 1 terms.
    FiniteDobinski { m: u32 },
    /// λ = −1/M and |λx| < 1: geometric convergence, certified enclosures.
    Truncated { m: u32 },
    /// λ = 0: only the polynomial families are defined.
    ClassicalLimit,
}

/// A validated evaluation point (x, λ) for the series-defined families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPoint {
    x: Rational,
    lambda: DegenParam,
    regime: Regime,
}

impl EvalPoint {
    /// Classifies (x, λ) into a regime, rejecting pairs where the series
    /// evaluators would be meaningless: λ whose reciprocal is not an
    /// integer, λ = −1/M with |λx| ≥ 1 (the series diverges), and poles of
    /// the normalizer (1 + λx = 0).
    pub fn new(x: Rational, lambda: DegenParam) -> Result<Self, BellError> {
        let regime = if lambda.is_classical() {
            Regime::ClassicalLimit
        } else {
            let m = lambda.reciprocal_integer().ok_or_else(|| {
                BellError::UnsupportedRegime(format!(
                    "λ = {lambda} is not the reciprocal of a nonzero integer"
                ))
            })?;
            let m_abs: u64 = m
                .magnitude()
                .try_into()
                .map_err(|_| BellError::UnsupportedRegime("1/λ out of range".into()))?;
            if m_abs > MAX_RECIPROCAL {
                return Err(BellError::UnsupportedRegime(format!(
                    "1/λ = ±{m_abs} exceeds the supported cap {MAX_RECIPROCAL}"
                )));
            }
            if (Rational::one() + &(lambda.value() * &x)).is_zero() {
                return Err(BellError::Pole);
            }
            if m.sign() == num_bigint::Sign::Plus {
                Regime::FiniteDobinski { m: m_abs as u32 }
            } else {
                let rate = (lambda.value() * &x).abs();
                if rate >= Rational::one() {
                    return Err(BellError::UnsupportedRegime(format!(
                        "|λx| = {rate} ≥ 1: the Dobinski series diverges"
                    )));
                }
                Regime::Truncated { m: m_abs as u32 }
            }
        };
        Ok(EvalPoint { x, lambda, regime })
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn lambda(&self) -> &DegenParam {
        &self.lambda
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `e_λ(x)` — exact in both series regimes by construction.
    pub fn degen_exp(&self) -> Result<Rational, BellError> {
        match self.regime {
            Regime::ClassicalLimit => Err(BellError::UnsupportedRegime(
                "e_λ(x) has no exact value at λ = 0".into(),
            )),
            _ => Ok(degen_exp_exact(&Rational::one(), &self.lambda, &self.x)
                .expect("regime classification guarantees an integer exponent and no pole")),
        }
    }

    /// `e_λ^{-1}(x)`.
    pub fn degen_exp_inv(&self) -> Result<Rational, BellError> {
        match self.regime {
            Regime::ClassicalLimit => Err(BellError::UnsupportedRegime(
                "e_λ^{-1}(x) has no exact value at λ = 0".into(),
            )),
            _ => Ok(
                degen_exp_exact(&(-Rational::one()), &self.lambda, &self.x)
                    .expect("regime classification guarantees an integer exponent and no pole"),
            ),
        }
    }
}

/// Term budget and required tail bound for certified truncation.
///
/// `tail_bound_target` bounds the **width of the returned interval**, after
/// all normalizers are applied; it must be positive. `max_terms` caps the
/// number of series terms examined before giving up with
/// [`BellError::BudgetExhausted`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationBudget {
    pub max_terms: u32,
    pub tail_bound_target: Rational,
}

impl TruncationBudget {
    pub fn new(max_terms: u32, tail_bound_target: Rational) -> Self {
        assert!(
            tail_bound_target.is_positive(),
            "tail bound target must be positive"
        );
        TruncationBudget {
            max_terms,
            tail_bound_target,
        }
    }

    /// 10^-exponent as the target, with a generous term cap.
    pub fn decimal(exponent: i64) -> Self {
        let target = Rational::from(10u64)
            .pow(-exponent)
            .expect("small fixed exponent");
        TruncationBudget::new(4096, target)
    }
}

impl Default for TruncationBudget {
    /// Width at most 10⁻⁴⁰ within 4096 terms — far tighter than any
    /// comparison tolerance used elsewhere in the crate.
    fn default() -> Self {
        TruncationBudget::decimal(40)
    }
}

/// The k-dependent weight `w(k)` of an exponentially weighted series
/// `Σ w(k) x^k (1)_{k,λ} / k!`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum KWeight {
    /// 1 — bare distribution mass.
    One,
    /// `k^n`.
    Power(u32),
    /// `(k)_{n,λ}`.
    LambdaFalling(u32),
    /// `⟨k⟩_n`.
    Rising(u32),
    /// `(k)_n`.
    Falling(u32),
    /// `C(k+n−1, n) = ⟨k⟩_n / n!`.
    Binomial(u32),
}

impl KWeight {
    pub(crate) fn eval(&self, k: u64, lambda: &DegenParam) -> Rational {
        let kq = Rational::from(k);
        match *self {
            KWeight::One => Rational::one(),
            KWeight::Power(n) => {
                if n == 0 {
                    Rational::one()
                } else {
                    kq.pow(n as i64).expect("small exponent")
                }
            }
            KWeight::LambdaFalling(n) => lambda_falling(&kq, n, lambda),
            KWeight::Rising(n) => rising_factorial(&kq, n),
            KWeight::Falling(n) => falling_factorial(&kq, n),
            KWeight::Binomial(n) => rising_factorial(&kq, n)
                .checked_div(&crate::arith::factorial(n))
                .expect("factorial is nonzero"),
        }
    }

    /// Upper bound on `|w(j+1)/w(j)|` valid for **all** j ≥ k, nonincreasing
    /// in k. Only sound in the regimes the engine runs in (λ ≤ 0 for the
    /// λ-falling weight), and only from [`Self::envelope_start`] on.
    fn ratio_envelope(&self, k: u64) -> Rational {
        let kq = Rational::from(k);
        match *self {
            KWeight::One => Rational::one(),
            KWeight::Power(n) | KWeight::LambdaFalling(n) => {
                let base = Rational::one() + Rational::from(k).recip().expect("k ≥ 1");
                base.pow(n as i64).expect("small exponent")
            }
            KWeight::Rising(n) | KWeight::Binomial(n) => {
                (&kq + &Rational::from(n)).checked_div(&kq).expect("k ≥ 1")
            }
            KWeight::Falling(n) => (&kq + &Rational::one())
                .checked_div(&(&kq + &Rational::one() - Rational::from(n)))
                .expect("k ≥ n in the envelope's validity range"),
        }
    }

    /// First index where `ratio_envelope` is valid (and where all later
    /// terms are nonzero for x ≠ 0, λ < 0).
    fn envelope_start(&self) -> u64 {
        match *self {
            KWeight::Falling(n) => (n as u64).max(1),
            _ => 1,
        }
    }
}

/// Outcome of a certified summation: `partial` plus a proven bound on the
/// absolute value of everything that was not summed.
#[derive(Debug, Clone)]
pub(crate) struct TailSum {
    pub partial: Rational,
    pub bound: Rational,
    #[allow(dead_code)] // diagnostic, surfaced in error messages and tests
    pub terms_used: u32,
}

/// Exact finite sum `Σ_{k=start}^{M} w(k) x^k (1)_{k,λ} / k!` for the
/// terminating regime λ = 1/M.
pub(crate) fn exp_weighted_finite_sum(
    x: &Rational,
    lambda: &DegenParam,
    weight: KWeight,
    start: u64,
    m: u32,
) -> Rational {
    let mut pow_x = Rational::one();
    let mut one_fall = Rational::one(); // (1)_{k,λ}
    let mut k_fact = Rational::one();
    let mut acc = Rational::zero();
    for k in 0..=(m as u64) {
        if k > 0 {
            pow_x *= x;
            one_fall *= &(Rational::one() - &(Rational::from(k - 1) * lambda.value()));
            k_fact *= &Rational::from(k);
        }
        if k < start || pow_x.is_zero() || one_fall.is_zero() {
            continue;
        }
        let term = (weight.eval(k, lambda) * &pow_x * &one_fall)
            .checked_div(&k_fact)
            .expect("factorial is nonzero");
        acc += &term;
    }
    acc
}

/// Certified summation of `Σ_{k≥start} w(k) x^k (1)_{k,λ} / k!` in the
/// geometric regime (λ = −1/M, |λx| < 1), to the given absolute tail bound.
/// See the module docs for the argument that makes the bound a theorem.
pub(crate) fn exp_weighted_tail_sum(
    x: &Rational,
    lambda: &DegenParam,
    weight: KWeight,
    start: u64,
    max_terms: u32,
    target: &Rational,
) -> Result<TailSum, BellError> {
    debug_assert!(lambda.value().is_negative());
    let abs_x = x.abs();
    let abs_lambda = lambda.value().abs();
    let rate = &abs_x * &abs_lambda;
    debug_assert!(rate < Rational::one());
    let r_star = (Rational::one() + &rate) * Rational::new(1, 2);
    let geo = r_star
        .clone()
        .checked_div(&(Rational::one() - &r_star))
        .expect("r* < 1");

    // env(k) = |x| · max((1 + k|λ|)/(k+1), |λ|) · ρ̄_w(k)
    let env = |k: u64| -> Rational {
        let base = (Rational::one() + &(Rational::from(k) * &abs_lambda))
            .checked_div(&Rational::from(k + 1))
            .expect("k + 1 > 0");
        &abs_x * base.max(abs_lambda.clone()) * weight.ratio_envelope(k)
    };

    // First index from which the geometric bound with ratio r* is in force.
    let mut k0 = weight.envelope_start().max(start).max(1);
    while env(k0) > r_star {
        k0 += 1;
        if k0 > max_terms as u64 {
            return Err(BellError::BudgetExhausted {
                terms_used: max_terms,
            });
        }
    }

    let mut pow_x = Rational::one();
    let mut one_fall = Rational::one();
    let mut k_fact = Rational::one();
    let mut partial = Rational::zero();
    let mut prev_abs: Option<Rational> = None;
    for k in 0..=(max_terms as u64) {
        if k > 0 {
            pow_x *= x;
            one_fall *= &(Rational::one() - &(Rational::from(k - 1) * lambda.value()));
            k_fact *= &Rational::from(k);
        }
        let term = (weight.eval(k, lambda) * &pow_x * &one_fall)
            .checked_div(&k_fact)
            .expect("factorial is nonzero");
        let abs_term = term.abs();
        if k >= start {
            partial += &term;
        }
        if k > k0 {
            // The envelope says this ratio cannot exceed r*; verify the
            // claim on the actual numbers instead of assuming it.
            if let Some(prev) = &prev_abs {
                if !prev.is_zero() {
                    assert!(
                        abs_term <= &r_star * prev,
                        "term ratio exceeded the certified envelope at k = {k}"
                    );
                }
            }
        }
        if k >= k0 {
            prev_abs = Some(abs_term.clone());
            let bound = &abs_term * &geo;
            if &bound <= target {
                return Ok(TailSum {
                    partial,
                    bound,
                    terms_used: (k + 1) as u32,
                });
            }
        }
    }
    Err(BellError::BudgetExhausted {
        terms_used: max_terms,
    })
}

/// Shared evaluation path of the three Dobinski-style families:
/// `prefactor · e_λ^{-1}(x) · Σ_k w(k) x^k (1)_{k,λ} / k!`.
fn dobinski_eval(
    point: &EvalPoint,
    weight: KWeight,
    prefactor: &Rational,
    budget: &TruncationBudget,
) -> Result<Value, BellError> {
    let scale = prefactor * &point.degen_exp_inv()?;
    match point.regime {
        Regime::ClassicalLimit => unreachable!("degen_exp_inv rejected λ = 0"),
        Regime::FiniteDobinski { m } => {
            let sum = exp_weighted_finite_sum(&point.x, &point.lambda, weight, 0, m);
            Ok(Value::exact(sum * &scale))
        }
        Regime::Truncated { .. } => {
            if scale.is_zero() {
                return Ok(Value::exact(Rational::zero()));
            }
            // Aim for half the target pre-scaling so that even a symmetric
            // enclosure (x < 0) lands within the requested width.
            let inner_target = budget
                .tail_bound_target
                .checked_div(&(Rational::from(2u64) * scale.abs()))
                .expect("scale is nonzero");
            let ts = exp_weighted_tail_sum(
                &point.x,
                &point.lambda,
                weight,
                0,
                budget.max_terms,
                &inner_target,
            )?;
            let enclosure = if ts.bound.is_zero() {
                Value::exact(ts.partial)
            } else if point.x.is_positive() {
                Value::interval(ts.partial.clone(), &ts.partial + &ts.bound)
            } else {
                Value::interval(&ts.partial - &ts.bound, &ts.partial + &ts.bound)
            };
            Ok(enclosure.scale(&scale))
        }
    }
}

/// Degenerate Bell polynomial `Bel_{n,λ}(x)` via its Dobinski formula
/// `e_λ^{-1}(x) Σ_k (k)_{n,λ} x^k (1)_{k,λ} / k!`.
///
/// Exact in the finite regime, a certified enclosure in the truncated one;
/// `Bel_{0,λ}(x) = 1` identically (the sum collapses to `e_λ(x)`).
pub fn bell_deg(n: u32, point: &EvalPoint, budget: &TruncationBudget) -> Result<Value, BellError> {
    if n == 0 {
        return Ok(Value::exact(Rational::one()));
    }
    dobinski_eval(point, KWeight::LambdaFalling(n), &Rational::one(), budget)
}

/// Dimorphic degenerate Bell polynomial `B_{n,λ}(x)` — the Dobinski series
/// with plain power weight: `e_λ^{-1}(x) Σ_k k^n x^k (1)_{k,λ} / k!`.
pub fn dimorphic_bell(
    n: u32,
    point: &EvalPoint,
    budget: &TruncationBudget,
) -> Result<Value, BellError> {
    if n == 0 {
        return Ok(Value::exact(Rational::one()));
    }
    dobinski_eval(point, KWeight::Power(n), &Rational::one(), budget)
}

/// Degenerate Lah-Bell polynomial `B^L_{n,λ}(x)` — rising-factorial weight:
/// `e_λ^{-1}(x) Σ_m ⟨m⟩_n x^m (1)_{m,λ} / m!`.
pub fn lah_bell_deg(
    n: u32,
    point: &EvalPoint,
    budget: &TruncationBudget,
) -> Result<Value, BellError> {
    if n == 0 {
        return Ok(Value::exact(Rational::one()));
    }
    dobinski_eval(point, KWeight::Rising(n), &Rational::one(), budget)
}

/// Zero-truncated degenerate Lah-Bell polynomial:
/// `B^{(L,0)}_{n,λ}(x) = B^L_{n,λ}(x) / (1 − e_λ^{-1}(x))` for n ≥ 1, and 1
/// for n = 0. Fails with `DivisionByZero` where `e_λ(x) = 1` (i.e. x = 0, or
/// the isolated sign-flip points of the finite regime).
pub fn lah_bell_zt(
    n: u32,
    point: &EvalPoint,
    budget: &TruncationBudget,
) -> Result<Value, BellError> {
    if n == 0 {
        return Ok(Value::exact(Rational::one()));
    }
    let divisor = Rational::one() - point.degen_exp_inv()?;
    if divisor.is_zero() {
        return Err(BellError::DivisionByZero);
    }
    let inv = divisor.recip().expect("checked nonzero");
    dobinski_eval(point, KWeight::Rising(n), &inv, budget)
}

/// Fully degenerate Bell polynomial `β_{n,λ}(x) = Σ_k S_{2,λ}(n,k) (x)_{k,λ}`.
///
/// A polynomial identity in (x, λ): defined for every rational pair,
/// including the classical limit λ = 0 where it reduces to the ordinary
/// Bell polynomial.
pub fn fully_degen_bell(n: u32, x: &Rational, lambda: &DegenParam) -> Rational {
    let mut acc = Rational::zero();
    for k in 0..=n {
        let s = stirling2_deg(n, k, lambda);
        if !s.is_zero() {
            acc += &(s * lambda_falling(x, k, lambda));
        }
    }
    acc
}

/// Classical Lah-Bell polynomial `B^L_n(x) = Σ_k L(n,k) x^k`.
pub fn lah_bell(n: u32, x: &Rational) -> Rational {
    let mut acc = if n == 0 {
        Rational::one()
    } else {
        Rational::zero()
    };
    let mut pow_x = Rational::one();
    for k in 1..=n {
        pow_x *= x;
        let l = lah(n, k);
        if !l.is_zero() {
            acc += &(l * &pow_x);
        }
    }
    acc
}
