//! Moment computation by independent routes and the identity verification
//! suite built on top of it.
//!
//! For a degenerate Poisson variable X (optionally zero-truncated) the lab
//! computes `E[f(X)]` for the five weight families
//! `f(i) ∈ {i^n, (i)_n, ⟨i⟩_n, (i)_{n,λ}, C(i+n−1, n)}` by three routes that
//! share as little code as the mathematics allows:
//!
//! * [`moment_direct`] — pmf-weighted summation over the support: exact on
//!   finite support, a certified enclosure on infinite support.
//! * [`moment_closed_form`] — the closed-form expression each moment family
//!   admits (Bell/Lah-Bell polynomial evaluations, triangle sums, or the
//!   explicit rational formula for falling moments). Zero-truncated rising
//!   and power moments have no such form and report
//!   [`MomentError::NoClosedForm`].
//! * [`moment_mc`] — a seeded Monte Carlo average with an exact rational
//!   mean and squared standard error, judged against a 4σ band.
//!
//! [`verify_identity`] renders one named identity as a set of lhs-vs-rhs
//! checks at a parameter point, and [`run_suite`] sweeps a whole grid and
//! produces a deterministic JSON report. Two routes being compared never
//! share their summation formula; where a family's textbook closed form is
//! literally the same series as the direct sum (the binomial-weight
//! moments), the verifier substitutes an algebraically independent
//! evaluation through the Lah triangle and the falling-moment formula.
//!
//! One formula needs special care: the finite change-of-basis form of the
//! degenerate Bell polynomial,
//!
//! ```text
//! Bel_{n,λ}(x) = Σ_k S_{2,λ}(n,k) · x^k (1)_{k,λ} / (1+λx)^k,
//! ```
//!
//! which this lab uses as the closed route for λ-falling moments because it
//! stays a finite exact sum even on infinite support. It is not taken on
//! faith: [`closed_form_gate`] compares it against the terminating Dobinski
//! series across the whole exact grid (and against certified enclosures in
//! the infinite regime) once per process, and [`run_suite`] refuses to run
//! until that gate passes.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde_json::json;

use crate::arith::{factorial, lambda_falling, DegenParam, Rational};
use crate::bell::{
    bell_deg, dimorphic_bell, exp_weighted_finite_sum, exp_weighted_tail_sum, lah_bell_deg,
    lah_bell_zt, BellError, EvalPoint, KWeight, TruncationBudget,
};
use crate::dist::{sample_with_stream, DistError, PoissonParams, Support};
use crate::series::degen_exp_series;
use crate::triangles::{lah, orthogonality_check, stirling1_classical, stirling1_deg, stirling2_deg};
use crate::value::Value;

/// Error type for the moment lab.
#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum MomentError {
    /// The requested (kind, truncated) pair has no closed-form expression.
    NoClosedForm { kind: MomentKind, truncated: bool },
    /// An identity label that the verifier does not know.
    UnknownIdentity(String),
    /// The identity has no Monte Carlo rendering (purely structural ones).
    NoMonteCarloRoute(IdentityId),
    /// Monte Carlo needs at least two draws for a standard error.
    InsufficientSamples,
    /// The finite change-of-basis Bell form disagreed with the Dobinski
    /// series; closed-form results cannot be trusted.
    ClosedFormGate(String),
    /// Parameter/regime failure from the distribution layer.
    Dist(DistError),
    /// Evaluation failure from the Bell layer.
    Bell(BellError),
}

impl fmt::Display for MomentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentError::NoClosedForm { kind, truncated } => {
                let which = if *truncated { "zero-truncated" } else { "full" };
                write!(f, "no closed form for {which} {kind} moments")
            }
            MomentError::UnknownIdentity(s) => write!(f, "unknown identity `{s}`"),
            MomentError::NoMonteCarloRoute(id) => {
                write!(f, "identity {id} has no Monte Carlo rendering")
            }
            MomentError::InsufficientSamples => {
                write!(f, "Monte Carlo needs at least two draws")
            }
            MomentError::ClosedFormGate(s) => {
                write!(f, "closed-form gate failed: {s}")
            }
            MomentError::Dist(e) => write!(f, "{e}"),
            MomentError::Bell(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for MomentError {}

impl From<DistError> for MomentError {
    fn from(e: DistError) -> Self {
        MomentError::Dist(e)
    }
}

impl From<BellError> for MomentError {
    fn from(e: BellError) -> Self {
        MomentError::Bell(e)
    }
}

/// The five moment weight families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    /// `E[X^n]`.
    Power,
    /// `E[(X)_n]` — falling factorial.
    Falling,
    /// `E[⟨X⟩_n]` — rising factorial.
    Rising,
    /// `E[(X)_{n,λ}]` — λ-falling factorial.
    LambdaFalling,
    /// `E[C(X+n−1, n)]` — negative-binomial weight.
    Binomial,
}

impl MomentKind {
    fn weight(self, n: u32) -> KWeight {
        match self {
            MomentKind::Power => KWeight::Power(n),
            MomentKind::Falling => KWeight::Falling(n),
            MomentKind::Rising => KWeight::Rising(n),
            MomentKind::LambdaFalling => KWeight::LambdaFalling(n),
            MomentKind::Binomial => KWeight::Binomial(n),
        }
    }
}

impl fmt::Display for MomentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MomentKind::Power => "power",
            MomentKind::Falling => "falling",
            MomentKind::Rising => "rising",
            MomentKind::LambdaFalling => "lambda-falling",
            MomentKind::Binomial => "binomial",
        };
        write!(f, "{s}")
    }
}

/// How a check's two sides were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Both sides exact finite enumeration.
    ExactEnum,
    /// At least one side is a certified enclosure.
    CertifiedTruncation,
    /// A seeded Monte Carlo estimate against a 4σ band.
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::ExactEnum => "ExactEnum",
            Method::CertifiedTruncation => "CertifiedTruncation",
            Method::MonteCarlo => "MonteCarlo",
        };
        write!(f, "{s}")
    }
}

/// Labels of the verifiable identities.
///
/// The `T*`/`C*`/`E*` labels are the stable wire names used in reports and on
/// the command line; each is documented here by what it asserts. `ZT-RISING`
/// and `ZT-POWER` are the two moment families with no closed form at all —
/// they only support direct-vs-Monte-Carlo cross-checks and are excluded
/// from the exact suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityId {
    /// `(x)_{n,λ} = Σ_k β_{k,λ}(x) S_{1,λ}(n,k)` — polynomial identity.
    T1,
    /// `β_{n,λ}(x) = Σ_k S_{2,λ}(n,k) (x)_{k,λ}`, checked against the
    /// generating-function coefficient route.
    C2,
    /// `E[(X)_n] = Σ_k Bel_{k,λ}(α) S_{1,λ}(n,k)` (full law).
    T3,
    /// `E[(X)_n] = α^n (1)_{n,λ} (1+λα)^{-n}` plus its triangle display
    /// `(1+λα)^n Σ_k Bel_{k,λ}(α) S_{1,λ}(n,k) = α^n (1)_{n,λ}`.
    T4,
    /// `E[C(X+n−1,n)] = B^L_{n,λ}(α) / n!` (full law).
    T5,
    /// `E[⟨X⟩_n] = Σ_k B_{k,λ}(α) |s(n,k)|` plus its polynomial display
    /// `B^L_{n,λ}(α) = Σ_k B_{k,λ}(α) |s(n,k)|`.
    T6,
    /// Structural: `B^{(L,0)}_{n,λ}(x) · (1 − e_λ^{-1}(x)) = B^L_{n,λ}(x)`.
    T7,
    /// `E[(X)_n] = α^n (1)_{n,λ} (1+λα)^{-n} / (1 − e_λ^{-1}(α))` (zero-truncated).
    T8,
    /// `E[(X)_{n,λ}] = Bel_{n,λ}(α) / (1 − e_λ^{-1}(α))` (zero-truncated).
    T9,
    /// `E[(X)_n] = Σ_{k≥1} Bel_{k,λ}(α) S_{1,λ}(n,k) / (1 − e_λ^{-1}(α))`
    /// (zero-truncated).
    T10,
    /// `E[C(X+n−1,n)] = B^{(L,0)}_{n,λ}(α) / n!` (zero-truncated).
    C8,
    /// Triangle orthogonality `Σ_l S_{1,λ}(n,l) S_{2,λ}(l,k) = δ_{n,k}`.
    E6,
    /// `E[(X)_{n,λ}] = Bel_{n,λ}(α)` (full law).
    E12,
    /// The λ → 0 limit: the degenerate Bell polynomial at λ = 0 is the
    /// ordinary Bell polynomial (cross-checked by series composition).
    E11,
    /// Zero-truncated rising moments: direct-vs-MC only ("no-closed-form").
    ZtRising,
    /// Zero-truncated power moments: direct-vs-MC only ("no-closed-form").
    ZtPower,
}

impl IdentityId {
    /// The identities the exact suites sweep, in report order.
    pub fn exact_suite() -> &'static [IdentityId] {
        use IdentityId::*;
        &[T1, C2, T3, T4, T5, T6, T7, T8, T9, T10, C8, E6, E12, E11]
    }

    /// The identities with an expectation side, i.e. a Monte Carlo route.
    pub fn mc_suite() -> &'static [IdentityId] {
        use IdentityId::*;
        &[T3, T4, T5, T6, E12, T8, T9, T10, C8, ZtRising, ZtPower]
    }

    fn order_index(self) -> usize {
        use IdentityId::*;
        [T1, C2, T3, T4, T5, T6, T7, T8, T9, T10, C8, E6, E12, E11, ZtRising, ZtPower]
            .iter()
            .position(|x| *x == self)
            .expect("every variant is listed")
    }

    /// The Monte Carlo integrand of the identity, if it has one.
    fn integrand(self) -> Option<(MomentKind, bool)> {
        use IdentityId::*;
        match self {
            T3 | T4 => Some((MomentKind::Falling, false)),
            T5 => Some((MomentKind::Binomial, false)),
            T6 => Some((MomentKind::Rising, false)),
            E12 => Some((MomentKind::LambdaFalling, false)),
            T8 | T10 => Some((MomentKind::Falling, true)),
            T9 => Some((MomentKind::LambdaFalling, true)),
            C8 => Some((MomentKind::Binomial, true)),
            ZtRising => Some((MomentKind::Rising, true)),
            ZtPower => Some((MomentKind::Power, true)),
            T1 | C2 | T7 | E6 | E11 => None,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use IdentityId::*;
        let s = match self {
            T1 => "T1",
            C2 => "C2",
            T3 => "T3",
            T4 => "T4",
            T5 => "T5",
            T6 => "T6",
            T7 => "T7",
            T8 => "T8",
            T9 => "T9",
            T10 => "T10",
            C8 => "C8",
            E6 => "E6",
            E12 => "E12",
            E11 => "E11",
            ZtRising => "ZT-RISING",
            ZtPower => "ZT-POWER",
        };
        write!(f, "{s}")
    }
}

impl FromStr for IdentityId {
    type Err = MomentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use IdentityId::*;
        Ok(match s.to_ascii_uppercase().as_str() {
            "T1" => T1,
            "C2" => C2,
            "T3" => T3,
            "T4" => T4,
            "T5" => T5,
            "T6" => T6,
            "T7" => T7,
            "T8" => T8,
            "T9" => T9,
            "T10" => T10,
            "C8" => C8,
            "E6" => E6,
            "E12" => E12,
            "E11" => E11,
            "ZT-RISING" => ZtRising,
            "ZT-POWER" => ZtPower,
            _ => return Err(MomentError::UnknownIdentity(s.to_string())),
        })
    }
}

/// One verified lhs-vs-rhs comparison.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub id: IdentityId,
    pub lambda: Rational,
    pub alpha: Rational,
    pub n: u32,
    pub lhs: Value,
    pub rhs: Value,
    pub method: Method,
    pub pass: bool,
    /// Human context (which display, which routes); not part of the JSON
    /// report schema.
    pub detail: String,
}

fn classify_method(lhs: &Value, rhs: &Value) -> Method {
    if lhs.is_exact() && rhs.is_exact() {
        Method::ExactEnum
    } else {
        Method::CertifiedTruncation
    }
}

fn check(
    id: IdentityId,
    params: (&Rational, &Rational),
    n: u32,
    lhs: Value,
    rhs: Value,
    detail: &str,
) -> IdentityCheck {
    let method = classify_method(&lhs, &rhs);
    let pass = lhs.consistent_with(&rhs);
    IdentityCheck {
        id,
        lambda: params.0.clone(),
        alpha: params.1.clone(),
        n,
        lhs,
        rhs,
        method,
        pass,
        detail: detail.to_string(),
    }
}

/// `E[f_n(X)]` by pmf-weighted summation over the support. Exact on finite
/// support; on infinite support a certified enclosure of width at most the
/// budget's target (every term is positive, so the enclosure is one-sided).
pub fn moment_direct(
    kind: MomentKind,
    n: u32,
    params: &PoissonParams,
    truncated: bool,
    budget: &TruncationBudget,
) -> Result<Value, MomentError> {
    let weight = kind.weight(n);
    let norm = if truncated {
        params.zt_norm()
    } else {
        params.exp_alpha().recip().expect("e_λ(α) > 0")
    };
    let start = u64::from(truncated);
    match params.support() {
        Support::Finite { m } => {
            let sum = exp_weighted_finite_sum(params.alpha(), params.lambda(), weight, start, m);
            Ok(Value::exact(sum * &norm))
        }
        Support::Infinite { .. } => {
            let inner_target = budget
                .tail_bound_target
                .checked_div(&norm)
                .expect("norm > 0");
            let ts = exp_weighted_tail_sum(
                params.alpha(),
                params.lambda(),
                weight,
                start,
                budget.max_terms,
                &inner_target,
            )?;
            let lo = &ts.partial * &norm;
            let hi = (&ts.partial + &ts.bound) * &norm;
            Ok(Value::interval(lo, hi))
        }
    }
}

/// The explicit falling-moment formula `α^n (1)_{n,λ} (1+λα)^{-n}`.
fn falling_moment_formula(n: u32, params: &PoissonParams) -> Rational {
    let alpha = params.alpha();
    let lambda = params.lambda();
    let base = Rational::one() + &(lambda.value() * alpha);
    alpha.pow(n as i64).expect("small n")
        * lambda_falling(&Rational::one(), n, lambda)
        * base.pow(-(n as i64)).expect("1 + λα ≠ 0 in both regimes")
}

/// Finite change-of-basis form of the degenerate Bell polynomial:
/// `Bel_{n,λ}(x) = Σ_k S_{2,λ}(n,k) x^k (1)_{k,λ} (1+λx)^{-k}`.
///
/// Defined for every rational (x, λ) with `1 + λx ≠ 0`; at λ = 0 it is the
/// ordinary Bell polynomial `Σ_k S_2(n,k) x^k`. Gated against the Dobinski
/// series by [`closed_form_gate`].
pub fn bell_finite_form(n: u32, x: &Rational, lambda: &DegenParam) -> Rational {
    let base = Rational::one() + &(lambda.value() * x);
    assert!(!base.is_zero(), "1 + λx = 0 is a pole of the finite Bell form");
    let inv_base = base.recip().expect("checked nonzero");
    let mut acc = Rational::zero();
    let mut pow_x = Rational::one(); // (x / (1+λx))^k
    let mut one_fall = Rational::one();
    for k in 0..=n {
        if k > 0 {
            pow_x *= &(x * &inv_base);
            one_fall *= &(Rational::one() - &(Rational::from(k - 1) * lambda.value()));
        }
        let s = stirling2_deg(n, k, lambda);
        if !s.is_zero() && !pow_x.is_zero() && !one_fall.is_zero() {
            acc += &(s * &pow_x * &one_fall);
        }
    }
    acc
}

/// `B^L_{n,λ}(α)` through the Lah expansion of the rising weight:
/// `⟨m⟩_n = Σ_k L(n,k) (m)_k` gives
/// `B^L_{n,λ}(α) = Σ_k L(n,k) α^k (1)_{k,λ} (1+λα)^{-k}` — a finite exact
/// sum, algebraically independent of the rising-weight series evaluator.
fn lah_bell_via_falling(n: u32, params: &PoissonParams) -> Rational {
    let mut acc = if n == 0 {
        Rational::one()
    } else {
        Rational::zero()
    };
    for k in 1..=n {
        let l = lah(n, k);
        if !l.is_zero() {
            acc += &(l * falling_moment_formula(k, params));
        }
    }
    acc
}

/// `1 − e_λ^{-1}(α)`: the zero-truncation divisor, positive in both regimes.
fn zt_divisor(params: &PoissonParams) -> Rational {
    Rational::one() - params.exp_alpha().recip().expect("e_λ(α) > 0")
}

/// The closed-form route for one moment family, as stated by the identity
/// table (see [`IdentityId`]): exact where the form is a finite rational
/// expression, a certified enclosure where it evaluates Bell polynomials in
/// the infinite-support regime. Zero-truncated rising and power moments have
/// no closed form.
pub fn moment_closed_form(
    kind: MomentKind,
    n: u32,
    params: &PoissonParams,
    truncated: bool,
    budget: &TruncationBudget,
) -> Result<Value, MomentError> {
    if n == 0 {
        // Every zeroth moment is 1; the truncated displays below only claim
        // n ≥ 1.
        return Ok(Value::exact(Rational::one()));
    }
    let point = params.eval_point();
    if !truncated {
        match kind {
            MomentKind::Falling => Ok(Value::exact(falling_moment_formula(n, params))),
            MomentKind::LambdaFalling => Ok(Value::exact(bell_finite_form(
                n,
                params.alpha(),
                params.lambda(),
            ))),
            MomentKind::Power => Ok(dimorphic_bell(n, point, budget)?),
            MomentKind::Rising => {
                // Σ_k |s(n,k)| B_{k,λ}(α).
                let mut acc = Value::exact(Rational::zero());
                for k in 0..=n {
                    let c = stirling1_classical(n, k, false);
                    if !c.is_zero() {
                        acc = acc.add(&dimorphic_bell(k, point, budget)?.scale(&c));
                    }
                }
                Ok(acc)
            }
            MomentKind::Binomial => {
                let inv_fact = factorial(n).recip().expect("n! > 0");
                Ok(lah_bell_deg(n, point, budget)?.scale(&inv_fact))
            }
        }
    } else {
        let divisor = zt_divisor(params);
        let inv = divisor.recip().expect("positive in both regimes");
        match kind {
            MomentKind::Falling => {
                Ok(Value::exact(falling_moment_formula(n, params) * &inv))
            }
            MomentKind::LambdaFalling => Ok(Value::exact(
                bell_finite_form(n, params.alpha(), params.lambda()) * &inv,
            )),
            MomentKind::Binomial => {
                let inv_fact = factorial(n).recip().expect("n! > 0");
                Ok(lah_bell_zt(n, point, budget)?.scale(&inv_fact))
            }
            MomentKind::Rising | MomentKind::Power => {
                Err(MomentError::NoClosedForm { kind, truncated })
            }
        }
    }
}

/// A Monte Carlo moment estimate with exact first and second sample moments.
#[derive(Debug, Clone)]
pub struct McEstimate {
    pub mean: Rational,
    /// Squared standard error `s² / N` (unbiased sample variance).
    pub se_sq: Rational,
    pub count: usize,
}

impl McEstimate {
    /// The 4σ acceptance band, evaluated without square roots:
    /// distance²(mean, target) ≤ 16 · se².
    pub fn within_4_sigma(&self, target: &Value) -> bool {
        target.distance_sq(&self.mean) <= Rational::from(16u64) * &self.se_sq
    }

    /// Standard error as a float, for display only.
    pub fn stderr_f64(&self) -> f64 {
        self.se_sq.to_f64().sqrt()
    }
}

/// Monte Carlo estimate of `E[f_n(X)]` from `count` draws on the stream
/// `seed ⊕ stream`. All accumulation is exact; only display is approximate.
pub fn moment_mc(
    kind: MomentKind,
    n: u32,
    params: &PoissonParams,
    truncated: bool,
    seed: u64,
    stream: u64,
    count: usize,
) -> Result<McEstimate, MomentError> {
    if count < 2 {
        return Err(MomentError::InsufficientSamples);
    }
    let weight = kind.weight(n);
    let batch = sample_with_stream(params, truncated, seed, stream, count)?;
    let mut sum = Rational::zero();
    let mut sum_sq = Rational::zero();
    for &draw in &batch.draws {
        let f = weight.eval(draw, params.lambda());
        sum += &f;
        sum_sq += &(&f * &f);
    }
    let n_q = Rational::from(count as u64);
    let mean = sum.checked_div(&n_q).expect("count ≥ 2");
    let var = (&sum_sq - &(&n_q * &mean * &mean))
        .checked_div(&Rational::from((count - 1) as u64))
        .expect("count ≥ 2");
    // Exact cancellation can leave a tiny negative from the n/(n−1) form
    // only if all draws are equal; clamp to zero in that case.
    let var = if var.is_negative() { Rational::zero() } else { var };
    let se_sq = var.checked_div(&n_q).expect("count ≥ 2");
    Ok(McEstimate {
        mean,
        se_sq,
        count,
    })
}

/// The closed route each identity's Monte Carlo check aims at. For the two
/// "no-closed-form" identities the target is the certified direct sum.
fn mc_target(
    id: IdentityId,
    n: u32,
    params: &PoissonParams,
    budget: &TruncationBudget,
) -> Result<(Value, &'static str), MomentError> {
    use IdentityId::*;
    let (kind, truncated) = id
        .integrand()
        .ok_or(MomentError::NoMonteCarloRoute(id))?;
    let target = match id {
        T3 | T10 => exact_triangle_bell_sum(n, params, matches!(id, T10))?,
        T4 | T8 => {
            let mut v = falling_moment_formula(n, params);
            if matches!(id, T8) {
                v = v * zt_divisor(params).recip().expect("positive");
            }
            Value::exact(v)
        }
        T5 => Value::exact(
            lah_bell_via_falling(n, params)
                .checked_div(&factorial(n))
                .expect("n! > 0"),
        ),
        C8 => Value::exact(
            lah_bell_via_falling(n, params)
                .checked_div(&(factorial(n) * zt_divisor(params)))
                .expect("positive"),
        ),
        T6 => moment_closed_form(MomentKind::Rising, n, params, false, budget)?,
        E12 => Value::exact(bell_finite_form(n, params.alpha(), params.lambda())),
        T9 => Value::exact(
            bell_finite_form(n, params.alpha(), params.lambda())
                * zt_divisor(params).recip().expect("positive"),
        ),
        ZtRising | ZtPower => {
            let v = moment_direct(kind, n, params, truncated, budget)?;
            return Ok((v, "no-closed-form: target is the certified direct sum"));
        }
        T1 | C2 | T7 | E6 | E11 => unreachable!("filtered by integrand()"),
    };
    Ok((target, "closed-form target"))
}

/// `Σ_{k} Bel_{k,λ}(α) S_{1,λ}(n,k)` (from k = 1 and divided by the
/// zero-truncation divisor when `truncated`), with Bel through the gated
/// finite form.
fn exact_triangle_bell_sum(
    n: u32,
    params: &PoissonParams,
    truncated: bool,
) -> Result<Value, MomentError> {
    let mut acc = Rational::zero();
    let k0 = u32::from(truncated);
    for k in k0..=n {
        let s = stirling1_deg(n, k, params.lambda());
        if !s.is_zero() {
            acc += &(bell_finite_form(k, params.alpha(), params.lambda()) * s);
        }
    }
    if truncated {
        acc = acc * zt_divisor(params).recip().expect("positive");
    }
    Ok(Value::exact(acc))
}

/// One Monte Carlo check of an identity's expectation side at a single n.
pub fn verify_identity_mc(
    id: IdentityId,
    params: &PoissonParams,
    n: u32,
    budget: &TruncationBudget,
    seed: u64,
    stream: u64,
    count: usize,
) -> Result<IdentityCheck, MomentError> {
    let (kind, truncated) = id
        .integrand()
        .ok_or(MomentError::NoMonteCarloRoute(id))?;
    let (target, route) = mc_target(id, n, params, budget)?;
    let est = moment_mc(kind, n, params, truncated, seed, stream, count)?;
    let pass = est.within_4_sigma(&target);
    let detail = format!(
        "{route}; count={count} stderr≈{:.3e} stream={stream}",
        est.stderr_f64()
    );
    Ok(IdentityCheck {
        id,
        lambda: params.lambda().value().clone(),
        alpha: params.alpha().clone(),
        n,
        lhs: Value::exact(est.mean),
        rhs: target,
        method: Method::MonteCarlo,
        pass,
        detail,
    })
}

/// Renders one identity as lhs-vs-rhs checks at a parameter point, for
/// n up to `n_max` (from n = 1 for the zero-truncated displays, which only
/// claim positive n). Purely structural identities produce one row per n or
/// a single row (orthogonality). The two "no-closed-form" identities are
/// rejected here — they exist only in the Monte Carlo suite.
pub fn verify_identity(
    id: IdentityId,
    params: &PoissonParams,
    n_max: u32,
    budget: &TruncationBudget,
) -> Result<Vec<IdentityCheck>, MomentError> {
    use IdentityId::*;
    let lambda = params.lambda().clone();
    let alpha = params.alpha().clone();
    let lambda_q = lambda.value().clone();
    let pt = (&lambda_q, &alpha);
    let point = params.eval_point();
    let mut out = Vec::new();
    match id {
        T1 => {
            // (x)_{n,λ} = Σ_k β_{k,λ}(x) S_{1,λ}(n,k), x := α.
            for n in 0..=n_max {
                let lhs = Value::exact(lambda_falling(&alpha, n, &lambda));
                let mut acc = Rational::zero();
                for k in 0..=n {
                    let s = stirling1_deg(n, k, &lambda);
                    if !s.is_zero() {
                        acc += &(crate::bell::fully_degen_bell(k, &alpha, &lambda) * s);
                    }
                }
                out.push(check(id, pt, n, lhs, Value::exact(acc), "λ-falling basis"));
            }
        }
        C2 => {
            // Triangle route vs generating-function coefficient route for
            // β_{n,λ}(x): [t^n/n!] e_λ^x(e_λ(t) − 1).
            let order = n_max as usize;
            let outer = degen_exp_series(&alpha, &lambda, order);
            let inner = degen_exp_series(&Rational::one(), &lambda, order)
                .sub(&crate::series::FormalPowerSeries::one(order))
                .expect("orders match");
            let composed = outer.compose(&inner).expect("inner constant term is zero");
            for n in 0..=n_max {
                let lhs = Value::exact(composed.egf_coeff(n as usize));
                let rhs = Value::exact(crate::bell::fully_degen_bell(n, &alpha, &lambda));
                out.push(check(id, pt, n, lhs, rhs, "gf route vs triangle route"));
            }
        }
        T3 => {
            for n in 0..=n_max {
                let lhs = moment_direct(MomentKind::Falling, n, params, false, budget)?;
                let rhs = exact_triangle_bell_sum(n, params, false)?;
                out.push(check(id, pt, n, lhs, rhs, "direct vs triangle-Bell sum"));
            }
        }
        T4 => {
            for n in 0..=n_max {
                let lhs = moment_direct(MomentKind::Falling, n, params, false, budget)?;
                let rhs = Value::exact(falling_moment_formula(n, params));
                out.push(check(id, pt, n, lhs, rhs, "moment display"));
                // (1+λα)^n Σ_k Bel_{k,λ}(α) S_{1,λ}(n,k) = α^n (1)_{n,λ}.
                let base = Rational::one() + &(lambda.value() * &alpha);
                let lhs2 = match exact_triangle_bell_sum(n, params, false)? {
                    Value::Exact(v) => {
                        Value::exact(v * base.pow(n as i64).expect("small n"))
                    }
                    other => other,
                };
                let rhs2 = Value::exact(
                    alpha.pow(n as i64).expect("small n")
                        * lambda_falling(&Rational::one(), n, &lambda),
                );
                out.push(check(id, pt, n, lhs2, rhs2, "triangle display"));
            }
        }
        T5 => {
            for n in 0..=n_max {
                let lhs = moment_direct(MomentKind::Binomial, n, params, false, budget)?;
                let rhs = Value::exact(
                    lah_bell_via_falling(n, params)
                        .checked_div(&factorial(n))
                        .expect("n! > 0"),
                );
                out.push(check(id, pt, n, lhs, rhs, "direct vs Lah-expansion route"));
            }
        }
        T6 => {
            for n in 0..=n_max {
                let rhs = moment_closed_form(MomentKind::Rising, n, params, false, budget)?;
                let lhs = moment_direct(MomentKind::Rising, n, params, false, budget)?;
                out.push(check(id, pt, n, lhs, rhs.clone(), "moment display"));
                let lhs2 = lah_bell_deg(n, point, budget)?;
                out.push(check(id, pt, n, lhs2, rhs, "polynomial display"));
            }
        }
        T7 => {
            for n in 1..=n_max {
                let lhs = lah_bell_zt(n, point, budget)?.scale(&zt_divisor(params));
                let rhs = lah_bell_deg(n, point, budget)?;
                out.push(check(id, pt, n, lhs, rhs, "zero-truncation structure"));
            }
        }
        T8 => {
            for n in 1..=n_max {
                let lhs = moment_direct(MomentKind::Falling, n, params, true, budget)?;
                let rhs = Value::exact(
                    falling_moment_formula(n, params)
                        * zt_divisor(params).recip().expect("positive"),
                );
                out.push(check(id, pt, n, lhs, rhs, "zero-truncated falling moment"));
            }
        }
        T9 => {
            for n in 1..=n_max {
                let lhs = moment_direct(MomentKind::LambdaFalling, n, params, true, budget)?;
                let rhs = Value::exact(
                    bell_finite_form(n, &alpha, &lambda)
                        * zt_divisor(params).recip().expect("positive"),
                );
                out.push(check(id, pt, n, lhs, rhs, "zero-truncated λ-falling moment"));
            }
        }
        T10 => {
            for n in 1..=n_max {
                let lhs = moment_direct(MomentKind::Falling, n, params, true, budget)?;
                let rhs = exact_triangle_bell_sum(n, params, true)?;
                out.push(check(id, pt, n, lhs, rhs, "zero-truncated triangle display"));
            }
        }
        C8 => {
            for n in 1..=n_max {
                let lhs = moment_direct(MomentKind::Binomial, n, params, true, budget)?;
                let rhs = Value::exact(
                    lah_bell_via_falling(n, params)
                        .checked_div(&(factorial(n) * zt_divisor(params)))
                        .expect("positive"),
                );
                out.push(check(id, pt, n, lhs, rhs, "direct vs Lah-expansion route"));
            }
        }
        E6 => {
            let (lhs, rhs, detail) = match orthogonality_check(n_max, &lambda) {
                Ok(()) => (
                    Value::exact(Rational::one()),
                    Value::exact(Rational::one()),
                    "triangles mutually inverse".to_string(),
                ),
                Err(v) => (
                    Value::exact(v.value.clone()),
                    Value::exact(v.expected.clone()),
                    format!("violation at (n,k) = ({},{})", v.n, v.k),
                ),
            };
            out.push(check(id, pt, n_max, lhs, rhs, &detail));
        }
        E12 => {
            for n in 0..=n_max {
                let lhs = moment_direct(MomentKind::LambdaFalling, n, params, false, budget)?;
                let rhs = Value::exact(bell_finite_form(n, &alpha, &lambda));
                out.push(check(id, pt, n, lhs, rhs, "direct vs finite Bell form"));
            }
        }
        E11 => {
            // λ → 0: the Bell polynomial machinery at λ = 0 must reproduce
            // the ordinary Bell polynomials, independently re-derived as
            // [t^n/n!] exp(x (e^t − 1)) by series composition. x := α; the
            // row records λ = 0 because that is the point being checked.
            let zero = DegenParam::classical();
            let order = n_max as usize;
            let outer = degen_exp_series(&alpha, &zero, order);
            let inner = degen_exp_series(&Rational::one(), &zero, order)
                .sub(&crate::series::FormalPowerSeries::one(order))
                .expect("orders match");
            let composed = outer.compose(&inner).expect("inner constant term is zero");
            let zero_q = Rational::zero();
            for n in 0..=n_max {
                let lhs = Value::exact(bell_finite_form(n, &alpha, &zero));
                let rhs = Value::exact(composed.egf_coeff(n as usize));
                out.push(check(id, (&zero_q, &alpha), n, lhs, rhs, "classical limit"));
            }
        }
        ZtRising | ZtPower => {
            return Err(MomentError::NoClosedForm {
                kind: id.integrand().expect("both have integrands").0,
                truncated: true,
            })
        }
    }
    Ok(out)
}

/// Compares the finite change-of-basis Bell form against the Dobinski
/// series: exactly on the terminating grid (λ = 1/M), by certified enclosure
/// on an infinite-support point. Cached for the process lifetime; every
/// suite run consults it before trusting closed forms.
pub fn closed_form_gate() -> Result<(), String> {
    static GATE: OnceLock<Result<(), String>> = OnceLock::new();
    GATE.get_or_init(|| {
        let budget = TruncationBudget::default();
        let alphas = ["1/2", "1", "3/2", "2"];
        for m in 1..=5u32 {
            let lam = DegenParam::from_ratio(1, m as i64);
            for a in alphas {
                let alpha: Rational = a.parse().expect("literal");
                let point =
                    EvalPoint::new(alpha.clone(), lam.clone()).expect("finite regime point");
                for n in 0..=8u32 {
                    let series = bell_deg(n, &point, &budget).map_err(|e| e.to_string())?;
                    let form = Value::exact(bell_finite_form(n, &alpha, &lam));
                    if series != form {
                        return Err(format!(
                            "λ=1/{m} α={a} n={n}: series gives {series}, finite form gives {form}"
                        ));
                    }
                }
            }
        }
        for (lam, a) in [((-1i64, 2i64), "1"), ((-1, 3), "2")] {
            let lam = DegenParam::from_ratio(lam.0, lam.1);
            let alpha: Rational = a.parse().expect("literal");
            let point = EvalPoint::new(alpha.clone(), lam.clone()).expect("truncated point");
            for n in 0..=8u32 {
                let series = bell_deg(n, &point, &budget).map_err(|e| e.to_string())?;
                let form = bell_finite_form(n, &alpha, &lam);
                if !series.contains(&form) {
                    return Err(format!(
                        "λ={lam} α={a} n={n}: enclosure {series} misses finite form {form}"
                    ));
                }
            }
        }
        Ok(())
    })
    .clone()
}

/// Configuration of a verification sweep.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    /// Report label, e.g. `exact-default` or `mc`.
    pub suite: String,
    /// (λ, α) grid; every pair must be regime-valid.
    pub grid: Vec<(DegenParam, Rational)>,
    pub n_max: u32,
    pub budget: TruncationBudget,
    pub seed: u64,
    /// `Some(count)` switches the suite to Monte Carlo checks.
    pub mc_count: Option<usize>,
}

impl SuiteConfig {
    /// The default exact grid: λ = 1/M for M = 1..=5 crossed with
    /// α ∈ {1/2, 1, 3/2, 2}, all identities, n ≤ 8.
    pub fn exact_default() -> Self {
        let mut grid = Vec::new();
        for m in 1..=5i64 {
            for a in ["1/2", "1", "3/2", "2"] {
                grid.push((DegenParam::from_ratio(1, m), a.parse().expect("literal")));
            }
        }
        SuiteConfig {
            suite: "exact-default".into(),
            grid,
            n_max: 8,
            budget: TruncationBudget::default(),
            seed: 0,
            mc_count: None,
        }
    }

    /// Exact checks at a single (λ, α) point.
    pub fn exact_at(lambda: DegenParam, alpha: Rational, n_max: u32) -> Self {
        SuiteConfig {
            suite: "exact".into(),
            grid: vec![(lambda, alpha)],
            n_max,
            budget: TruncationBudget::default(),
            seed: 0,
            mc_count: None,
        }
    }

    /// Monte Carlo checks at a single (λ, α) point.
    pub fn mc_at(lambda: DegenParam, alpha: Rational, n_max: u32, seed: u64, count: usize) -> Self {
        SuiteConfig {
            suite: "mc".into(),
            grid: vec![(lambda, alpha)],
            n_max,
            budget: TruncationBudget::default(),
            seed,
            mc_count: Some(count),
        }
    }
}

/// A completed sweep: every check row plus the pass/fail tally.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
    pub total: usize,
    pub failed: usize,
}

impl SuiteReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "suite": self.suite,
            "seed": self.seed,
            "checks": self
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "id": c.id.to_string(),
                        "lambda": c.lambda.to_string(),
                        "alpha": c.alpha.to_string(),
                        "n": c.n,
                        "lhs": c.lhs.to_json(),
                        "rhs": c.rhs.to_json(),
                        "method": c.method.to_string(),
                        "pass": c.pass,
                    })
                })
                .collect::<Vec<_>>(),
            "summary": {
                "total": self.total,
                "failed": self.failed,
            },
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report serializes")
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

/// Runs a verification sweep. Exact suites run every identity in
/// [`IdentityId::exact_suite`] at every grid point (the classical-limit
/// check once per distinct α); Monte Carlo suites run every identity in
/// [`IdentityId::mc_suite`], each check on its own RNG stream derived from
/// the check index. Results are sorted by (identity, λ, α, n) so reports are
/// deterministic regardless of evaluation order.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport, MomentError> {
    closed_form_gate().map_err(MomentError::ClosedFormGate)?;
    let mut checks: Vec<IdentityCheck> = Vec::new();
    match config.mc_count {
        None => {
            let mut e11_done: HashSet<Rational> = HashSet::new();
            for (lambda, alpha) in &config.grid {
                let params = PoissonParams::new(lambda.clone(), alpha.clone())?;
                for &id in IdentityId::exact_suite() {
                    if id == IdentityId::E11 {
                        if !e11_done.insert(alpha.clone()) {
                            continue;
                        }
                    }
                    checks.extend(verify_identity(id, &params, config.n_max, &config.budget)?);
                }
            }
        }
        Some(count) => {
            let mut stream: u64 = 0;
            for (lambda, alpha) in &config.grid {
                let params = PoissonParams::new(lambda.clone(), alpha.clone())?;
                for &id in IdentityId::mc_suite() {
                    let (_, truncated) = id.integrand().expect("mc ids have integrands");
                    let n0 = u32::from(truncated);
                    for n in n0.max(1)..=config.n_max {
                        checks.push(verify_identity_mc(
                            id,
                            &params,
                            n,
                            &config.budget,
                            config.seed,
                            stream,
                            count,
                        )?);
                        stream += 1;
                    }
                }
            }
        }
    }
    checks.sort_by(|a, b| {
        (a.id.order_index(), &a.lambda, &a.alpha, a.n, &a.detail).cmp(&(
            b.id.order_index(),
            &b.lambda,
            &b.alpha,
            b.n,
            &b.detail,
        ))
    });
    let total = checks.len();
    let failed = checks.iter().filter(|c| !c.pass).count();
    Ok(SuiteReport {
        suite: config.suite.clone(),
        seed: config.seed,
        checks,
        total,
        failed,
    })
}
