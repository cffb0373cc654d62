//! The degenerate Poisson law and its zero-truncated variant, computed
//! exactly.
//!
//! For a deformation λ and rate α > 0 the law puts mass
//!
//! ```text
//! P(X = i) = e_λ^{-1}(α) · α^i (1)_{i,λ} / i!        (i = 0, 1, 2, …)
//! ```
//!
//! on the nonnegative integers. Two parameter regimes keep every quantity
//! rational:
//!
//! * λ = 1/M: `(1)_{i,λ}` vanishes for i > M, so the support is the finite
//!   set {0, …, M} and everything is a finite sum.
//! * λ = −1/M with |λ|α < 1: infinite support with geometric tails; the
//!   normalizer `e_λ(α) = (1 − α/M)^{−M}` is still exactly rational, and
//!   tail masses get certified enclosures from the shared truncation engine.
//!
//! The zero-truncated variant conditions on X ≥ 1, rescaling by
//! `e_λ(α)/(e_λ(α) − 1)`.
//!
//! Sampling is by exact CDF inversion: each draw consumes 53 fresh bits `b`
//! from a SplitMix64 stream and forms the dyadic rational
//! `u = (2b + 1)/2^54 ∈ (0,1)`, and the sample is the least i with
//! `cdf(i) ≥ u`, decided by exact rational comparison. Identical
//! (seed, stream) pairs therefore reproduce identical draws on every
//! platform, bit for bit — there is no float anywhere in the path.

use std::fmt;

use serde_json::json;

use crate::arith::{DegenParam, Rational};
use crate::bell::{exp_weighted_tail_sum, BellError, EvalPoint, KWeight, Regime, TruncationBudget};
use crate::value::Value;

/// Hard cap on the support index the sampler will walk to. At the supported
/// parameter ranges the probability of legitimately reaching it is
/// astronomically small, so hitting the cap indicates a defect and is
/// reported as an error rather than looped past.
pub const SAMPLER_SUPPORT_CAP: u64 = 1_000_000;

/// Error type for distribution construction, evaluation, and sampling.
#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum DistError {
    /// The rate α must be a positive rational.
    NonPositiveAlpha,
    /// (λ, α) is outside the two supported regimes.
    UnsupportedRegime(String),
    /// A draw walked past [`SAMPLER_SUPPORT_CAP`].
    SamplerOverflow,
    /// A certified tail computation failed (budget exhausted).
    Tail(BellError),
}

impl fmt::Display for DistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistError::NonPositiveAlpha => write!(f, "rate α must be positive"),
            DistError::UnsupportedRegime(why) => write!(f, "unsupported regime: {why}"),
            DistError::SamplerOverflow => {
                write!(f, "sampler walked past the support cap {SAMPLER_SUPPORT_CAP}")
            }
            DistError::Tail(e) => write!(f, "tail computation failed: {e}"),
        }
    }
}

impl std::error::Error for DistError {}

impl From<BellError> for DistError {
    fn from(e: BellError) -> Self {
        match e {
            BellError::UnsupportedRegime(why) => DistError::UnsupportedRegime(why),
            other => DistError::Tail(other),
        }
    }
}

/// Support shape implied by the parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// λ = 1/M: support {0, …, M}.
    Finite { m: u32 },
    /// λ = −1/M, |λ|α < 1: support ℕ with geometric tails.
    Infinite { m: u32 },
}

/// Validated parameters of a degenerate Poisson law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoissonParams {
    point: EvalPoint,
    support: Support,
}

impl PoissonParams {
    /// Classifies (λ, α), rejecting α ≤ 0 and any λ outside the two regimes
    /// (λ = 0 included: the classical law is not rational-valued).
    pub fn new(lambda: DegenParam, alpha: Rational) -> Result<Self, DistError> {
        if !alpha.is_positive() {
            return Err(DistError::NonPositiveAlpha);
        }
        if lambda.is_classical() {
            return Err(DistError::UnsupportedRegime(
                "λ = 0 is the classical limit; it has no exact rational law".into(),
            ));
        }
        let point = EvalPoint::new(alpha, lambda)?;
        let support = match point.regime() {
            Regime::FiniteDobinski { m } => Support::Finite { m },
            Regime::Truncated { m } => Support::Infinite { m },
            Regime::ClassicalLimit => unreachable!("λ = 0 was rejected above"),
        };
        Ok(PoissonParams { point, support })
    }

    pub fn lambda(&self) -> &DegenParam {
        self.point.lambda()
    }

    pub fn alpha(&self) -> &Rational {
        self.point.x()
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// The evaluation point (α, λ) shared with the Bell-family evaluators.
    pub fn eval_point(&self) -> &EvalPoint {
        &self.point
    }

    /// `e_λ(α)`, exactly.
    pub fn exp_alpha(&self) -> Rational {
        self.point.degen_exp().expect("both regimes are non-classical")
    }

    /// Normalizer of the zero-truncated law, `1/(e_λ(α) − 1)`, exactly.
    /// `e_λ(α) > 1` holds throughout both regimes (α > 0), so this never
    /// divides by zero.
    pub fn zt_norm(&self) -> Rational {
        (self.exp_alpha() - Rational::one())
            .recip()
            .expect("e_λ(α) > 1 for α > 0")
    }
}

/// Incremental mass/CDF table for one law; grows on demand and keeps
/// everything exact. This is the workhorse behind the CSV emitters and the
/// sampler, so repeated queries never recompute a prefix.
struct MassTable {
    alpha: Rational,
    lambda: DegenParam,
    norm: Rational,
    truncated: bool,
    finite_m: Option<u64>,
    /// Unnormalized mass term `α^i (1)_{i,λ} / i!` for the next index.
    next_term: Rational,
    next_index: u64,
    cdf: Vec<Rational>,
}

impl MassTable {
    fn new(params: &PoissonParams, truncated: bool) -> Self {
        let norm = if truncated {
            params.zt_norm()
        } else {
            params.exp_alpha().recip().expect("e_λ(α) > 0")
        };
        MassTable {
            alpha: params.alpha().clone(),
            lambda: params.lambda().clone(),
            norm,
            truncated,
            finite_m: match params.support() {
                Support::Finite { m } => Some(m as u64),
                Support::Infinite { .. } => None,
            },
            next_term: Rational::one(),
            next_index: 0,
            cdf: Vec::new(),
        }
    }

    /// Grows `cdf` through index `i`.
    fn ensure(&mut self, i: u64) {
        while self.next_index <= i {
            let k = self.next_index;
            if k > 0 {
                let step = (&self.alpha
                    * (Rational::one() - &(Rational::from(k - 1) * self.lambda.value())))
                .checked_div(&Rational::from(k))
                .expect("k ≥ 1");
                self.next_term *= &step;
            }
            let beyond = self.finite_m.map_or(false, |m| k > m);
            let zeroed = beyond || (self.truncated && k == 0);
            let mass = if zeroed {
                Rational::zero()
            } else {
                &self.next_term * &self.norm
            };
            let prev = self.cdf.last().cloned().unwrap_or_else(Rational::zero);
            self.cdf.push(prev + mass);
            self.next_index += 1;
        }
    }

    fn pmf(&mut self, i: u64) -> Rational {
        self.ensure(i);
        if i == 0 {
            self.cdf[0].clone()
        } else {
            &self.cdf[i as usize] - &self.cdf[i as usize - 1]
        }
    }

    fn cdf(&mut self, i: u64) -> Rational {
        self.ensure(i);
        self.cdf[i as usize].clone()
    }

    /// Least index with `cdf(i) ≥ u`, growing the table as needed.
    fn invert(&mut self, u: &Rational) -> Result<u64, DistError> {
        loop {
            // partition_point gives the count of strictly smaller prefix
            // entries, i.e. the least index with cdf ≥ u once one exists.
            let idx = self.cdf.partition_point(|c| c < u) as u64;
            if idx < self.next_index {
                return Ok(idx);
            }
            if self.next_index > SAMPLER_SUPPORT_CAP {
                return Err(DistError::SamplerOverflow);
            }
            if let Some(m) = self.finite_m {
                // cdf(M) = 1 ≥ u for every admissible u.
                debug_assert!(self.next_index <= m + 1, "finite CDF failed to reach 1");
            }
            let grow_to = (self.next_index * 2).max(8).min(SAMPLER_SUPPORT_CAP + 2);
            self.ensure(grow_to);
        }
    }
}

/// `P(X = i)` of the full law.
pub fn pmf_deg(params: &PoissonParams, i: u64) -> Rational {
    MassTable::new(params, false).pmf(i)
}

/// `P(X = i)` of the zero-truncated law (zero at i = 0).
pub fn pmf_zt(params: &PoissonParams, i: u64) -> Rational {
    MassTable::new(params, true).pmf(i)
}

/// `P(X ≤ i)`, full or zero-truncated.
pub fn cdf(params: &PoissonParams, truncated: bool, i: u64) -> Rational {
    MassTable::new(params, truncated).cdf(i)
}

/// The tail mass `1 − cdf(i)` as a [`Value`]: exact on finite support, a
/// certified enclosure (via the same engine that truncates the Bell series)
/// on infinite support.
pub fn tail_mass(
    params: &PoissonParams,
    truncated: bool,
    i: u64,
    budget: &TruncationBudget,
) -> Result<Value, DistError> {
    match params.support() {
        Support::Finite { .. } => {
            let c = cdf(params, truncated, i);
            Ok(Value::exact(Rational::one() - c))
        }
        Support::Infinite { .. } => {
            let norm = if truncated {
                params.zt_norm()
            } else {
                params.exp_alpha().recip().expect("e_λ(α) > 0")
            };
            let inner_target = budget
                .tail_bound_target
                .checked_div(&norm)
                .expect("norm > 0");
            let ts = exp_weighted_tail_sum(
                params.alpha(),
                params.lambda(),
                KWeight::One,
                i + 1,
                budget.max_terms,
                &inner_target,
            )?;
            let lo = &ts.partial * &norm;
            let hi = (&ts.partial + &ts.bound) * &norm;
            Ok(Value::interval(lo, hi))
        }
    }
}

/// CSV dump `i,pmf,cdf` for `i = 0..=upto`; `float_col` appends decimal
/// presentation columns after the exact ones.
pub fn pmf_csv(params: &PoissonParams, truncated: bool, upto: u64, float_col: bool) -> String {
    use std::fmt::Write as _;
    let mut table = MassTable::new(params, truncated);
    table.ensure(upto);
    let mut out = String::new();
    if float_col {
        out.push_str("i,pmf,cdf,pmf_float,cdf_float\n");
    } else {
        out.push_str("i,pmf,cdf\n");
    }
    for i in 0..=upto {
        let p = table.pmf(i);
        let c = table.cdf(i);
        if float_col {
            let _ = writeln!(out, "{i},{p},{c},{:.17e},{:.17e}", p.to_f64(), c.to_f64());
        } else {
            let _ = writeln!(out, "{i},{p},{c}");
        }
    }
    out
}

/// SplitMix64 — the standard 64-bit mixing generator. Chosen because it is
/// trivially seedable, splittable by XOR-ing a stream index into the seed,
/// and stable: the constants below are fixed for all time, so draws are
/// reproducible across platforms and releases.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// A dyadic uniform `(2b + 1)/2^54` with `b` of 53 random bits. The
    /// half-offset keeps u strictly inside (0,1), so inversion never sees
    /// the endpoints.
    fn next_uniform(&mut self) -> Rational {
        let b = self.next_u64() >> 11;
        let numer = 2 * b + 1;
        Rational::from(numer)
            .checked_div(&Rational::from(2u64).pow(54).expect("fixed exponent"))
            .expect("2^54 is nonzero")
    }
}

/// A deterministic batch of draws and the provenance needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleBatch {
    pub draws: Vec<u64>,
    pub seed: u64,
    pub stream: u64,
    pub truncated: bool,
    pub lambda: DegenParam,
    pub alpha: Rational,
}

impl SampleBatch {
    /// The JSON footer emitted after the raw draws: seed, count, params.
    pub fn footer_json(&self) -> String {
        json!({
            "seed": self.seed,
            "count": self.draws.len(),
            "params": {
                "lambda": self.lambda.to_string(),
                "alpha": self.alpha.to_string(),
                "truncated": self.truncated,
            },
        })
        .to_string()
    }
}

/// Draws `count` samples by exact CDF inversion on the stream
/// `seed ⊕ stream` (use distinct stream indices for concurrent batches).
pub fn sample_with_stream(
    params: &PoissonParams,
    truncated: bool,
    seed: u64,
    stream: u64,
    count: usize,
) -> Result<SampleBatch, DistError> {
    let mut rng = SplitMix64::new(seed ^ stream);
    let mut table = MassTable::new(params, truncated);
    let mut draws = Vec::with_capacity(count);
    for _ in 0..count {
        let u = rng.next_uniform();
        draws.push(table.invert(&u)?);
    }
    Ok(SampleBatch {
        draws,
        seed,
        stream,
        truncated,
        lambda: params.lambda().clone(),
        alpha: params.alpha().clone(),
    })
}

/// Draws `count` samples on the default stream 0.
pub fn sample(
    params: &PoissonParams,
    truncated: bool,
    seed: u64,
    count: usize,
) -> Result<SampleBatch, DistError> {
    sample_with_stream(params, truncated, seed, 0, count)
}
