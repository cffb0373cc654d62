//! Exact-arithmetic special functions of the "degenerate" calculus — the
//! λ-deformations of Stirling numbers, Bell and Lah-Bell polynomials — the
//! discrete probability laws built from them, and a verification lab that
//! cross-checks the moment identities tying the two together by independent
//! computational routes.
//!
//! Everything is computed over arbitrary-precision rationals. Where a value
//! is defined by an infinite series that does not terminate, the crate
//! returns a certified enclosure (an interval with proven rational
//! endpoints) instead of a float; no comparison anywhere is approximate.
//!
//! Module tour:
//!
//! * [`arith`] — canonical rationals, λ-falling factorials, closed-form
//!   degenerate exp/log.
//! * [`series`] — truncated formal power series; the generating-function
//!   oracle used to cross-check everything combinatorial.
//! * [`triangles`] — memoized degenerate/classical Stirling and Lah
//!   triangles.
//! * [`bell`] — the five Bell/Lah-Bell polynomial families and the
//!   certified truncation engine.
//! * [`dist`] — the degenerate Poisson law and its zero-truncated variant:
//!   exact pmf/cdf and a deterministic exact-inversion sampler.
//! * [`moments`] — moment computation by three routes (direct summation,
//!   closed forms, Monte Carlo) and the identity verification suite.
//! * [`value`] — the exact-or-enclosure value type shared by the above.

pub mod arith;
pub mod bell;
pub mod dist;
pub mod moments;
pub mod series;
pub mod triangles;
pub mod value;

pub use arith::{ArithError, DegenParam, Rational};
pub use bell::{BellError, EvalPoint, Regime, TruncationBudget};
pub use value::Value;
