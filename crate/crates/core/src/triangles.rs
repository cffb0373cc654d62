//! Memoized triangles of degenerate Stirling, classical Stirling, and Lah
//! numbers.
//!
//! The two degenerate triangles are the connection coefficients between the
//! three factorial bases of the polynomial ring:
//!
//! ```text
//! (x)_n   = Σ_l  S_{1,λ}(n,l) · (x)_{l,λ}      (first kind)
//! (x)_{n,λ} = Σ_l  S_{2,λ}(n,l) · (x)_l        (second kind)
//! ```
//!
//! Each triangle is built row by row with an O(n²) recurrence:
//!
//! ```text
//! S_{1,λ}(n+1,k) = S_{1,λ}(n,k−1) + (kλ − n) · S_{1,λ}(n,k)
//! S_{2,λ}(n+1,k) = S_{2,λ}(n,k−1) + (k − nλ) · S_{2,λ}(n,k)
//! s(n+1,k)       = s(n,k−1)       −  n       · s(n,k)        (classical, signed)
//! L(n+1,k)       = L(n,k−1)       + (n + k)  · L(n,k)        (Lah)
//! ```
//!
//! with `T(0,0) = 1` and zero outside `0 ≤ k ≤ n`. The recurrences are the
//! construction path only; the test suite independently re-derives every
//! entry from the generating functions `(log_λ(1+t))^k / k!`,
//! `(e_λ(t)−1)^k / k!`, `(t/(1−t))^k / k!` and from the basis-conversion
//! definitions above, so a slip in a recurrence coefficient cannot survive.
//!
//! Tables are memoized process-wide, keyed by `(kind, λ)`; a table is grown
//! under its own lock and never shrinks. Distinct λ never share entries. The
//! classical and Lah triangles ignore λ and are stored once.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use crate::arith::{DegenParam, Rational};

/// Hard cap on row index, to keep a typo'd CLI argument from allocating a
/// multi-gigabyte table. Entries grow quadratically in count and the use
/// cases here live at n ≤ a few hundred.
pub const MAX_ROW: u32 = 4096;

/// Which triangle a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriangleKind {
    /// Degenerate Stirling numbers of the first kind `S_{1,λ}(n,k)`.
    Stirling1Deg,
    /// Degenerate Stirling numbers of the second kind `S_{2,λ}(n,k)`.
    Stirling2Deg,
    /// Classical signed Stirling numbers of the first kind `s(n,k)`.
    Stirling1Classical,
    /// Lah numbers `L(n,k)`.
    Lah,
}

impl TriangleKind {
    /// The classical and Lah triangles do not depend on λ.
    pub fn uses_lambda(self) -> bool {
        matches!(self, TriangleKind::Stirling1Deg | TriangleKind::Stirling2Deg)
    }
}

/// One lazily grown triangle.
#[derive(Debug)]
pub struct TriangleTable {
    kind: TriangleKind,
    lambda: DegenParam,
    /// `rows[n][k]` for `0 ≤ k ≤ n`.
    rows: Vec<Vec<Rational>>,
}

impl TriangleTable {
    pub fn new(kind: TriangleKind, lambda: DegenParam) -> Self {
        let lambda = if kind.uses_lambda() {
            lambda
        } else {
            DegenParam::classical()
        };
        TriangleTable {
            kind,
            lambda,
            rows: vec![vec![Rational::one()]],
        }
    }

    pub fn kind(&self) -> TriangleKind {
        self.kind
    }

    pub fn lambda(&self) -> &DegenParam {
        &self.lambda
    }

    /// Multiplier of `T(n,k)` in the recurrence for `T(n+1,k)`.
    fn diagonal_coeff(&self, n: u32, k: u32) -> Rational {
        let n_q = Rational::from(n as u64);
        let k_q = Rational::from(k as u64);
        match self.kind {
            TriangleKind::Stirling1Deg => k_q * self.lambda.value() - n_q,
            TriangleKind::Stirling2Deg => k_q - n_q * self.lambda.value(),
            TriangleKind::Stirling1Classical => -n_q,
            TriangleKind::Lah => n_q + k_q,
        }
    }

    /// Grows the table so that row `n` exists.
    pub fn ensure_rows(&mut self, n: u32) {
        assert!(n <= MAX_ROW, "triangle row {n} exceeds the cap {MAX_ROW}");
        while self.rows.len() <= n as usize {
            let prev_n = (self.rows.len() - 1) as u32;
            let prev = &self.rows[prev_n as usize];
            let mut row = Vec::with_capacity(prev.len() + 1);
            for k in 0..=(prev_n + 1) {
                let from_left = if k >= 1 && k - 1 <= prev_n {
                    prev[(k - 1) as usize].clone()
                } else {
                    Rational::zero()
                };
                let from_same = if k <= prev_n {
                    self.diagonal_coeff(prev_n, k) * &prev[k as usize]
                } else {
                    Rational::zero()
                };
                row.push(from_left + from_same);
            }
            self.rows.push(row);
        }
    }

    /// Entry `T(n,k)`; zero outside the triangle (`k > n`).
    pub fn entry(&mut self, n: u32, k: u32) -> Rational {
        if k > n {
            return Rational::zero();
        }
        self.ensure_rows(n);
        self.rows[n as usize][k as usize].clone()
    }

    /// CSV dump `n,k,value` of rows `0..=n_max`. When `unsigned` is set the
    /// absolute value of each entry is emitted (the usual presentation of
    /// first-kind numbers as cycle counts).
    pub fn to_csv(&mut self, n_max: u32, unsigned: bool) -> String {
        self.ensure_rows(n_max);
        let mut out = String::from("n,k,value\n");
        for n in 0..=n_max {
            for k in 0..=n {
                let v = &self.rows[n as usize][k as usize];
                if unsigned {
                    let _ = writeln!(out, "{n},{k},{}", v.abs());
                } else {
                    let _ = writeln!(out, "{n},{k},{v}");
                }
            }
        }
        out
    }
}

type Store = Mutex<HashMap<(TriangleKind, Rational), Arc<Mutex<TriangleTable>>>>;

fn store() -> &'static Store {
    static STORE: OnceLock<Store> = OnceLock::new();
    STORE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared handle to the memoized table for `(kind, λ)`.
pub fn shared_table(kind: TriangleKind, lambda: &DegenParam) -> Arc<Mutex<TriangleTable>> {
    let key_lambda = if kind.uses_lambda() {
        lambda.value().clone()
    } else {
        Rational::zero()
    };
    let mut map = store().lock().expect("triangle store poisoned");
    map.entry((kind, key_lambda))
        .or_insert_with(|| Arc::new(Mutex::new(TriangleTable::new(kind, lambda.clone()))))
        .clone()
}

fn lookup(kind: TriangleKind, lambda: &DegenParam, n: u32, k: u32) -> Rational {
    let table = shared_table(kind, lambda);
    let mut guard = table.lock().expect("triangle table poisoned");
    guard.entry(n, k)
}

/// Degenerate Stirling number of the first kind `S_{1,λ}(n,k)`.
pub fn stirling1_deg(n: u32, k: u32, lambda: &DegenParam) -> Rational {
    lookup(TriangleKind::Stirling1Deg, lambda, n, k)
}

/// Degenerate Stirling number of the second kind `S_{2,λ}(n,k)`.
pub fn stirling2_deg(n: u32, k: u32, lambda: &DegenParam) -> Rational {
    lookup(TriangleKind::Stirling2Deg, lambda, n, k)
}

/// Classical Stirling number of the first kind, signed `s(n,k)` or unsigned
/// (cycle-count) `c(n,k) = |s(n,k)|`.
pub fn stirling1_classical(n: u32, k: u32, signed: bool) -> Rational {
    let v = lookup(
        TriangleKind::Stirling1Classical,
        &DegenParam::classical(),
        n,
        k,
    );
    if signed {
        v
    } else {
        v.abs()
    }
}

/// Lah number `L(n,k)`.
pub fn lah(n: u32, k: u32) -> Rational {
    lookup(TriangleKind::Lah, &DegenParam::classical(), n, k)
}

/// First witness that the two degenerate triangles fail to be mutually
/// inverse, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityViolation {
    pub n: u32,
    pub k: u32,
    /// The computed value of `Σ_l S_{1,λ}(n,l) · S_{2,λ}(l,k)`.
    pub value: Rational,
    /// The Kronecker delta it should equal.
    pub expected: Rational,
}

/// Verifies the inverse relation `Σ_l S_{1,λ}(n,l) · S_{2,λ}(l,k) = δ_{n,k}`
/// for all `n, k ≤ n_max`, returning the first violation if one exists.
pub fn orthogonality_check(n_max: u32, lambda: &DegenParam) -> Result<(), OrthogonalityViolation> {
    let s1 = shared_table(TriangleKind::Stirling1Deg, lambda);
    let s2 = shared_table(TriangleKind::Stirling2Deg, lambda);
    let mut s1 = s1.lock().expect("triangle table poisoned");
    let mut s2 = s2.lock().expect("triangle table poisoned");
    s1.ensure_rows(n_max);
    s2.ensure_rows(n_max);
    for n in 0..=n_max {
        for k in 0..=n_max {
            let mut acc = Rational::zero();
            for l in k..=n {
                acc += &(s1.entry(n, l) * s2.entry(l, k));
            }
            let expected = if n == k {
                Rational::one()
            } else {
                Rational::zero()
            };
            if acc != expected {
                return Err(OrthogonalityViolation {
                    n,
                    k,
                    value: acc,
                    expected,
                });
            }
        }
    }
    Ok(())
}

/// CSV dump of a triangle through row `n_max` (see [`TriangleTable::to_csv`]).
pub fn triangle_csv(kind: TriangleKind, lambda: &DegenParam, n_max: u32, unsigned: bool) -> String {
    let table = shared_table(kind, lambda);
    let mut guard = table.lock().expect("triangle table poisoned");
    guard.to_csv(n_max, unsigned)
}
