//! Shared brute-force oracles and helpers for the integration tests.
//!
//! Everything here is deliberately naive — exhaustive enumeration and dense
//! polynomial algebra — so that it shares no code path (and no recurrence)
//! with the library routines it is used to check.

#![allow(dead_code)] // each test binary uses a different subset

use degenpoi::arith::factorial;
use degenpoi::Rational;

/// Number of set partitions of {1..n} into exactly k nonempty blocks,
/// counted by exhaustive enumeration of restricted-growth strings.
pub fn set_partition_count(n: u32, k: u32) -> u64 {
    if n == 0 {
        return u64::from(k == 0);
    }
    let mut count = 0u64;
    let mut rgs = vec![0u32; n as usize];
    enumerate_rgs(&mut rgs, 1, 0, &mut |blocks| {
        if blocks == k {
            count += 1;
        }
    });
    count
}

fn enumerate_rgs(rgs: &mut Vec<u32>, pos: usize, max_so_far: u32, visit: &mut impl FnMut(u32)) {
    if pos == rgs.len() {
        visit(max_so_far + 1);
        return;
    }
    for v in 0..=(max_so_far + 1) {
        rgs[pos] = v;
        enumerate_rgs(rgs, pos + 1, max_so_far.max(v), visit);
    }
}

/// Bell number by the same exhaustive enumeration.
pub fn bell_number(n: u32) -> u64 {
    (0..=n).map(|k| set_partition_count(n, k)).sum()
}

/// Number of permutations of {1..n} with exactly k cycles, by enumerating
/// all n! permutations. Practical for n ≤ 8.
pub fn cycle_count(n: u32, k: u32) -> u64 {
    if n == 0 {
        return u64::from(k == 0);
    }
    let mut perm: Vec<usize> = (0..n as usize).collect();
    let mut count = 0u64;
    permute(&mut perm, 0, &mut |p| {
        if cycles_of(p) == k {
            count += 1;
        }
    });
    count
}

fn permute(perm: &mut Vec<usize>, pos: usize, visit: &mut impl FnMut(&[usize])) {
    if pos == perm.len() {
        visit(perm);
        return;
    }
    for i in pos..perm.len() {
        perm.swap(pos, i);
        permute(perm, pos + 1, visit);
        perm.swap(pos, i);
    }
}

fn cycles_of(perm: &[usize]) -> u32 {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if !seen[start] {
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
            }
        }
    }
    cycles
}

// ---------------------------------------------------------------------------
// Dense polynomial algebra over the power basis (coeffs[d] multiplies x^d).
// ---------------------------------------------------------------------------

pub fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += &(ai * bj);
        }
    }
    out
}

/// `Π_j (x − roots[j])`, monic of degree `roots.len()`.
pub fn poly_from_roots(roots: &[Rational]) -> Vec<Rational> {
    let mut p = vec![Rational::one()];
    for r in roots {
        p = poly_mul(&p, &[-r.clone(), Rational::one()]);
    }
    p
}

/// Coefficients of the falling factorial `(x)_n` in the power basis.
pub fn falling_poly(n: u32) -> Vec<Rational> {
    let roots: Vec<Rational> = (0..n).map(Rational::from).collect();
    poly_from_roots(&roots)
}

/// Coefficients of the λ-falling factorial `(x)_{n,λ}` in the power basis.
pub fn lambda_falling_poly(n: u32, lambda: &Rational) -> Vec<Rational> {
    let roots: Vec<Rational> = (0..n).map(|j| Rational::from(j) * lambda).collect();
    poly_from_roots(&roots)
}

/// Expresses `poly` in a monic triangular basis: `basis[l]` must be monic of
/// degree exactly l, and the result `c` satisfies
/// `poly = Σ_l c[l] · basis[l]`. Downward elimination; exact and unique.
pub fn reduce_in_basis(mut poly: Vec<Rational>, basis: &[Vec<Rational>]) -> Vec<Rational> {
    let deg = poly.len() - 1;
    assert!(basis.len() > deg, "need basis members up to the degree");
    let mut coeffs = vec![Rational::zero(); deg + 1];
    for d in (0..=deg).rev() {
        let c = poly[d].clone();
        if !c.is_zero() {
            for (j, bj) in basis[d].iter().enumerate() {
                poly[j] -= &(&c * bj);
            }
        }
        coeffs[d] = c;
    }
    assert!(
        poly.iter().all(Rational::is_zero),
        "reduction must terminate at the zero polynomial"
    );
    coeffs
}

/// Evaluates a power-basis polynomial at a point (Horner).
pub fn poly_eval(poly: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in poly.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

// ---------------------------------------------------------------------------
// Generating-function coefficient extraction.
// ---------------------------------------------------------------------------

/// `n! · [t^n] kernel^k / k!` — the series route to any of the triangles,
/// sharing no code with the recurrence builders.
pub fn triangle_via_gf(
    kernel: &degenpoi::series::FormalPowerSeries,
    n: u32,
    k: u32,
) -> Rational {
    let powered = kernel.pow(k);
    powered
        .egf_coeff(n as usize)
        .checked_div(&factorial(k))
        .expect("k! > 0")
}

// ---------------------------------------------------------------------------
// Sampling statistics.
// ---------------------------------------------------------------------------

/// Exact chi-square statistic `Σ_b (obs_b − N·p_b)² / (N·p_b)`.
/// `counts` and `probs` must cover the whole sample space (probs sum to 1,
/// counts sum to the number of draws).
pub fn chi_square(counts: &[u64], probs: &[Rational], draws: u64) -> Rational {
    assert_eq!(counts.len(), probs.len());
    let n = Rational::from(draws);
    let mut stat = Rational::zero();
    for (obs, p) in counts.iter().zip(probs) {
        assert!(p.is_positive(), "every bin needs positive mass");
        let expected = &n * p;
        let diff = Rational::from(*obs) - &expected;
        stat += &(&diff * &diff).checked_div(&expected).expect("positive");
    }
    stat
}

/// Convenience: parse a rational literal.
pub fn q(s: &str) -> Rational {
    s.parse().expect("rational literal")
}
