//! The release gate: eight criteria, one test and one printed PASS/FAIL line
//! each (visible under `--nocapture`). Every tolerance, grid, seed, and
//! critical value is pinned here as a literal — nothing is configurable.

mod common;

use std::time::Instant;

use common::{bell_number, chi_square, cycle_count, q, set_partition_count, triangle_via_gf};
use degenpoi::bell::{
    bell_deg, dimorphic_bell, fully_degen_bell, lah_bell_deg, lah_bell_zt, EvalPoint,
};
use degenpoi::dist::{pmf_deg, sample, PoissonParams};
use degenpoi::moments::{
    bell_finite_form, moment_closed_form, moment_direct, moment_mc, run_suite, IdentityId,
    MomentKind, SuiteConfig,
};
use degenpoi::series::{degen_exp_series, degen_log_series, lah_kernel_series, FormalPowerSeries};
use degenpoi::triangles::{lah, orthogonality_check, stirling1_deg, stirling2_deg};
use degenpoi::{DegenParam, Rational, TruncationBudget, Value};

fn conclude(criterion: u32, desc: &str, outcome: Result<(), String>) {
    match &outcome {
        Ok(()) => println!("acceptance criterion {criterion}: PASS — {desc}"),
        Err(why) => println!("acceptance criterion {criterion}: FAIL — {desc} ({why})"),
    }
    if let Err(why) = outcome {
        panic!("criterion {criterion} failed: {why}");
    }
}

fn params(lambda: &str, alpha: &str) -> PoissonParams {
    PoissonParams::new(DegenParam::new(q(lambda)), q(alpha)).expect("supported parameters")
}

/// Criterion 1 — the full exact identity grid (λ = 1/M for M = 1..5,
/// α ∈ {1/2, 1, 3/2, 2}, n ≤ 8) passes with zero failures in under 60 s.
#[test]
fn criterion_1_exact_identity_grid() {
    let desc = "exact identity grid, 20 points × 14 identities, n ≤ 8, < 60 s";
    let outcome = (|| -> Result<(), String> {
        let started = Instant::now();
        let report = run_suite(&SuiteConfig::exact_default()).map_err(|e| e.to_string())?;
        let elapsed = started.elapsed();
        if report.failed != 0 {
            let first = report.checks.iter().find(|c| !c.pass).expect("failed > 0");
            return Err(format!(
                "{} checks failed, first: {} at λ = {}, α = {}, n = {}",
                report.failed, first.id, first.lambda, first.alpha, first.n
            ));
        }
        use IdentityId::*;
        for required in [T1, C2, T3, T4, T5, T6, T7, T8, T9, T10, C8, E6, E12] {
            if !report.checks.iter().any(|c| c.id == required) {
                return Err(format!("identity {required} missing from the report"));
            }
        }
        for (id, display) in [
            (T4, "moment display"),
            (T4, "triangle display"),
            (T6, "moment display"),
            (T6, "polynomial display"),
        ] {
            if !report
                .checks
                .iter()
                .any(|c| c.id == id && c.detail.contains(display))
            {
                return Err(format!("{id} is missing its \"{display}\" rows"));
            }
        }
        if elapsed.as_secs() >= 60 {
            return Err(format!("grid took {elapsed:?}, budget is 60 s"));
        }
        println!(
            "  (criterion 1 detail: {} checks in {:.1?})",
            report.total, elapsed
        );
        Ok(())
    })();
    conclude(1, desc, outcome);
}

/// Criterion 2 — hand-derivable spot anchors reproduced bit-for-bit.
#[test]
fn criterion_2_spot_anchors() {
    let desc = "seven hand-derived anchor values, bit-for-bit";
    let outcome = (|| -> Result<(), String> {
        let half = DegenParam::from_ratio(1, 2);
        let expect = |name: &str, got: &Value, want: &Rational| -> Result<(), String> {
            if *got == Value::exact(want.clone()) {
                Ok(())
            } else {
                Err(format!("{name}: got {got}, want {want}"))
            }
        };
        if stirling1_deg(2, 1, &half) != q("-1/2") {
            return Err(format!(
                "S_{{1,1/2}}(2,1): got {}, want -1/2",
                stirling1_deg(2, 1, &half)
            ));
        }
        let pt = EvalPoint::new(q("1"), half.clone()).map_err(|e| e.to_string())?;
        let budget = TruncationBudget::default();
        expect(
            "Bel_{2,1/2}(1)",
            &bell_deg(2, &pt, &budget).map_err(|e| e.to_string())?,
            &q("5/9"),
        )?;
        expect(
            "B_{2,1/2}(1)",
            &dimorphic_bell(2, &pt, &budget).map_err(|e| e.to_string())?,
            &q("8/9"),
        )?;
        expect(
            "B^L_{2,1/2}(1)",
            &lah_bell_deg(2, &pt, &budget).map_err(|e| e.to_string())?,
            &q("14/9"),
        )?;
        expect(
            "B^{(L,0)}_{2,1/2}(1)",
            &lah_bell_zt(2, &pt, &budget).map_err(|e| e.to_string())?,
            &q("14/5"),
        )?;
        let p = params("1/2", "1");
        expect(
            "zero-truncated E[(X)_{2,λ}]",
            &moment_direct(MomentKind::LambdaFalling, 2, &p, true, &budget)
                .map_err(|e| e.to_string())?,
            &q("1"),
        )?;
        expect(
            "zero-truncated E[(X)₂]",
            &moment_direct(MomentKind::Falling, 2, &p, true, &budget)
                .map_err(|e| e.to_string())?,
            &q("2/5"),
        )?;
        Ok(())
    })();
    conclude(2, desc, outcome);
}

/// Criterion 3 — recurrence-built triangles equal generating-function
/// coefficient extraction for n ≤ 12, λ ∈ {0, ±1/2, ±1/3, 1}.
#[test]
fn criterion_3_triangles_equal_series_extraction() {
    let desc = "triangles vs series coefficients, n ≤ 12, six λ values";
    let outcome = (|| -> Result<(), String> {
        const N: u32 = 12;
        let order = N as usize;
        for ls in ["0", "1/2", "-1/2", "1/3", "-1/3", "1"] {
            let lambda = DegenParam::new(q(ls));
            let exp_kernel = degen_exp_series(&q("1"), &lambda, order)
                .sub(&FormalPowerSeries::one(order))
                .expect("orders match");
            let log_kernel = degen_log_series(&lambda, order);
            for n in 0..=N {
                for k in 0..=n {
                    if stirling2_deg(n, k, &lambda) != triangle_via_gf(&exp_kernel, n, k) {
                        return Err(format!("S₂ mismatch at λ = {ls}, n = {n}, k = {k}"));
                    }
                    if stirling1_deg(n, k, &lambda) != triangle_via_gf(&log_kernel, n, k) {
                        return Err(format!("S₁ mismatch at λ = {ls}, n = {n}, k = {k}"));
                    }
                }
            }
        }
        let lah_kernel = lah_kernel_series(N as usize);
        for n in 0..=N {
            for k in 0..=n {
                if lah(n, k) != triangle_via_gf(&lah_kernel, n, k) {
                    return Err(format!("Lah mismatch at n = {n}, k = {k}"));
                }
            }
        }
        Ok(())
    })();
    conclude(3, desc, outcome);
}

/// Criterion 4 — the two degenerate triangles are mutually inverse up to
/// n = 20 for five λ values including the classical limit.
#[test]
fn criterion_4_orthogonality_to_n20() {
    let desc = "triangle orthogonality to n = 20, five λ values";
    let outcome = (|| -> Result<(), String> {
        for ls in ["0", "1", "1/2", "-1/2", "1/3"] {
            let lambda = DegenParam::new(q(ls));
            orthogonality_check(20, &lambda).map_err(|v| {
                format!(
                    "λ = {ls}: Σ_l S₁(n,l)S₂(l,k) = {} ≠ {} at (n,k) = ({},{})",
                    v.value, v.expected, v.n, v.k
                )
            })?;
        }
        Ok(())
    })();
    conclude(4, desc, outcome);
}

/// Criterion 5 — λ = 0 collapses to the classical objects, checked against
/// exhaustive enumeration for n ≤ 8.
#[test]
fn criterion_5_classical_limits_brute_forced() {
    let desc = "λ = 0 triangles and Bell numbers vs exhaustive enumeration, n ≤ 8";
    let outcome = (|| -> Result<(), String> {
        let classical = DegenParam::classical();
        for n in 0..=8u32 {
            for k in 0..=n {
                let cycles = Rational::from(cycle_count(n, k));
                let sign = if (n - k) % 2 == 0 { q("1") } else { q("-1") };
                if stirling1_deg(n, k, &classical) != &sign * &cycles {
                    return Err(format!("first kind ≠ signed cycle count at n = {n}, k = {k}"));
                }
                if stirling2_deg(n, k, &classical)
                    != Rational::from(set_partition_count(n, k))
                {
                    return Err(format!("second kind ≠ partition count at n = {n}, k = {k}"));
                }
            }
            if fully_degen_bell(n, &q("1"), &classical) != Rational::from(bell_number(n)) {
                return Err(format!("Bell number mismatch at n = {n}"));
            }
        }
        Ok(())
    })();
    conclude(5, desc, outcome);
}

/// Criterion 6 — at (λ, α) = (−1/2, 1): the closed first two falling moments
/// (2 and 6) land inside certified direct-sum enclosures of width ≤ 10⁻³⁰,
/// and the pmf simplifies to (i+1)/2^{i+2} for i ≤ 30.
#[test]
fn criterion_6_infinite_support_enclosures_and_pmf() {
    let desc = "certified enclosures at (−1/2, 1), width ≤ 10⁻³⁰, and the closed pmf";
    let outcome = (|| -> Result<(), String> {
        let p = params("-1/2", "1");
        let budget = TruncationBudget::decimal(30);
        let width_cap = Rational::from(10u64).pow(-30).expect("fixed exponent");
        for (n, want) in [(1u32, q("2")), (2, q("6"))] {
            let closed = moment_closed_form(MomentKind::Falling, n, &p, false, &budget)
                .map_err(|e| e.to_string())?;
            if closed != Value::exact(want.clone()) {
                return Err(format!("closed E[(X)_{n}]: got {closed}, want {want}"));
            }
            let direct = moment_direct(MomentKind::Falling, n, &p, false, &budget)
                .map_err(|e| e.to_string())?;
            if direct.is_exact() {
                return Err(format!("E[(X)_{n}] direct sum should be an enclosure"));
            }
            if !direct.contains(&want) {
                return Err(format!("enclosure {direct} misses {want}"));
            }
            if direct.width() > width_cap {
                return Err(format!("enclosure width {} exceeds 10⁻³⁰", direct.width()));
            }
        }
        for i in 0..=30u64 {
            let want = Rational::from(i + 1)
                .checked_div(&Rational::from(2u64).pow(i as i64 + 2).expect("small"))
                .expect("positive");
            if pmf_deg(&p, i) != want {
                return Err(format!("pmf({i}) ≠ ({i}+1)/2^({i}+2)"));
            }
        }
        Ok(())
    })();
    conclude(6, desc, outcome);
}

/// Criterion 7 — sampler quality: chi-square GOF at significance 10⁻³ on
/// 10⁵ draws for the finite-support laws, a 10⁶-draw empirical mean at
/// (−1/2, 1) within 0.006 of 2, and byte-identical reruns.
#[test]
fn criterion_7_sampler_statistics_and_determinism() {
    let desc = "GOF on 10⁵ draws, 10⁶-draw mean within 0.006, byte-identical reruns";
    let outcome = (|| -> Result<(), String> {
        // Three-point law at (1/2, 1): 2 degrees of freedom.
        let p2 = params("1/2", "1");
        let batch2 = sample(&p2, false, 70001, 100_000).map_err(|e| e.to_string())?;
        let mut counts2 = [0u64; 3];
        for &d in &batch2.draws {
            counts2[d as usize] += 1;
        }
        let probs2: Vec<Rational> = (0..3).map(|i| pmf_deg(&p2, i)).collect();
        let stat2 = chi_square(&counts2, &probs2, 100_000);
        let crit2 = q("138155/10000"); // χ²(df = 2) at 10⁻³
        if stat2 >= crit2 {
            return Err(format!("χ² = {} ≥ 13.8155 at (1/2, 1)", stat2.to_f64()));
        }

        // Four-point law at (1/3, 3/2): 3 degrees of freedom.
        let p3 = params("1/3", "3/2");
        let batch3 = sample(&p3, false, 70002, 100_000).map_err(|e| e.to_string())?;
        let mut counts3 = [0u64; 4];
        for &d in &batch3.draws {
            counts3[d as usize] += 1;
        }
        let probs3: Vec<Rational> = (0..4).map(|i| pmf_deg(&p3, i)).collect();
        let stat3 = chi_square(&counts3, &probs3, 100_000);
        let crit3 = q("162662/10000"); // χ²(df = 3) at 10⁻³
        if stat3 >= crit3 {
            return Err(format!("χ² = {} ≥ 16.2662 at (1/3, 3/2)", stat3.to_f64()));
        }

        // Empirical mean over 10⁶ draws at (−1/2, 1), exact target 2.
        let p_inf = params("-1/2", "1");
        let big = sample(&p_inf, false, 70003, 1_000_000).map_err(|e| e.to_string())?;
        let total: u64 = big.draws.iter().sum();
        let mean = Rational::from(total)
            .checked_div(&Rational::from(1_000_000u64))
            .expect("positive count");
        let err = (&mean - &q("2")).abs();
        if err > q("6/1000") {
            return Err(format!("mean {} is off 2 by {}", mean.to_f64(), err.to_f64()));
        }

        // Reruns under the same seeds are byte-identical.
        let batch2_again = sample(&p2, false, 70001, 100_000).map_err(|e| e.to_string())?;
        if batch2.draws != batch2_again.draws
            || batch2.footer_json() != batch2_again.footer_json()
        {
            return Err("rerun of the (1/2, 1) batch differed".into());
        }
        let big_again = sample(&p_inf, false, 70003, 1_000_000).map_err(|e| e.to_string())?;
        if big.draws != big_again.draws || big.footer_json() != big_again.footer_json() {
            return Err("rerun of the (−1/2, 1) batch differed".into());
        }
        Ok(())
    })();
    conclude(7, desc, outcome);
}

/// Criterion 8 — Monte Carlo echoes: in 100 seeded repetitions of estimating
/// E[(X)_{n,λ}] for n = 1, 2, 3 from 10⁴ draws each, at least 99 repetitions
/// put all three estimates within 4σ of the exact values.
#[test]
fn criterion_8_monte_carlo_repetitions() {
    let desc = "E[(X)_{n,λ}] within 4σ in ≥ 99 of 100 seeded repetitions";
    let outcome = (|| -> Result<(), String> {
        let p = params("1/2", "1");
        let lambda = DegenParam::from_ratio(1, 2);
        let targets: Vec<Value> = (1..=3u32)
            .map(|n| Value::exact(bell_finite_form(n, &q("1"), &lambda)))
            .collect();
        let mut good_reps = 0u32;
        for rep in 0..100u64 {
            let mut rep_ok = true;
            for n in 1..=3u32 {
                let est = moment_mc(
                    MomentKind::LambdaFalling,
                    n,
                    &p,
                    false,
                    80000,
                    rep * 3 + u64::from(n),
                    10_000,
                )
                .map_err(|e| e.to_string())?;
                if !est.within_4_sigma(&targets[(n - 1) as usize]) {
                    rep_ok = false;
                }
            }
            if rep_ok {
                good_reps += 1;
            }
        }
        println!("  (criterion 8 detail: {good_reps}/100 repetitions inside the band)");
        if good_reps < 99 {
            return Err(format!("only {good_reps}/100 repetitions within 4σ"));
        }
        Ok(())
    })();
    conclude(8, desc, outcome);
}

