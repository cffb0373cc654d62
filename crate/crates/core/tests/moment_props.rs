//! The moment-identity verification lab end to end: closed-form gate,
//! identity sweeps on both regimes, route cross-checks, the Monte Carlo
//! battery, and the report serialization.

mod common;

use common::q;
use degenpoi::dist::PoissonParams;
use degenpoi::moments::{
    closed_form_gate, moment_closed_form, moment_direct, run_suite, verify_identity,
    verify_identity_mc, IdentityId, Method, MomentError, MomentKind, SuiteConfig,
};
use degenpoi::{DegenParam, Rational, TruncationBudget};

fn params(lambda: &str, alpha: &str) -> PoissonParams {
    PoissonParams::new(DegenParam::new(q(lambda)), q(alpha)).expect("supported parameters")
}

/// The finite change-of-basis Bell form agrees with the series evaluator
/// everywhere the suites will trust it.
#[test]
fn closed_form_gate_holds() {
    closed_form_gate().expect("gate must hold");
}

/// Every identity in the exact suite passes on infinite-support points,
/// where one side is a certified enclosure rather than a finite sum.
#[test]
fn exact_suite_passes_on_infinite_support() {
    let budget = TruncationBudget::decimal(40);
    for (l, a) in [("-1/2", "1"), ("-1/3", "1"), ("-1/3", "2"), ("-1/4", "3/2")] {
        let p = params(l, a);
        for &id in IdentityId::exact_suite() {
            let checks = verify_identity(id, &p, 6, &budget).unwrap();
            assert!(!checks.is_empty(), "{id} produced no rows");
            for c in &checks {
                assert!(
                    c.pass,
                    "{id} failed at λ = {l}, α = {a}, n = {}: {} vs {} ({})",
                    c.n, c.lhs, c.rhs, c.detail
                );
            }
        }
    }
}

/// On finite support every comparison is exact enumeration on both sides.
#[test]
fn finite_support_checks_are_exact_on_both_sides() {
    let budget = TruncationBudget::default();
    let p = params("1/2", "1");
    for &id in IdentityId::exact_suite() {
        for c in verify_identity(id, &p, 5, &budget).unwrap() {
            assert!(c.pass, "{id} n = {}: {}", c.n, c.detail);
            assert_eq!(c.method, Method::ExactEnum, "{id} n = {}", c.n);
        }
    }
}

/// Row-shape contract of the verifier: two displays for T4 and T6, rows
/// from n = 1 for the zero-truncated identities, a single orthogonality row,
/// and classical-limit rows recorded at λ = 0.
#[test]
fn verifier_row_shapes() {
    let budget = TruncationBudget::default();
    let p = params("1/2", "1");
    let n_max = 4u32;
    assert_eq!(verify_identity(IdentityId::T1, &p, n_max, &budget).unwrap().len(), 5);
    assert_eq!(verify_identity(IdentityId::T4, &p, n_max, &budget).unwrap().len(), 10);
    assert_eq!(verify_identity(IdentityId::T6, &p, n_max, &budget).unwrap().len(), 10);
    assert_eq!(verify_identity(IdentityId::T7, &p, n_max, &budget).unwrap().len(), 4);
    assert_eq!(verify_identity(IdentityId::T8, &p, n_max, &budget).unwrap().len(), 4);
    assert_eq!(verify_identity(IdentityId::E6, &p, n_max, &budget).unwrap().len(), 1);
    let e11 = verify_identity(IdentityId::E11, &p, n_max, &budget).unwrap();
    assert_eq!(e11.len(), 5);
    assert!(e11.iter().all(|c| c.lambda.is_zero()), "E11 rows record λ = 0");
}

/// Direct summation and the closed forms agree for every moment family that
/// has one — exactly on finite support, by containment on infinite support.
#[test]
fn direct_and_closed_routes_agree() {
    let budget = TruncationBudget::decimal(40);
    let kinds = [
        MomentKind::Power,
        MomentKind::Falling,
        MomentKind::Rising,
        MomentKind::LambdaFalling,
        MomentKind::Binomial,
    ];
    for (l, a) in [("1/2", "1"), ("1/3", "2"), ("-1/2", "1"), ("-1/3", "2")] {
        let p = params(l, a);
        for kind in kinds {
            for n in 0..=5u32 {
                let direct = moment_direct(kind, n, &p, false, &budget).unwrap();
                let closed = moment_closed_form(kind, n, &p, false, &budget).unwrap();
                assert!(
                    direct.consistent_with(&closed),
                    "{kind:?} full, λ = {l}, α = {a}, n = {n}: {direct} vs {closed}"
                );
            }
        }
        // Zero-truncated closed forms exist for these three families.
        for kind in [MomentKind::Falling, MomentKind::LambdaFalling, MomentKind::Binomial] {
            for n in 1..=5u32 {
                let direct = moment_direct(kind, n, &p, true, &budget).unwrap();
                let closed = moment_closed_form(kind, n, &p, true, &budget).unwrap();
                assert!(
                    direct.consistent_with(&closed),
                    "{kind:?} zt, λ = {l}, α = {a}, n = {n}: {direct} vs {closed}"
                );
            }
        }
    }
}

/// Zero-truncated rising and power moments have no closed form; asking for
/// one is an error, and their verifier rendering is Monte Carlo-only.
#[test]
fn missing_closed_forms_are_reported_not_invented() {
    let budget = TruncationBudget::default();
    let p = params("1/2", "1");
    for kind in [MomentKind::Rising, MomentKind::Power] {
        match moment_closed_form(kind, 2, &p, true, &budget) {
            Err(MomentError::NoClosedForm { kind: k, truncated: true }) => assert_eq!(k, kind),
            other => panic!("expected NoClosedForm, got {other:?}"),
        }
    }
    for id in [IdentityId::ZtRising, IdentityId::ZtPower] {
        assert!(matches!(
            verify_identity(id, &p, 3, &budget),
            Err(MomentError::NoClosedForm { truncated: true, .. })
        ));
    }
}

/// Identity labels round-trip through their wire names, case-insensitively.
#[test]
fn identity_labels_parse() {
    for &id in IdentityId::exact_suite() {
        let label = id.to_string();
        assert_eq!(label.parse::<IdentityId>().unwrap(), id);
        assert_eq!(label.to_lowercase().parse::<IdentityId>().unwrap(), id);
    }
    assert_eq!("ZT-RISING".parse::<IdentityId>().unwrap(), IdentityId::ZtRising);
    assert_eq!("zt-power".parse::<IdentityId>().unwrap(), IdentityId::ZtPower);
    assert!("T99".parse::<IdentityId>().is_err());
}

/// Every identity with an expectation side passes its seeded 4σ Monte Carlo
/// check on both supports.
#[test]
fn monte_carlo_battery_passes_at_the_pinned_seed() {
    let budget = TruncationBudget::decimal(40);
    for (point_idx, (l, a)) in [("1/2", "1"), ("-1/2", "1")].into_iter().enumerate() {
        let p = params(l, a);
        for (i, &id) in IdentityId::mc_suite().iter().enumerate() {
            let stream = (point_idx * IdentityId::mc_suite().len() + i) as u64;
            let check = verify_identity_mc(id, &p, 2, &budget, 20240817, stream, 4000).unwrap();
            assert!(
                check.pass,
                "{id} at λ = {l}: mean {} vs target {} ({})",
                check.lhs, check.rhs, check.detail
            );
            assert_eq!(check.method, Method::MonteCarlo);
        }
    }
}

/// Purely polynomial identities have no Monte Carlo rendering.
#[test]
fn structural_identities_have_no_monte_carlo_route() {
    let budget = TruncationBudget::default();
    let p = params("1/2", "1");
    for id in [IdentityId::T1, IdentityId::C2, IdentityId::T7, IdentityId::E6, IdentityId::E11] {
        assert!(matches!(
            verify_identity_mc(id, &p, 2, &budget, 1, 0, 100),
            Err(MomentError::NoMonteCarloRoute(_))
        ));
    }
}

/// The sweep driver: a small exact suite runs clean, its JSON report carries
/// the full schema, and reruns serialize byte-identically.
#[test]
fn suite_report_schema_and_determinism() {
    let config = SuiteConfig::exact_at(DegenParam::from_ratio(1, 2), q("1"), 3);
    let report = run_suite(&config).unwrap();
    assert!(report.all_pass(), "failed = {}", report.failed);
    assert_eq!(report.total, report.checks.len());

    let json = report.to_json();
    assert_eq!(json["suite"], "exact");
    assert_eq!(json["summary"]["total"], report.total);
    assert_eq!(json["summary"]["failed"], 0);
    let first = &json["checks"][0];
    for key in ["id", "lambda", "alpha", "n", "lhs", "rhs", "method", "pass"] {
        assert!(!first[key].is_null(), "missing key {key}");
    }

    let again = run_suite(&config).unwrap();
    assert_eq!(report.to_json_string(), again.to_json_string());
}

/// The Monte Carlo sweep driver is deterministic for a fixed seed and flags
/// nothing at the pinned one.
#[test]
fn mc_suite_run_is_deterministic() {
    let config = SuiteConfig::mc_at(DegenParam::from_ratio(1, 2), q("1"), 2, 99, 3000);
    let report = run_suite(&config).unwrap();
    assert!(report.all_pass(), "failed = {}", report.failed);
    assert_eq!(report.total, 2 * IdentityId::mc_suite().len());
    assert!(report.checks.iter().all(|c| c.method == Method::MonteCarlo));
    let again = run_suite(&config).unwrap();
    assert_eq!(report.to_json_string(), again.to_json_string());
}

/// Regime errors surface as errors from the driver, not as failed checks.
#[test]
fn unsupported_grid_points_error_out() {
    let config = SuiteConfig::exact_at(DegenParam::from_ratio(2, 3), q("1"), 3);
    assert!(matches!(run_suite(&config), Err(MomentError::Dist(_))));
    let diverging = SuiteConfig::exact_at(DegenParam::from_ratio(-1, 2), q("3"), 3);
    assert!(matches!(run_suite(&diverging), Err(MomentError::Dist(_))));
}

/// The 4σ band logic itself, on hand-built estimates: a mean sitting on the
/// boundary passes, one just outside fails.
#[test]
fn four_sigma_band_is_inclusive() {
    use degenpoi::moments::McEstimate;
    use degenpoi::Value;
    let est = McEstimate {
        mean: q("1"),
        se_sq: q("1/64"),
        count: 1000,
    };
    // 4σ = 4/8 = 1/2: targets at distance exactly 1/2 pass.
    assert!(est.within_4_sigma(&Value::exact(q("3/2"))));
    assert!(est.within_4_sigma(&Value::exact(q("1/2"))));
    assert!(!est.within_4_sigma(&Value::exact(q("8/5"))));
    // Intervals measure distance to their nearest endpoint.
    assert!(est.within_4_sigma(&Value::interval(q("3/2"), q("2"))));
    assert!(!est.within_4_sigma(&Value::interval(q("8/5"), q("2"))));
    let inside = Rational::zero();
    assert!(McEstimate { mean: inside, se_sq: q("0"), count: 2 }
        .within_4_sigma(&Value::exact(q("0"))));
}
