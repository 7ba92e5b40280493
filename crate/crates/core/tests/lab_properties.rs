use std::collections::BTreeSet;
use std::time::Duration;

use cuspdiff::arith::FactorConfig;
use cuspdiff::lab::{
    bound_satisfaction, diff_table, export_report, import_report, pi_h, pi_star, run_experiment,
    sieve_certificate, ExperimentSpec, LabConfig, PrimeRecord, ReportFormat, SignMode,
};
use cuspdiff::richert::SieveFamily;
use cuspdiff::SUPPORTED_WEIGHTS;
use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use std::sync::OnceLock;

fn pairs() -> Vec<(u32, u32)> {
    let w = SUPPORTED_WEIGHTS;
    (0..w.len())
        .flat_map(|i| (i + 1..w.len()).map(move |j| (w[i], w[j])))
        .collect()
}

/// Every pair at `X = 10⁴`: Deligne-bounded rows, zero chain violations in
/// both families, and counts that recompute from the rows. A short factoring
/// deadline keeps this fast; rows it quarantines must still be settled by the
/// size bound on Ω.
#[test]
fn every_pair_certifies_at_ten_thousand() {
    let config = LabConfig {
        factor: FactorConfig {
            timeout: Duration::from_millis(100),
            ..FactorConfig::default()
        },
        ..LabConfig::default()
    };
    for (k1, k2) in pairs() {
        let report = run_experiment(&ExperimentSpec::new(k1, k2, 10_000), &config)
            .unwrap_or_else(|e| panic!("({k1},{k2}): {e}"));
        let k = k1.max(k2);
        for r in &report.rows {
            let bound = BigInt::from(16) * BigInt::from(r.p).pow(k - 1);
            assert!(&r.d * &r.d <= bound, "({k1},{k2}) p={}", r.p);
            assert_eq!(r.d, &r.a1 - &r.a2);
        }
        assert_eq!(report.certificates.len(), 2);
        for c in &report.certificates {
            assert!(c.violations.is_empty(), "({k1},{k2}) {:?}", c.family);
            assert_eq!(c.unchecked_quarantined, 0, "({k1},{k2}) {:?}", c.family);
        }
        assert!(report.is_consistent().unwrap());
        assert!(report.counts.bound_satisfaction.all_satisfied(), "({k1},{k2})");
    }
}

fn table() -> &'static [PrimeRecord] {
    static TABLE: OnceLock<Vec<PrimeRecord>> = OnceLock::new();
    TABLE.get_or_init(|| diff_table(12, 16, 3000, SignMode::Minus, &LabConfig::default()).unwrap())
}

proptest! {
    #[test]
    fn pi_star_antitone(h in 1u64..500, m in 1u64..20) {
        let rows = table();
        let (h, hm) = (BigUint::from(h), BigUint::from(h * m));
        prop_assert!(pi_star(rows, &hm).unwrap() <= pi_star(rows, &h).unwrap());
    }

    #[test]
    fn pi_star_vs_pi_h(h in 1u64..5000) {
        let rows = table();
        let ramified = rows.iter().filter(|r| h % r.p == 0).count();
        let hb = BigUint::from(h);
        prop_assert!(pi_star(rows, &hb).unwrap() <= pi_h(rows, &hb).unwrap() + ramified);
    }
}

fn synthetic(p: u64, a1: i64, a2: i64) -> PrimeRecord {
    let d = BigInt::from(a1 - a2);
    let factorization = (a1 != a2).then(|| cuspdiff::arith::factorize(&d).unwrap());
    PrimeRecord {
        p,
        a1: BigInt::from(a1),
        a2: BigInt::from(a2),
        omega: factorization.as_ref().map(|f| f.omega()),
        big_omega: factorization.as_ref().map(|f| f.big_omega()),
        factorization,
        d,
        flags: BTreeSet::new(),
    }
}

#[test]
fn zero_rows_excluded_everywhere() {
    let with_zero = vec![synthetic(3, 10, 10), synthetic(5, 7, 1), synthetic(7, 4, 4)];
    let without: Vec<PrimeRecord> = with_zero.iter().filter(|r| r.p == 5).cloned().collect();
    for h in [1u64, 2, 3, 6, 1000] {
        let h = BigUint::from(h);
        assert_eq!(pi_star(&with_zero, &h).unwrap(), pi_star(&without, &h).unwrap());
    }
    let a = bound_satisfaction(&with_zero, 16).unwrap();
    let b = bound_satisfaction(&without, 16).unwrap();
    assert_eq!((a.considered, a.max_omega, a.max_big_omega), (b.considered, b.max_omega, b.max_big_omega));
    for family in [SieveFamily::Main, SieveFamily::OmegaVariant] {
        let a = sieve_certificate(&with_zero, 16, 1e4, family, 3).unwrap();
        let b = sieve_certificate(&without, 16, 1e4, family, 3).unwrap();
        assert_eq!(a.summary.w_total, b.summary.w_total);
        assert_eq!(a.summary.evaluated, 1);
    }
}

#[test]
fn plus_mode_rows_are_sums() {
    let rows = diff_table(16, 22, 200, SignMode::Plus, &LabConfig::default()).unwrap();
    for r in &rows {
        assert_eq!(r.d, &r.a1 + &r.a2);
        if let Some(f) = &r.factorization {
            assert_eq!(&f.product(), r.d.magnitude());
        }
    }
}

#[test]
fn report_survives_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ExperimentSpec::new(18, 20, 400);
    let report = run_experiment(&spec, &LabConfig::default()).unwrap();
    let path = dir.path().join("r.json");
    export_report(&report, ReportFormat::Json, &path).unwrap();
    let back = import_report(&path).unwrap();
    assert_eq!(back.deterministic_json().unwrap(), report.deterministic_json().unwrap());
    assert_eq!(back.timestamps, report.timestamps);
    assert!(back.is_consistent().unwrap());
    // Exact integers are strings in the JSON.
    let raw: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(raw["rows"][0]["a1"].is_string());
    assert_eq!(raw["rows"][0]["p"], 2);
}
