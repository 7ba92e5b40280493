//! Experiments on pairs of level-1 eigenforms: per-prime difference tables,
//! the counting functions `π` and `π*`, bound tallies, sieve certificates and
//! congruence search, plus report persistence.

mod certificate;
mod congruence;
mod report;
pub mod serde_decimal;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize_with, primes_up_to, FactorConfig, Factorization};
use crate::error::{Error, Result};
use crate::gl2count::delta_exact;
use crate::qexp::{check_weight, CoefficientCache};
use crate::richert::bounds;

pub use certificate::{apply_sieve_flags, sieve_certificate, CertificateSummary, SieveCertificate, DEFAULT_SIEVE_FLOOR};
pub use congruence::{congruence_search, CongruenceReport, CongruenceStatus};
pub use report::{
    export_report, import_report, run_experiment, ExperimentReport, ExperimentSpec, ReportCounts,
    ReportFormat, Timestamps, CSV_COLUMNS, REPORT_SCHEMA_VERSION,
};

/// Whether rows hold `a₁(p) − a₂(p)` or `a₁(p) + a₂(p)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    #[default]
    Minus,
    Plus,
}

impl SignMode {
    pub fn combine(self, a1: &BigInt, a2: &BigInt) -> BigInt {
        match self {
            SignMode::Minus => a1 - a2,
            SignMode::Plus => a1 + a2,
        }
    }
}

impl std::str::FromStr for SignMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minus" => Ok(SignMode::Minus),
            "plus" => Ok(SignMode::Plus),
            _ => Err(Error::invalid("sign", format!("expected minus or plus, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordFlag {
    ZeroDifference,
    FactorizationTimeout,
    SiftedOut,
    PositiveContribution,
    SquarefullMiddle,
}

impl RecordFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordFlag::ZeroDifference => "zero_difference",
            RecordFlag::FactorizationTimeout => "factorization_timeout",
            RecordFlag::SiftedOut => "sifted_out",
            RecordFlag::PositiveContribution => "positive_contribution",
            RecordFlag::SquarefullMiddle => "squarefull_middle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRecord {
    pub p: u64,
    #[serde(with = "serde_decimal::bigint")]
    pub a1: BigInt,
    #[serde(with = "serde_decimal::bigint")]
    pub a2: BigInt,
    #[serde(with = "serde_decimal::bigint")]
    pub d: BigInt,
    /// `None` when `d = 0` or the factorization timed out.
    pub omega: Option<usize>,
    pub big_omega: Option<u32>,
    pub factorization: Option<Factorization>,
    pub flags: BTreeSet<RecordFlag>,
}

impl PrimeRecord {
    pub fn is_zero(&self) -> bool {
        self.d.is_zero()
    }

    pub fn is_quarantined(&self) -> bool {
        self.flags.contains(&RecordFlag::FactorizationTimeout)
    }

    /// `2^4*3*5`, or empty when there is no factorization.
    pub fn factor_string(&self) -> String {
        self.factorization.as_ref().map(|f| f.to_string()).unwrap_or_default()
    }
}

/// What every lab computation needs besides its own arguments.
#[derive(Clone, Debug, Default)]
pub struct LabConfig {
    pub cache: CoefficientCache,
    pub factor: FactorConfig,
}

fn check_pair(k1: u32, k2: u32) -> Result<()> {
    check_weight(k1)?;
    check_weight(k2)?;
    if k1 == k2 {
        return Err(Error::invalid("k2", format!("weights must differ, both are {k1}")));
    }
    Ok(())
}

/// `d² ≤ 16p^{k−1}`.
pub fn deligne_difference_ok(d: &BigInt, p: u64, k: u32) -> bool {
    d * d <= BigInt::from(16) * BigInt::from(p).pow(k - 1)
}

/// One record per prime `p ≤ x`, built in parallel and returned in order of `p`.
pub fn diff_table(k1: u32, k2: u32, x: u64, sign: SignMode, config: &LabConfig) -> Result<Vec<PrimeRecord>> {
    check_pair(k1, k2)?;
    let primes = primes_up_to(x);
    if primes.is_empty() {
        return Ok(Vec::new());
    }
    let n_terms = x as usize + 1;
    let f1 = config.cache.eigenform(k1, n_terms)?;
    let f2 = config.cache.eigenform(k2, n_terms)?;
    let k = k1.max(k2);
    primes
        .par_iter()
        .map(|&p| {
            let a1 = f1.coefficient(p as usize);
            let a2 = f2.coefficient(p as usize);
            let d = sign.combine(&a1, &a2);
            if !deligne_difference_ok(&d, p, k) {
                return Err(Error::Invariant(format!("|d| = |{d}| exceeds 4·{p}^(({k}-1)/2)")));
            }
            let mut rec = PrimeRecord {
                p,
                a1,
                a2,
                d,
                omega: None,
                big_omega: None,
                factorization: None,
                flags: BTreeSet::new(),
            };
            if rec.d.is_zero() {
                rec.flags.insert(RecordFlag::ZeroDifference);
                return Ok(rec);
            }
            match factorize_with(&rec.d, &config.factor) {
                Ok(f) => {
                    rec.omega = Some(f.omega());
                    rec.big_omega = Some(f.big_omega());
                    rec.factorization = Some(f);
                }
                Err(Error::FactorizationIncomplete { .. }) => {
                    rec.flags.insert(RecordFlag::FactorizationTimeout);
                }
                Err(e) => return Err(e),
            }
            Ok(rec)
        })
        .collect()
}

fn check_h(h: &BigUint) -> Result<()> {
    if h.is_zero() {
        return Err(Error::invalid("h", "need h ≥ 1"));
    }
    Ok(())
}

fn divides(h: &BigUint, d: &BigInt) -> bool {
    (d.magnitude() % h).is_zero()
}

/// `#{p : d ≠ 0, h | d}`.
pub fn pi_star(records: &[PrimeRecord], h: &BigUint) -> Result<usize> {
    check_h(h)?;
    Ok(records.iter().filter(|r| !r.is_zero() && divides(h, &r.d)).count())
}

/// `#{p : p ∤ h, h | d}`.
pub fn pi_h(records: &[PrimeRecord], h: &BigUint) -> Result<usize> {
    check_h(h)?;
    Ok(records
        .iter()
        .filter(|r| !(h % r.p).is_zero() && divides(h, &r.d))
        .count())
}

/// Rows with `d = 0`.
pub fn equal_coefficient_count(records: &[PrimeRecord]) -> usize {
    records.iter().filter(|r| r.is_zero()).count()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub ell: u64,
    pub n: u32,
    pub modulus: u64,
    pub pi_h: usize,
    pub pi_x: usize,
    pub empirical: f64,
    #[serde(with = "serde_decimal::rational")]
    pub delta: BigRational,
    pub delta_f64: f64,
    pub deviation: f64,
    /// `|empirical − δ| > 5·√(δ(1−δ)/π(X))`. Informational only.
    pub exceptional: bool,
}

/// Empirical frequency of `ℓⁿ | d` next to the exact `δ(ℓⁿ)`.
pub fn empirical_delta_comparison(
    records: &[PrimeRecord],
    k1: u32,
    k2: u32,
    ells: &[u64],
    n: u32,
) -> Result<Vec<DeltaRow>> {
    if records.is_empty() {
        return Err(Error::invalid("records", "empty table"));
    }
    let pi_x = records.len();
    ells.iter()
        .map(|&ell| {
            let delta = delta_exact(ell, n, k1, k2)?;
            let modulus = ell.pow(n);
            let count = pi_h(records, &BigUint::from(modulus))?;
            let empirical = count as f64 / pi_x as f64;
            let delta_f64 = delta.to_f64().unwrap_or(f64::NAN);
            let deviation = empirical - delta_f64;
            let scale = 5.0 * (delta_f64 * (1.0 - delta_f64) / pi_x as f64).sqrt();
            Ok(DeltaRow {
                ell,
                n,
                modulus,
                pi_h: count,
                pi_x,
                empirical,
                delta,
                delta_f64,
                deviation,
                exceptional: deviation.abs() > scale,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundTally {
    pub k: u32,
    pub b_omega: u64,
    pub b_big_omega: u64,
    /// Rows with `d ≠ 0` and a complete factorization.
    pub considered: usize,
    /// Rows with `d ≠ 0` whose factorization timed out.
    pub quarantined: usize,
    pub omega_ok: usize,
    pub big_omega_ok: usize,
    pub max_omega: usize,
    pub max_big_omega: u32,
    pub omega_histogram: BTreeMap<usize, usize>,
}

impl BoundTally {
    pub fn all_satisfied(&self) -> bool {
        self.omega_ok == self.considered && self.big_omega_ok == self.considered
    }
}

pub fn bound_satisfaction(records: &[PrimeRecord], k: u32) -> Result<BoundTally> {
    let b = bounds(k)?;
    let mut t = BoundTally {
        k,
        b_omega: b.b_omega,
        b_big_omega: b.b_big_omega,
        ..BoundTally::default()
    };
    for r in records.iter().filter(|r| !r.is_zero()) {
        let (Some(w), Some(bw)) = (r.omega, r.big_omega) else {
            t.quarantined += 1;
            continue;
        };
        t.considered += 1;
        t.omega_ok += (w as u64 <= b.b_omega) as usize;
        t.big_omega_ok += (bw as u64 <= b.b_big_omega) as usize;
        t.max_omega = t.max_omega.max(w);
        t.max_big_omega = t.max_big_omega.max(bw);
        *t.omega_histogram.entry(w).or_default() += 1;
    }
    Ok(t)
}

/// Product of the prime powers of `d` whose prime satisfies `keep`.
pub(crate) fn restricted_part(f: &Factorization, keep: impl Fn(&BigUint) -> bool) -> (usize, u32, f64) {
    let mut omega = 0;
    let mut big_omega = 0;
    let mut log = 0.0;
    for pf in f.factors().iter().filter(|pf| keep(&pf.prime)) {
        omega += 1;
        big_omega += pf.exponent;
        log += pf.exponent as f64 * ln_biguint(&pf.prime);
    }
    (omega, big_omega, log)
}

pub(crate) fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 64;
    (n >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

pub(crate) fn abs_nonzero(d: &BigInt) -> Option<BigUint> {
    (!d.is_zero()).then(|| d.abs().magnitude().clone())
}

pub(crate) fn gcd_many<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigUint {
    values.into_iter().fold(BigUint::zero(), |acc, v| acc.gcd(v.magnitude()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(x: u64, sign: SignMode) -> Vec<PrimeRecord> {
        diff_table(12, 16, x, sign, &LabConfig::default()).unwrap()
    }

    #[test]
    fn small_table() {
        let t = table(10, SignMode::Minus);
        assert_eq!(t.iter().map(|r| r.p).collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        let r = &t[0];
        assert_eq!((r.a1.clone(), r.a2.clone(), r.d.clone()), (BigInt::from(-24), BigInt::from(216), BigInt::from(-240)));
        assert_eq!((r.omega, r.big_omega), (Some(3), Some(6)));
        assert_eq!(r.factor_string(), "2^4*3*5");
        assert_eq!(equal_coefficient_count(&t), 0);

        let plus = table(10, SignMode::Plus);
        assert_eq!(plus[0].d, BigInt::from(192));
        assert!(table(1, SignMode::Minus).is_empty());
        assert_eq!(equal_coefficient_count(&table(1, SignMode::Minus)), 0);
    }

    #[test]
    fn rejects_bad_pairs() {
        let c = LabConfig::default();
        assert!(diff_table(12, 12, 10, SignMode::Minus, &c).unwrap_err().is_invalid_input());
        assert!(diff_table(12, 14, 10, SignMode::Minus, &c).unwrap_err().is_invalid_input());
    }

    #[test]
    fn counting_functions() {
        let t = table(200, SignMode::Minus);
        let h = |n: u64| BigUint::from(n);
        assert_eq!(pi_star(&t, &h(1)).unwrap(), t.iter().filter(|r| !r.is_zero()).count());
        assert!(pi_star(&t, &h(240)).unwrap() >= 1);
        assert!(pi_star(&t, &h(0)).is_err());
        for (a, b) in [(2, 4), (2, 6), (3, 6), (6, 12), (4, 12)] {
            assert!(pi_star(&t, &h(b)).unwrap() <= pi_star(&t, &h(a)).unwrap());
        }
        for n in [2u64, 3, 5, 7, 12, 240] {
            let bad = t.iter().filter(|r| n % r.p == 0).count();
            assert!(pi_star(&t, &h(n)).unwrap() <= pi_h(&t, &h(n)).unwrap() + bad);
        }
    }

    #[test]
    fn tallies() {
        let t = table(10, SignMode::Minus);
        let tally = bound_satisfaction(&t[..1], 16).unwrap();
        assert_eq!((tally.considered, tally.max_omega, tally.b_omega), (1, 3, 114));
        assert!(tally.all_satisfied());
        let empty = bound_satisfaction(&[], 16).unwrap();
        assert_eq!(empty.considered, 0);
        assert!(empty.omega_histogram.is_empty());
    }

    #[test]
    fn delta_rows() {
        let t = table(2000, SignMode::Minus);
        let rows = empirical_delta_comparison(&t, 12, 16, &[5, 7], 1).unwrap();
        assert_eq!(rows[0].delta, BigRational::new(11900.into(), 57600.into()));
        assert!(empirical_delta_comparison(&t, 12, 16, &[], 1).unwrap().is_empty());
        assert!(empirical_delta_comparison(&[], 12, 16, &[5], 1).is_err());
    }

    #[test]
    fn ln_of_huge() {
        let n = BigUint::from(3u8).pow(2000);
        assert!((ln_biguint(&n) - 2000.0 * 3f64.ln()).abs() < 1e-6);
    }
}
