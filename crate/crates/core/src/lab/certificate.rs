use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{abs_nonzero, restricted_part, PrimeRecord, RecordFlag};
use crate::arith::big_omega_upper_bound;
use crate::error::{Error, Result};
use crate::richert::{bound_from_chain, record_chain_bound, weighted_sum_w, Contribution, SieveFamily, SieveParams, WeightMode};

/// Smallest prime of the sieving set unless configured otherwise.
pub const DEFAULT_SIEVE_FLOOR: u64 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub family: SieveFamily,
    pub k: u32,
    pub x: f64,
    pub sieve_floor: u64,
    pub params: SieveParams,
    pub w_total: f64,
    pub evaluated: usize,
    pub sifted_out: usize,
    pub positive: usize,
    /// Rows with a squared middle-range sieving prime.
    pub squarefull_middle: usize,
    /// Positive rows whose count was not checked because they also carry a
    /// squared middle-range prime (variant family only).
    pub excluded_squarefull: usize,
    /// Positive rows without a factorization whose size alone does not
    /// settle the bound.
    pub unchecked_quarantined: usize,
    /// Positive rows without a factorization where the trial-division bound
    /// on Ω already meets the chain bound.
    pub certified_by_size: usize,
    pub chain_bound: f64,
    /// Largest ω (main) or Ω (variant) over the sieving primes among checked rows.
    pub max_checked: u32,
    /// Same count over all primes, sieving set or not.
    pub max_checked_all_primes: u32,
    /// Rows above `1/λ + u·log|d|_𝒫/log X`; zero whenever the deduction holds.
    pub record_bound_exceeded: usize,
    /// Rows above the chain bound. Always empty in a returned summary.
    pub violations: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SieveCertificate {
    pub summary: CertificateSummary,
    pub contributions: Vec<Contribution>,
}

/// Evaluate `𝒲` on the rows and check that every positively contributing
/// row obeys the chain bound for its family. A violation is an error.
pub fn sieve_certificate(
    records: &[PrimeRecord],
    k: u32,
    x: f64,
    family: SieveFamily,
    sieve_floor: u64,
) -> Result<SieveCertificate> {
    if sieve_floor < 2 {
        return Err(Error::invalid("sieve_floor", format!("need floor ≥ 2, got {sieve_floor}")));
    }
    let params = family.params(k)?;
    let mode = match family {
        SieveFamily::Main => WeightMode::Divides,
        SieveFamily::OmegaVariant => WeightMode::ExactlyDivides,
    };
    let rows: Vec<&PrimeRecord> = records.iter().filter(|r| !r.is_zero()).collect();
    let data: Vec<(u64, BigUint)> = rows
        .iter()
        .map(|r| (r.p, abs_nonzero(&r.d).expect("nonzero")))
        .collect();
    let in_set = |q: u64| q >= sieve_floor;
    let w = weighted_sum_w(&data, x, &params, mode, in_set)?;
    let chain_bound = bound_from_chain(k, params.u, params.lambda, x)?;

    let mut s = CertificateSummary {
        family,
        k,
        x,
        sieve_floor,
        params,
        w_total: w.total,
        evaluated: rows.len(),
        sifted_out: 0,
        positive: 0,
        squarefull_middle: 0,
        excluded_squarefull: 0,
        unchecked_quarantined: 0,
        certified_by_size: 0,
        chain_bound,
        max_checked: 0,
        max_checked_all_primes: 0,
        record_bound_exceeded: 0,
        violations: Vec::new(),
    };
    for (r, c) in rows.iter().zip(&w.contributions) {
        s.sifted_out += c.sifted_out as usize;
        s.squarefull_middle += c.squarefull_middle as usize;
        if c.sifted_out || c.value <= 0.0 {
            continue;
        }
        s.positive += 1;
        if family == SieveFamily::OmegaVariant && c.squarefull_middle {
            s.excluded_squarefull += 1;
            continue;
        }
        let Some(f) = &r.factorization else {
            // Ω over all primes bounds both checked counts.
            if big_omega_upper_bound(&r.d)? as f64 <= chain_bound {
                s.certified_by_size += 1;
            } else {
                s.unchecked_quarantined += 1;
            }
            continue;
        };
        let floor = BigUint::from(sieve_floor);
        let (omega_p, big_omega_p, log_p) = restricted_part(f, |q| *q >= floor);
        let (checked, all) = match family {
            SieveFamily::Main => (omega_p as u32, f.omega() as u32),
            SieveFamily::OmegaVariant => (big_omega_p, f.big_omega()),
        };
        s.max_checked = s.max_checked.max(checked);
        s.max_checked_all_primes = s.max_checked_all_primes.max(all);
        if checked as f64 > record_chain_bound(log_p, params.u, params.lambda, x) {
            s.record_bound_exceeded += 1;
        }
        if checked as f64 > chain_bound {
            s.violations.push(r.p);
        }
    }
    if !s.violations.is_empty() {
        return Err(Error::Invariant(format!(
            "{:?} chain bound {chain_bound:.3} exceeded at p ∈ {:?}",
            family, s.violations
        )));
    }
    Ok(SieveCertificate {
        summary: s,
        contributions: w.contributions,
    })
}

/// Copy the sifted-out / positive / squarefull flags of `cert` onto `records`.
pub fn apply_sieve_flags(records: &mut [PrimeRecord], cert: &SieveCertificate) {
    let mut it = cert.contributions.iter().peekable();
    for r in records.iter_mut().filter(|r| !r.is_zero()) {
        let Some(c) = it.next_if(|c| c.p == r.p) else {
            continue;
        };
        if c.sifted_out {
            r.flags.insert(RecordFlag::SiftedOut);
        } else if c.value > 0.0 {
            r.flags.insert(RecordFlag::PositiveContribution);
        }
        if c.squarefull_middle {
            r.flags.insert(RecordFlag::SquarefullMiddle);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{diff_table, LabConfig, SignMode};

    #[test]
    fn small_table_certifies() {
        let mut t = diff_table(12, 16, 500, SignMode::Minus, &LabConfig::default()).unwrap();
        for family in [SieveFamily::Main, SieveFamily::OmegaVariant] {
            let c = sieve_certificate(&t, 16, 500.0, family, DEFAULT_SIEVE_FLOOR).unwrap();
            assert!(c.summary.violations.is_empty());
            assert_eq!(c.summary.record_bound_exceeded, 0);
            assert_eq!(c.summary.evaluated, t.len());
        }
        let c = sieve_certificate(&t, 16, 500.0, SieveFamily::Main, 3).unwrap();
        apply_sieve_flags(&mut t, &c);
        assert_eq!(
            t.iter().filter(|r| r.flags.contains(&RecordFlag::PositiveContribution)).count(),
            c.summary.positive
        );
        assert!(sieve_certificate(&t, 16, 500.0, SieveFamily::Main, 1).is_err());
    }

    #[test]
    fn sifted_rows_are_excluded() {
        // X^{1/v} ≈ 4.7, so the prime 3 sifts.
        let t = diff_table(12, 16, 50, SignMode::Minus, &LabConfig::default()).unwrap();
        let c = sieve_certificate(&t, 16, 1e40, SieveFamily::Main, 3).unwrap();
        let sifted = c.contributions.iter().filter(|c| c.sifted_out).count();
        assert_eq!(sifted, c.summary.sifted_out);
        let by_three = t.iter().filter(|r| !r.is_zero() && r.d.magnitude() % 3u32 == 0u32.into()).count();
        assert_eq!(sifted, by_three);
        assert!(c.contributions.iter().filter(|c| c.sifted_out).all(|c| c.value == 0.0));
        assert!(c.summary.positive + c.summary.sifted_out <= c.summary.evaluated);
    }

    #[test]
    fn quarantined_rows_certified_by_size() {
        let mut t = diff_table(12, 26, 300, SignMode::Minus, &LabConfig::default()).unwrap();
        let full = sieve_certificate(&t, 26, 300.0, SieveFamily::Main, 3).unwrap();
        for r in &mut t {
            r.factorization = None;
            r.omega = None;
            r.big_omega = None;
            r.flags.insert(RecordFlag::FactorizationTimeout);
        }
        let c = sieve_certificate(&t, 26, 300.0, SieveFamily::Main, 3).unwrap();
        assert_eq!(c.summary.positive, full.summary.positive);
        assert_eq!(c.summary.certified_by_size + c.summary.unchecked_quarantined, c.summary.positive);
        // |d| ≤ 4·300^12.5 has fewer than 105 prime factors; the chain bound is above 180.
        assert_eq!(c.summary.unchecked_quarantined, 0);
        assert_eq!(c.summary.max_checked, 0);
    }
}
