use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{check_pair, gcd_many, serde_decimal, LabConfig};
use crate::arith::{factorize_with, primes_up_to, Factorization};
use crate::error::{Error, Result};
use crate::richert::bounds;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CongruenceStatus {
    /// `D = 1`.
    NoCongruence,
    /// `D > 1`, factored, and `ω(D)` within the bound.
    Verified,
    /// `D > 1` but its factorization timed out.
    Partial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub k1: u32,
    pub k2: u32,
    pub n_primes: usize,
    pub confirm_primes: usize,
    /// `gcd` of `a₁(p) − a₂(p)` over the first `n_primes` primes.
    #[serde(with = "serde_decimal::biguint")]
    pub d: BigUint,
    /// Shortest prefix of primes whose gcd already equals `d`.
    pub stable_from: usize,
    /// `d` divides the difference at every confirmation prime.
    pub confirmed: bool,
    pub confirm_failures: Vec<u64>,
    pub factorization: Option<Factorization>,
    pub omega: Option<usize>,
    pub b_omega: u64,
    pub status: CongruenceStatus,
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut bound = 64u64;
    loop {
        let ps = primes_up_to(bound);
        if ps.len() >= count {
            return ps[..count].to_vec();
        }
        bound *= 2;
    }
}

/// The largest `D` dividing `a₁(p) − a₂(p)` for the first `n_primes` primes,
/// tested against the following `confirm_primes` primes.
pub fn congruence_search(
    k1: u32,
    k2: u32,
    n_primes: usize,
    confirm_primes: usize,
    config: &LabConfig,
) -> Result<CongruenceReport> {
    check_pair(k1, k2)?;
    if n_primes < 10 {
        return Err(Error::invalid("n_primes", format!("need at least 10, got {n_primes}")));
    }
    let primes = first_primes(n_primes + confirm_primes);
    let n_terms = *primes.last().expect("nonempty") as usize + 1;
    let f1 = config.cache.eigenform(k1, n_terms)?;
    let f2 = config.cache.eigenform(k2, n_terms)?;
    let diffs: Vec<BigInt> = primes
        .iter()
        .map(|&p| f1.coefficient(p as usize) - f2.coefficient(p as usize))
        .collect();
    let (search, confirm) = diffs.split_at(n_primes);
    let d = gcd_many(search);
    // Prefix gcds only shrink, so the first match is where it stabilizes.
    let mut prefix = BigUint::zero();
    let mut stable_from = n_primes;
    for (i, v) in search.iter().enumerate() {
        prefix = num_integer::Integer::gcd(&prefix, v.magnitude());
        if prefix == d {
            stable_from = i + 1;
            break;
        }
    }

    let confirm_failures: Vec<u64> = confirm
        .iter()
        .zip(&primes[n_primes..])
        .filter(|(v, _)| !d.is_zero() && !(v.magnitude() % &d).is_zero())
        .map(|(_, &p)| p)
        .collect();
    let b_omega = bounds(k1.max(k2))?.b_omega;
    let mut report = CongruenceReport {
        k1,
        k2,
        n_primes,
        confirm_primes,
        d: d.clone(),
        stable_from,
        confirmed: confirm_failures.is_empty(),
        confirm_failures,
        factorization: None,
        omega: None,
        b_omega,
        status: CongruenceStatus::NoCongruence,
    };
    if d.is_one() {
        return Ok(report);
    }
    match factorize_with(&BigInt::from(d), &config.factor) {
        Ok(f) => {
            let w = f.omega();
            if w as u64 > b_omega {
                return Err(Error::Invariant(format!("ω(D) = {w} exceeds {b_omega}")));
            }
            report.omega = Some(w);
            report.factorization = Some(f);
            report.status = CongruenceStatus::Verified;
        }
        Err(Error::FactorizationIncomplete { .. }) => report.status = CongruenceStatus::Partial,
        Err(e) => return Err(e),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_sixteen() {
        let c = LabConfig::default();
        let r = congruence_search(12, 16, 50, 100, &c).unwrap();
        let s = congruence_search(12, 16, 100, 100, &c).unwrap();
        assert_eq!(r.d, s.d);
        assert!(s.confirmed);
        assert!((BigUint::from(240u32) % &s.d).is_zero());
        assert!(congruence_search(12, 16, 9, 10, &c).is_err());
    }

    #[test]
    fn prime_list() {
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
        assert_eq!(first_primes(200).len(), 200);
    }
}
