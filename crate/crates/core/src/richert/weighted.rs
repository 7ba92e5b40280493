//! The sifting sum `𝒲` evaluated on concrete data, and the finite-range
//! Mertens-type check behind hypothesis `Ω₂`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::SieveParams;
use crate::arith::primes_up_to;
use crate::error::{Error, Result};

/// Which middle-range primes carry a weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// Every `q | m`.
    Divides,
    /// Only `q ‖ m`.
    ExactlyDivides,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub p: u64,
    pub value: f64,
    pub sifted_out: bool,
    /// `𝒫`-primes in `[X^{1/v}, X^{1/u})` that carry a weight.
    pub weighted_primes: Vec<u64>,
    /// Some middle-range `𝒫`-prime divides `m` at least twice.
    pub squarefull_middle: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSum {
    pub total: f64,
    pub contributions: Vec<Contribution>,
}

fn valuation(m: &BigUint, q: u64) -> u32 {
    let q = BigUint::from(q);
    let mut rest = m.clone();
    let mut e = 0;
    loop {
        let (div, rem) = rest.div_rem(&q);
        if !rem.is_zero() {
            return e;
        }
        rest = div;
        e += 1;
    }
}

/// `Σ` over items of `1 − Σ_q λ(1 − u·log q/log X)`, where items with a
/// `𝒫`-prime factor below `X^{1/v}` contribute 0.
pub fn weighted_sum_w(
    data: &[(u64, BigUint)],
    x: f64,
    params: &SieveParams,
    mode: WeightMode,
    in_sieving_set: impl Fn(u64) -> bool,
) -> Result<WeightedSum> {
    if !(x >= 2.0) {
        return Err(Error::invalid("x", format!("need X ≥ 2, got {x}")));
    }
    if let Some((p, _)) = data.iter().find(|(_, m)| m.is_zero()) {
        return Err(Error::invalid("m", format!("zero value at p = {p}")));
    }
    let log_x = x.ln();
    let (lo, hi) = (log_x / params.v, log_x / params.u);
    let q_max = hi.exp().ceil() as u64;
    let sieving: Vec<u64> = primes_up_to(q_max)
        .into_iter()
        .filter(|&q| (q as f64).ln() < hi && in_sieving_set(q))
        .collect();

    let mut contributions = Vec::with_capacity(data.len());
    for (p, m) in data {
        let mut c = Contribution {
            p: *p,
            value: 1.0,
            sifted_out: false,
            weighted_primes: Vec::new(),
            squarefull_middle: false,
        };
        for &q in &sieving {
            let e = valuation(m, q);
            if e == 0 {
                continue;
            }
            let log_q = (q as f64).ln();
            if log_q < lo {
                c.sifted_out = true;
                break;
            }
            c.squarefull_middle |= e >= 2;
            if e == 1 || mode == WeightMode::Divides {
                c.weighted_primes.push(q);
                c.value -= params.lambda * (1.0 - params.u * log_q / log_x);
            }
        }
        if c.sifted_out {
            c.value = 0.0;
            c.weighted_primes.clear();
            c.squarefull_middle = false;
        }
        contributions.push(c);
    }
    let total = contributions.iter().map(|c| c.value).sum();
    Ok(WeightedSum {
        total,
        contributions,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Omega2Report {
    pub w: u64,
    pub z: u64,
    pub primes_used: usize,
    /// `Σ_{w ≤ ℓ ≤ z} δ(ℓ) log ℓ − log(z/w)`.
    pub discrepancy: f64,
    pub lower: f64,
    pub upper: f64,
    pub passes: bool,
}

/// Finite-range check of `−L ≤ Σ δ(ℓ) log ℓ − log(z/w) ≤ A₂`.
pub fn check_hyp_omega2(
    delta_table: &BTreeMap<u64, BigRational>,
    w: u64,
    z: u64,
    l: f64,
    a2: f64,
) -> Result<Omega2Report> {
    if w < 2 || w > z {
        return Err(Error::invalid("w", format!("need 2 ≤ w ≤ z, got w = {w}, z = {z}")));
    }
    let mut sum = 0.0;
    let mut used = 0;
    for ell in primes_up_to(z).into_iter().filter(|&p| p >= w) {
        let delta = delta_table
            .get(&ell)
            .ok_or_else(|| Error::invalid("delta_table", format!("missing prime {ell}")))?;
        let delta = delta
            .to_f64()
            .ok_or_else(|| Error::Invariant(format!("δ({ell}) not representable")))?;
        sum += delta * (ell as f64).ln();
        used += 1;
    }
    let discrepancy = sum - (z as f64 / w as f64).ln();
    Ok(Omega2Report {
        w,
        z,
        primes_used: used,
        discrepancy,
        lower: -l,
        upper: a2,
        passes: -l <= discrepancy && discrepancy <= a2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn params() -> SieveParams {
        // Middle range at X = 10⁶ is [10, 100).
        SieveParams::new(0.5, 3.0, 6.0, 0.5)
    }

    fn naive(data: &[(u64, u64)], x: f64, p: &SieveParams) -> f64 {
        let lx = x.ln();
        data.iter()
            .map(|&(_, m)| {
                let primes: Vec<u64> = (2..=m).filter(|q| m % q == 0 && (2..*q).all(|r| q % r != 0)).collect();
                if primes.iter().any(|&q| q != 2 && (q as f64).ln() < lx / p.v) {
                    return 0.0;
                }
                1.0 - primes
                    .iter()
                    .filter(|&&q| q != 2 && (q as f64).ln() >= lx / p.v && (q as f64).ln() < lx / p.u)
                    .map(|&q| p.lambda * (1.0 - p.u * (q as f64).ln() / lx))
                    .sum::<f64>()
            })
            .sum()
    }

    #[test]
    fn hand_placed_factors() {
        let raw = [(2, 1u64), (3, 11 * 13), (5, 3 * 11), (7, 2 * 97), (11, 4 * 11 * 11 * 101), (13, 7919)];
        let data: Vec<_> = raw.iter().map(|&(p, m)| (p, BigUint::from(m))).collect();
        let odd = |q: u64| q != 2;
        let s = weighted_sum_w(&data, 1e6, &params(), WeightMode::Divides, odd).unwrap();
        assert!((s.total - naive(&raw, 1e6, &params())).abs() < 1e-12);
        let c = &s.contributions;
        assert_eq!(c[0].value, 1.0);
        assert!(c[2].sifted_out && c[2].value == 0.0);
        assert_eq!(c[1].weighted_primes, vec![11, 13]);
        assert_eq!(c[3].weighted_primes, vec![97]);
        assert!(c[4].squarefull_middle);
        assert_eq!(c[5].value, 1.0);
        assert!(c.iter().all(|c| c.value <= 1.0));

        let e = weighted_sum_w(&data, 1e6, &params(), WeightMode::ExactlyDivides, odd).unwrap();
        assert!(e.contributions[4].weighted_primes.is_empty());
        assert_eq!(e.contributions[4].value, 1.0);
        assert_eq!(e.contributions[1].value, s.contributions[1].value);
    }

    #[test]
    fn linear_in_items() {
        let data: Vec<_> = [(2u64, 143u64), (3, 1), (5, 97 * 89)]
            .iter()
            .map(|&(p, m)| (p, BigUint::from(m)))
            .collect();
        let all = weighted_sum_w(&data, 1e6, &params(), WeightMode::Divides, |_| true).unwrap();
        let drop = weighted_sum_w(&data[1..], 1e6, &params(), WeightMode::Divides, |_| true).unwrap();
        assert!((all.total - drop.total - all.contributions[0].value).abs() < 1e-12);
    }

    #[test]
    fn rejects_zero_and_small_x() {
        let z = [(2u64, BigUint::zero())];
        assert!(weighted_sum_w(&z, 1e6, &params(), WeightMode::Divides, |_| true).is_err());
        assert!(weighted_sum_w(&[], 1.5, &params(), WeightMode::Divides, |_| true).is_err());
    }

    #[test]
    fn omega2_edges() {
        let mut t = BTreeMap::new();
        t.insert(11u64, BigRational::new(BigInt::from(1), BigInt::from(10)));
        let r = check_hyp_omega2(&t, 11, 11, 2.0, 2.0).unwrap();
        assert!((r.discrepancy - 0.1 * 11f64.ln()).abs() < 1e-12);
        let r = check_hyp_omega2(&t, 24, 28, 2.0, 2.0).unwrap();
        assert_eq!(r.primes_used, 0);
        assert!((r.discrepancy + (28.0f64 / 24.0).ln()).abs() < 1e-12);
        assert!(check_hyp_omega2(&t, 11, 13, 2.0, 2.0).is_err());
        assert!(check_hyp_omega2(&t, 1, 13, 2.0, 2.0).is_err());
    }
}
