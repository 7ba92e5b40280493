use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::{delta_series, eisenstein, mul, pow, QSeries, DEFAULT_N_TERMS_CAP, SUPPORTED_WEIGHTS};
use crate::arith::primes_up_to;
use crate::error::{Error, Result};

/// Normalized cusp eigenform of level 1 in a weight where `S_k(1)` is a line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eigenform {
    weight: u32,
    series: QSeries,
}

/// Exponents `(a, b)` with `f_k = Δ·E₄ᵃ·E₆ᵇ`.
fn monomial(k: u32) -> Option<(u32, u32)> {
    match k {
        12 => Some((0, 0)),
        16 => Some((1, 0)),
        18 => Some((0, 1)),
        20 => Some((2, 0)),
        22 => Some((1, 1)),
        26 => Some((2, 1)),
        _ => None,
    }
}

pub(crate) fn check_weight(k: u32) -> Result<()> {
    if SUPPORTED_WEIGHTS.contains(&k) {
        Ok(())
    } else {
        Err(Error::UnsupportedWeight {
            weight: k,
            supported: format!("{SUPPORTED_WEIGHTS:?}"),
        })
    }
}

impl Eigenform {
    /// Wrap an already computed series, checking weight and normalization.
    pub fn from_series(weight: u32, series: QSeries) -> Result<Self> {
        check_weight(weight)?;
        if series.n_terms() >= 2 && series.coeff(1) != BigInt::one() {
            return Err(Error::Invariant(format!(
                "weight {weight} series is not normalized at q^1"
            )));
        }
        Ok(Eigenform { weight, series })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> u32 {
        1
    }

    pub fn series(&self) -> &QSeries {
        &self.series
    }

    pub fn n_terms(&self) -> usize {
        self.series.n_terms()
    }

    /// `a(n)`; zero beyond the computed range.
    pub fn coefficient(&self, n: usize) -> BigInt {
        self.series.coeff(n)
    }

    /// `p^{k−1}`.
    pub fn det_power(&self, p: u64) -> BigInt {
        BigInt::from(p).pow(self.weight - 1)
    }

    /// First `a(p^{r+1}) ≠ a(p)a(p^r) − p^{k−1}a(p^{r−1})` with `p^{r+1} < limit`.
    pub fn check_hecke_recursion(&self, limit: usize) -> Result<()> {
        let limit = limit.min(self.n_terms());
        for p in primes_up_to(limit as u64) {
            let p = p as usize;
            let ap = self.coefficient(p);
            let pk = self.det_power(p as u64);
            let (mut prev, mut cur, mut q) = (BigInt::one(), ap.clone(), p);
            while let Some(next_q) = q.checked_mul(p).filter(|&n| n < limit) {
                let expected = &ap * &cur - &pk * &prev;
                if self.coefficient(next_q) != expected {
                    return Err(Error::Invariant(format!(
                        "weight {}: Hecke recursion fails at n = {next_q}",
                        self.weight
                    )));
                }
                prev = std::mem::replace(&mut cur, expected);
                q = next_q;
            }
        }
        Ok(())
    }

    /// First coprime pair with `a(mn) ≠ a(m)a(n)`, `mn < limit`.
    pub fn check_multiplicativity(&self, limit: usize) -> Result<()> {
        let limit = limit.min(self.n_terms());
        for m in 2..limit {
            for n in m + 1..limit {
                let Some(mn) = m.checked_mul(n).filter(|&x| x < limit) else {
                    break;
                };
                if m.gcd(&n) == 1 && self.coefficient(mn) != self.coefficient(m) * self.coefficient(n) {
                    return Err(Error::Invariant(format!(
                        "weight {}: a({mn}) != a({m})a({n})",
                        self.weight
                    )));
                }
            }
        }
        Ok(())
    }

    /// Deligne's bound `a(p)² ≤ 4p^{k−1}` for all primes `p ≤ x`.
    pub fn check_deligne(&self, x: u64) -> Result<()> {
        let four = BigInt::from(4);
        for p in primes_up_to(x.min(self.n_terms() as u64 - 1)) {
            let ap = self.coefficient(p as usize);
            if &ap * &ap > &four * self.det_power(p) {
                return Err(Error::Invariant(format!(
                    "weight {}: |a({p})| exceeds 2p^((k-1)/2)",
                    self.weight
                )));
            }
        }
        Ok(())
    }
}

/// The normalized eigenform `Δ·E₄ᵃ·E₆ᵇ` of weight `k` to `n_terms` coefficients.
pub fn eigenform(k: u32, n_terms: usize) -> Result<Eigenform> {
    eigenform_capped(k, n_terms, DEFAULT_N_TERMS_CAP)
}

/// [`eigenform`] with an explicit ceiling on `n_terms`.
pub fn eigenform_capped(k: u32, n_terms: usize, cap: usize) -> Result<Eigenform> {
    check_weight(k)?;
    let (a, b) = monomial(k).expect("weight checked");
    if n_terms > cap {
        return Err(Error::invalid(
            "n_terms",
            format!("{n_terms} exceeds the configured cap {cap}"),
        ));
    }
    let n = n_terms.max(2);
    let mut f = delta_series(n)?;
    if a > 0 {
        f = mul(&f, &pow(&eisenstein(4, n)?, a, n), n);
    }
    if b > 0 {
        f = mul(&f, &pow(&eisenstein(6, n)?, b, n), n);
    }
    let series = f.resized(n_terms).with_label(format!("f{k}"));
    Eigenform::from_series(k, series)
}

/// `a(p)` for every prime `p ≤ x`, extending the form if it is too short.
pub fn coefficients_at_primes(f: &Eigenform, x: u64) -> Result<BTreeMap<u64, BigInt>> {
    if x < 2 {
        return Ok(BTreeMap::new());
    }
    let needed = x as usize + 1;
    let extended;
    let f = if f.n_terms() < needed {
        extended = eigenform(f.weight(), needed)?;
        &extended
    } else {
        f
    };
    Ok(primes_up_to(x)
        .into_iter()
        .map(|p| (p, f.coefficient(p as usize)))
        .collect())
}
