//! Counting in the linked-determinant product of `GL_2(Z/ℓⁿZ)`.
//!
//! For weights `k₁, k₂` and an odd prime `ℓ`, the image set is
//!
//! ```text
//! 𝒜_{ℓⁿ} = {(A, B) ∈ GL₂(Z/ℓⁿ)² : det A = v^{k₁−1}, det B = v^{k₂−1}, v a unit}
//! 𝒞_{ℓⁿ} = {(A, B) ∈ 𝒜_{ℓⁿ} : tr A = tr B}
//! ```
//!
//! and `δ(ℓⁿ) = |𝒞|/|𝒜|`. This description is taken as the definition for
//! every odd `ℓ`; for the actual Galois image it is only guaranteed past an
//! ineffective bound, which the experiment layer probes empirically.
//!
//! Closed-form counts live here; [`enumerate`] holds exhaustive oracles and
//! [`sample`] a Monte-Carlo estimator.

pub mod enumerate;
pub mod sample;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};

pub use enumerate::{
    card_a_bruteforce, card_c_bruteforce, count_det_trace_bruteforce, kernel_count_check,
    product_pair_count, quadratic_counts_bruteforce, DetTraceTable, ENUMERATION_BUDGET,
};
pub use sample::sample_trace_equal_frequency;

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

pub(crate) fn check_odd_prime(ell: u64) -> Result<()> {
    if ell == 2 {
        return Err(Error::invalid("ell", "ℓ = 2 is excluded; ℓ must be an odd prime"));
    }
    if !is_prime_u64(ell) {
        return Err(Error::invalid("ell", format!("{ell} is not an odd prime")));
    }
    Ok(())
}

fn check_exponent(n: u32, allowed: &[u32]) -> Result<()> {
    if allowed.contains(&n) {
        Ok(())
    } else {
        Err(Error::invalid("n", format!("exponent {n} not in {allowed:?}")))
    }
}

pub(crate) fn modulus(ell: u64, n: u32) -> Result<u64> {
    ell.checked_pow(n)
        .filter(|m| *m < 1 << 31)
        .ok_or_else(|| Error::invalid("n", format!("{ell}^{n} is too large")))
}

/// `(ℓ, n, k₁, k₂)` together with `λₙ = gcd(ℓⁿ − ℓⁿ⁻¹, k₁−1, k₂−1)` and
/// `|Λₙ| = (ℓⁿ − ℓⁿ⁻¹)/λₙ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageParams {
    pub ell: u64,
    pub n: u32,
    pub k1: u32,
    pub k2: u32,
    pub lambda_n: u64,
    pub lambda_size: u64,
}

impl ImageParams {
    pub fn new(ell: u64, n: u32, k1: u32, k2: u32) -> Result<Self> {
        check_odd_prime(ell)?;
        if n == 0 {
            return Err(Error::invalid("n", "exponent must be at least 1"));
        }
        if k1 < 2 || k2 < 2 {
            return Err(Error::invalid("k", format!("weights must be ≥ 2, got ({k1}, {k2})")));
        }
        let m = modulus(ell, n)?;
        let units = m - m / ell;
        let lambda_n = units.gcd(&(k1 as u64 - 1)).gcd(&(k2 as u64 - 1));
        Ok(ImageParams {
            ell,
            n,
            k1,
            k2,
            lambda_n,
            lambda_size: units / lambda_n,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.ell.pow(self.n)
    }

    /// The set `Λₙ = {(v^{k₁−1}, v^{k₂−1})}` of linked determinant pairs.
    pub fn linked_determinants(&self) -> Result<Vec<(u64, u64)>> {
        let m = self.modulus();
        let set: BTreeSet<(u64, u64)> = (1..m)
            .filter(|v| v % self.ell != 0)
            .map(|v| (pow_mod(v, self.k1 as u64 - 1, m), pow_mod(v, self.k2 as u64 - 1, m)))
            .collect();
        if set.len() as u64 != self.lambda_size {
            return Err(Error::Invariant(format!(
                "|Λ| = {} but (ℓⁿ − ℓⁿ⁻¹)/λₙ = {}",
                set.len(),
                self.lambda_size
            )));
        }
        Ok(set.into_iter().collect())
    }
}

/// Class of a discriminant `t² − 4d` in `Z/ℓⁿZ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiscClass {
    Zero,
    /// Nonzero but divisible by ℓ; only possible for `n = 2`.
    NonzeroDivisibleByEll,
    QuadraticResidue,
    NonResidue,
}

/// Classify a residue `x` modulo `ℓⁿ`, `n ∈ {1, 2}`.
///
/// A unit modulo `ℓ²` is a square iff its reduction modulo `ℓ` is.
pub fn classify_disc(ell: u64, n: u32, x: i64) -> Result<DiscClass> {
    check_odd_prime(ell)?;
    check_exponent(n, &[1, 2])?;
    let m = modulus(ell, n)?;
    Ok(classify_unchecked(ell, m, x.rem_euclid(m as i64) as u64))
}

fn classify_unchecked(ell: u64, m: u64, x: u64) -> DiscClass {
    let x = x % m;
    if x == 0 {
        DiscClass::Zero
    } else if x % ell == 0 {
        DiscClass::NonzeroDivisibleByEll
    } else if pow_mod(x % ell, (ell - 1) / 2, ell) == 1 {
        DiscClass::QuadraticResidue
    } else {
        DiscClass::NonResidue
    }
}

fn count_from_class(ell: u64, n: u32, class: DiscClass) -> u128 {
    let l = ell as u128;
    match (n, class) {
        (1, DiscClass::QuadraticResidue) => l * l + l,
        (1, DiscClass::Zero) => l * l,
        (1, DiscClass::NonResidue) => l * l - l,
        (2, DiscClass::Zero) => l.pow(4) + l.pow(3) - l * l,
        (2, DiscClass::NonzeroDivisibleByEll) => l.pow(4) - l * l,
        (2, DiscClass::QuadraticResidue) => l.pow(4) + l.pow(3),
        (2, DiscClass::NonResidue) => l.pow(4) - l.pow(3),
        _ => unreachable!("class {class:?} cannot occur for n = {n}"),
    }
}

/// `t² − 4d mod m` for residues `d, t`.
fn discriminant(m: u64, d: u64, t: u64) -> u64 {
    let m = m as u128;
    let (d, t) = (d as u128 % m, t as u128 % m);
    ((t * t + 4 * (m - d)) % m) as u64
}

/// `#{γ ∈ GL₂(Z/ℓⁿZ) : det γ = d, tr γ = t}` for `n ∈ {1, 2}`, by the
/// discriminant case split.
pub fn count_det_trace(ell: u64, n: u32, d: u64, t: u64) -> Result<u128> {
    check_odd_prime(ell)?;
    check_exponent(n, &[1, 2])?;
    if d % ell == 0 {
        return Err(Error::invalid("d", format!("{d} is not a unit mod {ell}^{n}")));
    }
    let m = modulus(ell, n)?;
    Ok(count_from_class(ell, n, classify_unchecked(ell, m, discriminant(m, d, t))))
}

/// Counts over `a ∈ Z/ℓ²Z` for the quadratic `a² − at + d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticCounts {
    /// `a` with `a² − at + d = 0`.
    pub zero_roots: u64,
    /// `a` with `0 ≠ a² − at + d ≡ 0 (mod ℓ)`.
    pub nonzero_divisible: u64,
    /// `a ≠ 0` with `a² − at + d` a unit.
    pub nonzero_a_unit_values: u64,
}

/// Root and value counts of `a² − at + d` over `Z/ℓ²Z` for a unit `d`,
/// selected by the class of `t² − 4d`.
pub fn count_quadratic_roots(ell: u64, t: u64, d: u64) -> Result<QuadraticCounts> {
    check_odd_prime(ell)?;
    if d % ell == 0 {
        return Err(Error::invalid("d", format!("{d} is not a unit mod {ell}^2")));
    }
    let l = ell;
    let m = ell * ell;
    let counts = match classify_unchecked(ell, m, discriminant(m, d, t)) {
        DiscClass::Zero => (l, 0, l * l - l - 1),
        DiscClass::NonzeroDivisibleByEll => (0, l, l * l - l - 1),
        DiscClass::QuadraticResidue => (2, 2 * (l - 1), l * l - 2 * l - 1),
        DiscClass::NonResidue => (0, 0, l * l - 1),
    };
    Ok(QuadraticCounts {
        zero_roots: counts.0,
        nonzero_divisible: counts.1,
        nonzero_a_unit_values: counts.2,
    })
}

/// `|GL₂(Z/ℓⁿZ)| = ℓ^{4n−3}(ℓ−1)(ℓ²−1)`.
pub fn gl2_order(ell: u64, n: u32) -> u128 {
    let l = ell as u128;
    l.pow(4 * n - 3) * (l - 1) * (l * l - 1)
}

/// `|𝒜_{ℓⁿ}| = ℓ^{7(n−1)}(ℓ−1)³(ℓ²+ℓ)²/λₙ`.
pub fn card_a(ell: u64, n: u32, k1: u32, k2: u32) -> Result<u128> {
    let params = ImageParams::new(ell, n, k1, k2)?;
    let l = ell as u128;
    let overflow = || Error::invalid("n", format!("|𝒜| for {ell}^{n} overflows 128 bits"));
    let base = l
        .checked_pow(7 * (n - 1))
        .and_then(|x| x.checked_mul((l - 1).pow(3)))
        .and_then(|x| x.checked_mul((l * l + l).pow(2)))
        .ok_or_else(overflow)?;
    Ok(base / params.lambda_n as u128)
}

/// `|𝒞_{ℓⁿ}| = Σ_t Σ_{(d₁,d₂) ∈ Λₙ} N(d₁, t)·N(d₂, t)` with `N` from
/// [`count_det_trace`]; `n ∈ {1, 2}`.
pub fn card_c(ell: u64, n: u32, k1: u32, k2: u32) -> Result<u128> {
    check_exponent(n, &[1, 2])?;
    let params = ImageParams::new(ell, n, k1, k2)?;
    let m = params.modulus();
    let lambda = params.linked_determinants()?;
    // N(d, t) depends on t² − 4d only through its class; tabulate the
    // nonzero squares mod ℓ once.
    let mut square = vec![false; ell as usize];
    for a in 1..ell {
        square[(a * a % ell) as usize] = true;
    }
    let n_of = |d: u64, t: u64| -> u128 {
        let x = discriminant(m, d, t);
        let class = if x == 0 {
            DiscClass::Zero
        } else if x % ell == 0 {
            DiscClass::NonzeroDivisibleByEll
        } else if square[(x % ell) as usize] {
            DiscClass::QuadraticResidue
        } else {
            DiscClass::NonResidue
        };
        count_from_class(ell, n, class)
    };
    let mut total = 0u128;
    for t in 0..m {
        for &(d1, d2) in &lambda {
            total += n_of(d1, t) * n_of(d2, t);
        }
    }
    Ok(total)
}

/// Exact `|𝒜|`, `|𝒞|` and `δ = |𝒞|/|𝒜|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageCounts {
    pub params: ImageParams,
    #[serde(with = "crate::lab::serde_decimal::u128")]
    pub card_a: u128,
    #[serde(with = "crate::lab::serde_decimal::u128")]
    pub card_c: u128,
    #[serde(with = "crate::lab::serde_decimal::rational")]
    pub delta: BigRational,
}

pub fn image_counts(ell: u64, n: u32, k1: u32, k2: u32) -> Result<ImageCounts> {
    let params = ImageParams::new(ell, n, k1, k2)?;
    let card_a = card_a(ell, n, k1, k2)?;
    let card_c = card_c(ell, n, k1, k2)?;
    let delta = BigRational::new(BigInt::from(card_c), BigInt::from(card_a));
    Ok(ImageCounts {
        params,
        card_a,
        card_c,
        delta,
    })
}

/// `δ(ℓⁿ)` as a reduced fraction.
pub fn delta_exact(ell: u64, n: u32, k1: u32, k2: u32) -> Result<BigRational> {
    Ok(image_counts(ell, n, k1, k2)?.delta)
}

/// `δ(h)` for odd squarefree `h`, with `𝒜_h` the direct product of the
/// prime-level images; `δ(1) = 1`.
pub fn delta_squarefree(h: u64, k1: u32, k2: u32) -> Result<BigRational> {
    if h == 0 || h % 2 == 0 {
        return Err(Error::invalid("h", format!("{h} is not a positive odd integer")));
    }
    let mut rest = h;
    let mut delta = BigRational::one();
    let mut p = 3;
    while rest > 1 {
        if p * p > rest {
            p = rest;
        }
        if rest % p == 0 {
            rest /= p;
            if rest % p == 0 {
                return Err(Error::invalid("h", format!("{h} is not squarefree")));
            }
            delta *= delta_exact(p, 1, k1, k2)?;
        }
        p += 2;
    }
    Ok(delta)
}
