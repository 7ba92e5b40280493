//! Exact q-expansions of level-1 modular forms.
//!
//! A [`QSeries`] is a truncated power series with arbitrary-precision integer
//! coefficients. Products go through Kronecker substitution (see
//! [`kronecker`]); [`mul_schoolbook`] is kept as the reference convolution.

mod cache;
mod eigenform;
pub mod kronecker;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub use cache::{CoefficientCache, CACHE_DIR_ENV, CACHE_FORMAT_TAG};
pub use eigenform::{coefficients_at_primes, eigenform, eigenform_capped, Eigenform};
pub(crate) use eigenform::check_weight;

/// Weights `k` for which `S_k(1)` is one-dimensional.
pub const SUPPORTED_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

/// Default ceiling on the number of retained coefficients.
pub const DEFAULT_N_TERMS_CAP: usize = 100_000;

/// Truncated power series `Σ_{n < n_terms} c_n qⁿ` with exact coefficients.
///
/// A series holding fewer coefficients than an operation asks for is read as
/// a polynomial, i.e. missing coefficients are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<BigInt>,
    label: String,
}

impl QSeries {
    pub fn new(coeffs: Vec<BigInt>, label: impl Into<String>) -> Self {
        QSeries {
            coeffs,
            label: label.into(),
        }
    }

    pub fn from_i64(coeffs: &[i64], label: impl Into<String>) -> Self {
        QSeries::new(coeffs.iter().map(|&c| BigInt::from(c)).collect(), label)
    }

    /// The series `1 + O(q^n_terms)`.
    pub fn one(n_terms: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n_terms];
        if let Some(c) = coeffs.first_mut() {
            *c = BigInt::one();
        }
        QSeries::new(coeffs, "1")
    }

    pub fn n_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `qⁿ`; zero past the stored range.
    pub fn coeff(&self, n: usize) -> BigInt {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Copy resized to exactly `n_terms` coefficients (zero padded).
    pub fn resized(&self, n_terms: usize) -> QSeries {
        let mut coeffs: Vec<BigInt> = self.coeffs.iter().take(n_terms).cloned().collect();
        coeffs.resize(n_terms, BigInt::zero());
        QSeries::new(coeffs, self.label.clone())
    }

    pub fn sub(&self, other: &QSeries, n_terms: usize) -> QSeries {
        let coeffs = (0..n_terms)
            .map(|i| self.coeff(i) - other.coeff(i))
            .collect();
        QSeries::new(coeffs, format!("({})-({})", self.label, other.label))
    }

    pub fn scale(&self, factor: &BigInt) -> QSeries {
        QSeries::new(
            self.coeffs.iter().map(|c| c * factor).collect(),
            self.label.clone(),
        )
    }

    /// Exact division of every coefficient, or `None` if some coefficient is
    /// not divisible.
    pub fn div_exact(&self, divisor: &BigInt) -> Option<QSeries> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(divisor);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(QSeries::new(out, self.label.clone()))
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: [", self.label)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

fn require_terms(n_terms: usize, min: usize) -> Result<()> {
    if n_terms < min {
        return Err(Error::invalid(
            "n_terms",
            format!("need at least {min}, got {n_terms}"),
        ));
    }
    Ok(())
}

/// `Σ_{n≥1} σ_r(n) qⁿ` where `σ_r(n) = Σ_{d | n} d^r`.
pub fn sigma_series(r: u32, n_terms: usize) -> Result<QSeries> {
    require_terms(n_terms, 1)?;
    let mut coeffs = vec![BigInt::zero(); n_terms];
    for d in 1..n_terms {
        let power = BigInt::from(d).pow(r);
        for m in (d..n_terms).step_by(d) {
            coeffs[m] += &power;
        }
    }
    Ok(QSeries::new(coeffs, format!("sigma_{r}")))
}

/// Normalized Eisenstein series `E₄ = 1 + 240 Σ σ₃(n)qⁿ` or
/// `E₆ = 1 − 504 Σ σ₅(n)qⁿ`.
pub fn eisenstein(k: u32, n_terms: usize) -> Result<QSeries> {
    let (r, factor) = match k {
        4 => (3, 240),
        6 => (5, -504),
        _ => {
            return Err(Error::invalid(
                "k",
                format!("Eisenstein series available for k = 4, 6 only, got {k}"),
            ))
        }
    };
    let sigma = sigma_series(r, n_terms)?;
    let mut series = sigma.scale(&BigInt::from(factor));
    series.coeffs[0] = BigInt::one();
    Ok(series.with_label(format!("E{k}")))
}

/// Schoolbook truncated Cauchy product.
pub fn mul_schoolbook(a: &QSeries, b: &QSeries, n_terms: usize) -> QSeries {
    let mut out = vec![BigInt::zero(); n_terms];
    for (i, x) in a.coeffs.iter().take(n_terms).enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().take(n_terms - i).enumerate() {
            out[i + j] += x * y;
        }
    }
    QSeries::new(out, format!("{}*{}", a.label, b.label))
}

/// Exact truncated product `a·b mod q^n_terms`.
pub fn mul(a: &QSeries, b: &QSeries, n_terms: usize) -> QSeries {
    // Below a few dozen terms packing costs more than it saves.
    if a.n_terms().min(b.n_terms()).min(n_terms) < 32 {
        return mul_schoolbook(a, b, n_terms);
    }
    let coeffs = kronecker::mul_truncated(&a.coeffs, &b.coeffs, n_terms);
    QSeries::new(coeffs, format!("{}*{}", a.label, b.label))
}

/// `aᵉ mod q^n_terms` by repeated squaring; `a⁰ = 1`.
pub fn pow(a: &QSeries, e: u32, n_terms: usize) -> QSeries {
    let label = format!("({})^{e}", a.label);
    let mut result = QSeries::one(n_terms);
    let mut base = a.resized(n_terms);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base, n_terms);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base, n_terms);
        }
    }
    result.with_label(label)
}

/// Ramanujan's Δ computed as `(E₄³ − E₆²)/1728`.
pub fn delta_series(n_terms: usize) -> Result<QSeries> {
    require_terms(n_terms, 2)?;
    let e4 = eisenstein(4, n_terms)?;
    let e6 = eisenstein(6, n_terms)?;
    let e4_sq = mul(&e4, &e4, n_terms);
    let e4_cubed = mul(&e4_sq, &e4, n_terms);
    let e6_sq = mul(&e6, &e6, n_terms);
    let diff = e4_cubed.sub(&e6_sq, n_terms);
    let delta = diff.div_exact(&BigInt::from(1728)).ok_or_else(|| {
        Error::Invariant("E4^3 - E6^2 has a coefficient not divisible by 1728".into())
    })?;
    if delta.coeff(1) != BigInt::one() {
        return Err(Error::Invariant(format!(
            "Delta not normalized: coefficient of q is {}",
            delta.coeff(1)
        )));
    }
    Ok(delta.with_label("Delta"))
}

/// Δ as `q·∏(1 − qⁿ)²⁴`, built from Jacobi's identity
/// `∏(1 − qⁿ)³ = Σ_j (−1)^j (2j+1) q^{j(j+1)/2}` raised to the eighth power.
///
/// Uses only sparse-by-dense products in fixed-width integers, so it shares no
/// code path with [`delta_series`].
pub fn eta24_series(n_terms: usize) -> Result<QSeries> {
    require_terms(n_terms, 1)?;
    let len = n_terms - 1;
    let mut cube: Vec<(usize, i128)> = Vec::new();
    for j in 0usize.. {
        let e = j * (j + 1) / 2;
        if e >= len {
            break;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        cube.push((e, sign * (2 * j as i128 + 1)));
    }
    let mut acc = vec![0i128; len];
    for &(e, c) in &cube {
        acc[e] = c;
    }
    for _ in 1..8 {
        let mut next = vec![0i128; len];
        for (i, &x) in acc.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for &(e, c) in &cube {
                let idx = i + e;
                if idx >= len {
                    break;
                }
                let term = x
                    .checked_mul(c)
                    .and_then(|t| next[idx].checked_add(t))
                    .ok_or_else(|| {
                        Error::Invariant(format!("eta product overflowed at q^{idx}"))
                    })?;
                next[idx] = term;
            }
        }
        acc = next;
    }
    let mut coeffs = Vec::with_capacity(n_terms);
    coeffs.push(BigInt::zero());
    coeffs.extend(acc.into_iter().map(BigInt::from));
    Ok(QSeries::new(coeffs, "eta^24"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &QSeries) -> Vec<i64> {
        s.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    // σ_r(n) by direct divisor enumeration.
    fn sigma_naive(r: u32, n: u64) -> i64 {
        (1..=n).filter(|d| n % d == 0).map(|d| d.pow(r) as i64).sum()
    }

    #[test]
    fn sigma_small() {
        assert_eq!(ints(&sigma_series(3, 3).unwrap()), vec![0, 1, 9]);
        assert_eq!(ints(&sigma_series(3, 2).unwrap()), vec![0, 1]);
        assert_eq!(ints(&sigma_series(5, 3).unwrap()), vec![0, 1, 33]);
        let s = sigma_series(3, 60).unwrap();
        for n in 1..60 {
            assert_eq!(i64::try_from(&s.coeffs()[n]).unwrap(), sigma_naive(3, n as u64));
        }
        assert!(sigma_series(3, 0).is_err());
    }

    #[test]
    fn eisenstein_small() {
        assert_eq!(ints(&eisenstein(4, 3).unwrap()), vec![1, 240, 2160]);
        assert_eq!(ints(&eisenstein(6, 3).unwrap()), vec![1, -504, -16632]);
        assert_eq!(ints(&eisenstein(4, 1).unwrap()), vec![1]);
        assert!(eisenstein(8, 3).is_err());
        assert!(eisenstein(2, 3).is_err());
    }

    #[test]
    fn products() {
        let a = QSeries::from_i64(&[1, 1], "1+q");
        assert_eq!(ints(&mul(&a, &a, 2)), vec![1, 2]);
        assert_eq!(ints(&pow(&a, 0, 3)), vec![1, 0, 0]);
        assert_eq!(ints(&pow(&a, 4, 6)), vec![1, 4, 6, 4, 1, 0]);
        let e4 = eisenstein(4, 3).unwrap();
        assert_eq!(ints(&mul(&e4, &e4, 3)), vec![1, 480, 61920]);
    }

    #[test]
    fn kronecker_path_matches_schoolbook() {
        let e4 = eisenstein(4, 200).unwrap();
        let e6 = eisenstein(6, 200).unwrap();
        assert_eq!(mul(&e4, &e6, 200), mul_schoolbook(&e4, &e6, 200));
        let sq = mul(&e6, &e6, 150);
        assert_eq!(sq, mul_schoolbook(&e6, &e6, 150));
    }

    #[test]
    fn delta_small() {
        assert_eq!(ints(&delta_series(3).unwrap()), vec![0, 1, -24]);
        assert_eq!(delta_series(4).unwrap().coeff(3), BigInt::from(252));
        assert_eq!(ints(&delta_series(2).unwrap()), vec![0, 1]);
        assert!(delta_series(1).is_err());
    }

    #[test]
    fn eta_small() {
        assert_eq!(ints(&eta24_series(3).unwrap()), vec![0, 1, -24]);
        assert_eq!(eta24_series(6).unwrap().coeff(5), BigInt::from(4830));
        assert_eq!(ints(&eta24_series(2).unwrap()), vec![0, 1]);
    }

    #[test]
    fn delta_matches_eta_product() {
        let n = 400;
        assert_eq!(delta_series(n).unwrap().coeffs(), eta24_series(n).unwrap().coeffs());
    }
}
