//! Exhaustive-enumeration oracles for the closed-form counts.
//!
//! Nothing here calls the formulas in the parent module; every count comes
//! from walking the relevant finite set.

use std::collections::HashSet;

use rayon::prelude::*;

use super::{check_odd_prime, modulus, QuadraticCounts};
use crate::error::{Error, Result};

/// Largest modulus `ℓⁿ` for which full 2×2 matrix enumeration is allowed.
pub const ENUMERATION_BUDGET: u64 = 25;

/// Largest modulus for enumerating pairs of invertible matrices.
pub const PAIR_ENUMERATION_BUDGET: u64 = 11;

fn budget(m: u64, limit: u64) -> Result<()> {
    if m > limit {
        Err(Error::BudgetExceeded {
            modulus: m,
            budget: limit,
        })
    } else {
        Ok(())
    }
}

/// Histogram of `(det, tr)` over all 2×2 matrices modulo `m`.
#[derive(Clone, Debug)]
pub struct DetTraceTable {
    modulus: u64,
    counts: Vec<u64>,
}

impl DetTraceTable {
    pub fn build(ell: u64, n: u32) -> Result<Self> {
        check_odd_prime(ell)?;
        let m = modulus(ell, n)?;
        budget(m, ENUMERATION_BUDGET)?;
        let mu = m as usize;
        let counts = (0..m)
            .into_par_iter()
            .map(|a| {
                let mut local = vec![0u64; mu * mu];
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            let det = (a * d + m * m - b * c) % m;
                            let tr = (a + d) % m;
                            local[det as usize * mu + tr as usize] += 1;
                        }
                    }
                }
                local
            })
            .reduce(
                || vec![0u64; mu * mu],
                |mut x, y| {
                    x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                    x
                },
            );
        Ok(DetTraceTable { modulus: m, counts })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, det: u64, trace: u64) -> u64 {
        let m = self.modulus;
        self.counts[(det % m) as usize * m as usize + (trace % m) as usize]
    }

    /// Matrices with the given determinant, any trace.
    pub fn with_det(&self, det: u64) -> u64 {
        (0..self.modulus).map(|t| self.get(det, t)).sum()
    }
}

/// `#{γ : det γ = d, tr γ = t}` by enumerating every matrix mod `ℓⁿ`.
pub fn count_det_trace_bruteforce(ell: u64, n: u32, d: u64, t: u64) -> Result<u64> {
    Ok(DetTraceTable::build(ell, n)?.get(d, t))
}

fn naive_pow(base: u64, exp: u32, m: u64) -> u64 {
    (0..exp).fold(1 % m, |acc, _| acc * base % m)
}

fn linked_pairs(ell: u64, m: u64, k1: u32, k2: u32) -> HashSet<(u64, u64)> {
    (1..m)
        .filter(|v| v % ell != 0)
        .map(|v| (naive_pow(v, k1 - 1, m), naive_pow(v, k2 - 1, m)))
        .collect()
}

/// `|𝒜_{ℓⁿ}|` as `Σ_{(d₁,d₂) ∈ Λₙ} #{det = d₁}·#{det = d₂}` with per-determinant
/// counts from enumeration.
pub fn card_a_bruteforce(ell: u64, n: u32, k1: u32, k2: u32) -> Result<u128> {
    let table = DetTraceTable::build(ell, n)?;
    let m = table.modulus();
    Ok(linked_pairs(ell, m, k1, k2)
        .into_iter()
        .map(|(d1, d2)| table.with_det(d1) as u128 * table.with_det(d2) as u128)
        .sum())
}

/// `|𝒞_{ℓⁿ}|` by walking every pair of invertible matrices.
pub fn card_c_bruteforce(ell: u64, n: u32, k1: u32, k2: u32) -> Result<u128> {
    check_odd_prime(ell)?;
    let m = modulus(ell, n)?;
    budget(m, PAIR_ENUMERATION_BUDGET)?;
    let lambda = linked_pairs(ell, m, k1, k2);
    let mut gl2 = Vec::new();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let det = (a * d + m * m - b * c) % m;
                    if det % ell != 0 {
                        gl2.push((det, (a + d) % m));
                    }
                }
            }
        }
    }
    Ok(gl2
        .par_iter()
        .map(|&(det_a, tr_a)| {
            gl2.iter()
                .filter(|&&(det_b, tr_b)| tr_a == tr_b && lambda.contains(&(det_a, det_b)))
                .count() as u128
        })
        .sum())
}

/// `#{γ ≡ Id (mod ℓ) : det γ = d}` in `GL₂(Z/ℓⁿZ)`, enumerating `γ = Id + ℓM`.
pub fn kernel_count_check(ell: u64, n: u32, d: u64) -> Result<u64> {
    check_odd_prime(ell)?;
    let m = modulus(ell, n)?;
    budget(m, ENUMERATION_BUDGET)?;
    if d % ell != 1 {
        return Err(Error::invalid("d", format!("{d} is not ≡ 1 mod {ell}")));
    }
    let lift = m / ell;
    let mut count = 0;
    for x in 0..lift {
        for y in 0..lift {
            for z in 0..lift {
                for w in 0..lift {
                    let (a, b, c, dd) = (1 + ell * x, ell * y, ell * z, 1 + ell * w);
                    if (a * dd + m * m - b * c) % m == d % m {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// Counts for `a² − at + d` over `a ∈ Z/ℓ²Z`, by enumeration.
pub fn quadratic_counts_bruteforce(ell: u64, t: u64, d: u64) -> Result<QuadraticCounts> {
    check_odd_prime(ell)?;
    let m = ell * ell;
    let mut out = QuadraticCounts {
        zero_roots: 0,
        nonzero_divisible: 0,
        nonzero_a_unit_values: 0,
    };
    for a in 0..m {
        let value = (a * a + m * m - a * (t % m) + d) % m;
        if value == 0 {
            out.zero_roots += 1;
        } else if value % ell == 0 {
            out.nonzero_divisible += 1;
        } else if a != 0 {
            out.nonzero_a_unit_values += 1;
        }
    }
    Ok(out)
}

/// `#{(b, c) ∈ (Z/ℓ²Z)² : bc = target}`.
pub fn product_pair_count(ell: u64, target: u64) -> Result<u64> {
    check_odd_prime(ell)?;
    let m = ell * ell;
    let mut count = 0;
    for b in 0..m {
        for c in 0..m {
            if b * c % m == target % m {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_values() {
        assert_eq!(count_det_trace_bruteforce(5, 1, 1, 0).unwrap(), 30);
        assert_eq!(count_det_trace_bruteforce(5, 1, 1, 2).unwrap(), 25);
        assert_eq!(count_det_trace_bruteforce(3, 2, 1, 2).unwrap(), 99);
        assert_eq!(count_det_trace_bruteforce(3, 1, 1, 0).unwrap(), 6);
        assert_eq!(count_det_trace_bruteforce(3, 1, 2, 0).unwrap(), 12);
        assert_eq!(card_a_bruteforce(3, 1, 12, 16).unwrap(), 1152);
        assert_eq!(card_a_bruteforce(5, 1, 12, 16).unwrap(), 57_600);
        // v² = 1 for every unit mod 3, so Λ₁ = {(1, 1)}.
        assert_eq!(card_a_bruteforce(3, 1, 3, 3).unwrap(), 24 * 24);
        assert_eq!(card_c_bruteforce(3, 1, 12, 16).unwrap(), 414);
        assert_eq!(card_c_bruteforce(5, 1, 12, 16).unwrap(), 11_900);
        assert_eq!(kernel_count_check(3, 2, 1).unwrap(), 27);
        assert_eq!(kernel_count_check(3, 2, 4).unwrap(), 27);
        assert!(kernel_count_check(3, 2, 2).is_err());
        assert_eq!(quadratic_counts_bruteforce(3, 2, 1).unwrap().zero_roots, 3);
        assert_eq!(quadratic_counts_bruteforce(5, 0, 1).unwrap().zero_roots, 2);
    }

    #[test]
    fn budgets_refuse() {
        assert!(matches!(DetTraceTable::build(7, 2), Err(Error::BudgetExceeded { modulus: 49, .. })));
        assert!(card_c_bruteforce(13, 1, 12, 16).is_err());
        assert!(DetTraceTable::build(2, 1).is_err());
    }
}
