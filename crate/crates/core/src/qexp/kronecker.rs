//! Series multiplication by Kronecker substitution.
//!
//! Both operands are packed into one big integer by evaluating at `B = 2^(32w)`
//! where the slot width `w` (in 32-bit limbs) is large enough that every
//! coefficient of the truncated product satisfies `|c| < B/2`. The product of
//! the packed integers is then unpacked in balanced base-`B` digits. This hands
//! the work to the big-integer multiplier (Karatsuba/Toom-3) instead of an
//! `O(n²)` loop over big coefficients.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;

fn max_bits(coeffs: &[BigInt]) -> u64 {
    coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
}

fn ceil_log2(n: usize) -> u64 {
    (usize::BITS - n.saturating_sub(1).leading_zeros()) as u64
}

/// Limbs per slot needed to hold any coefficient of the truncated product.
fn slot_limbs(a: &[BigInt], b: &[BigInt], n_terms: usize) -> usize {
    let bits = max_bits(a) + max_bits(b) + ceil_log2(n_terms.max(1)) + 2;
    bits.div_ceil(32).max(1) as usize
}

fn pack(coeffs: &[BigInt], w: usize) -> BigInt {
    let mut pos = vec![0u32; coeffs.len() * w];
    let mut neg = vec![0u32; coeffs.len() * w];
    let mut any_neg = false;
    for (i, c) in coeffs.iter().enumerate() {
        let (sign, digits) = c.to_u32_digits();
        let buf = match sign {
            Sign::Minus => {
                any_neg = true;
                &mut neg
            }
            _ => &mut pos,
        };
        buf[i * w..i * w + digits.len()].copy_from_slice(&digits);
    }
    let pos = BigInt::from_biguint(Sign::Plus, BigUint::new(pos));
    if any_neg {
        pos - BigInt::from_biguint(Sign::Plus, BigUint::new(neg))
    } else {
        pos
    }
}

fn unpack(value: &BigInt, w: usize, n_terms: usize) -> Vec<BigInt> {
    let (sign, limbs) = value.to_u32_digits();
    let base = BigInt::from(1u8) << (32 * w);
    let half = BigInt::from(1u8) << (32 * w - 1);
    let mut out = Vec::with_capacity(n_terms);
    let mut carry = false;
    for i in 0..n_terms {
        let lo = (i * w).min(limbs.len());
        let hi = ((i + 1) * w).min(limbs.len());
        let mut digit = BigInt::from_biguint(Sign::Plus, BigUint::from_slice(&limbs[lo..hi]));
        if carry {
            digit += 1u8;
        }
        if digit >= half {
            digit -= &base;
            carry = true;
        } else {
            carry = false;
        }
        if sign == Sign::Minus {
            digit = -digit;
        }
        out.push(digit);
    }
    out
}

/// First `n_terms` coefficients of the product of two coefficient vectors.
pub fn mul_truncated(a: &[BigInt], b: &[BigInt], n_terms: usize) -> Vec<BigInt> {
    let a = &a[..a.len().min(n_terms)];
    let b = &b[..b.len().min(n_terms)];
    if a.is_empty() || b.is_empty() || n_terms == 0 {
        return vec![BigInt::zero(); n_terms];
    }
    let w = slot_limbs(a, b, n_terms);
    let pa = pack(a, w);
    let product = if std::ptr::eq(a, b) {
        &pa * &pa
    } else {
        &pa * &pack(b, w)
    };
    unpack(&product, w, n_terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(a: &[i64], b: &[i64], n: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); n];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j < n {
                    out[i + j] += BigInt::from(*x) * BigInt::from(*y);
                }
            }
        }
        out
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn carries_across_slots() {
        let a = big(&[-1, 0, -1, i64::MAX, i64::MIN]);
        let b = big(&[i64::MIN, -1, 1, 0, i64::MAX]);
        assert_eq!(mul_truncated(&a, &b, 9), naive(&[-1, 0, -1, i64::MAX, i64::MIN], &[i64::MIN, -1, 1, 0, i64::MAX], 9));
    }

    #[test]
    fn zero_operands() {
        assert_eq!(mul_truncated(&big(&[0, 0]), &big(&[5]), 3), big(&[0, 0, 0]));
        assert_eq!(mul_truncated(&[], &big(&[5]), 2), big(&[0, 0]));
    }

    proptest! {
        #[test]
        fn matches_naive(a in prop::collection::vec(any::<i64>(), 1..40),
                         b in prop::collection::vec(any::<i64>(), 1..40),
                         n in 1usize..90) {
            prop_assert_eq!(mul_truncated(&big(&a), &big(&b), n), naive(&a, &b, n));
        }
    }
}
