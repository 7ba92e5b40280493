//! Monte-Carlo estimate of `δ(ℓⁿ)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{pow_mod, ImageParams};
use crate::error::{Error, Result};

fn inverse_mod(x: u64, m: u64) -> u64 {
    let e = (x as i64).extended_gcd(&(m as i64));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i64) as u64
}

/// Uniform matrix with determinant `det`: draw matrices until one is
/// invertible, then rescale its first row.
fn matrix_with_det<R: Rng>(rng: &mut R, ell: u64, m: u64, det: u64) -> [u64; 4] {
    loop {
        let [a, b, c, d] = [(); 4].map(|_| rng.gen_range(0..m));
        let got = (a * d + m * m - b * c) % m;
        if got % ell == 0 {
            continue;
        }
        let s = det * inverse_mod(got, m) % m;
        return [a * s % m, b * s % m, c, d];
    }
}

fn one_trial(params: &ImageParams, seed: u64, trial: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let (ell, m) = (params.ell, params.modulus());
    let v = loop {
        let v = rng.gen_range(1..m);
        if v % ell != 0 {
            break v;
        }
    };
    let d1 = pow_mod(v, params.k1 as u64 - 1, m);
    let d2 = pow_mod(v, params.k2 as u64 - 1, m);
    let a = matrix_with_det(&mut rng, ell, m, d1);
    let b = matrix_with_det(&mut rng, ell, m, d2);
    (a[0] + a[3]) % m == (b[0] + b[3]) % m
}

/// Fraction of `trials` uniform samples from `𝒜_{ℓⁿ}` with `tr A = tr B`.
///
/// Trial `i` draws from its own ChaCha stream, so the result depends only on
/// `seed`, not on how the trials are scheduled across threads.
pub fn sample_trace_equal_frequency(
    ell: u64,
    n: u32,
    k1: u32,
    k2: u32,
    trials: u64,
    seed: u64,
) -> Result<BigRational> {
    if trials == 0 {
        return Err(Error::invalid("trials", "need at least one trial"));
    }
    let params = ImageParams::new(ell, n, k1, k2)?;
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&i| one_trial(&params, seed, i))
        .count();
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(trials)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_rejects_empty() {
        let a = sample_trace_equal_frequency(5, 1, 12, 16, 2_000, 9).unwrap();
        let b = sample_trace_equal_frequency(5, 1, 12, 16, 2_000, 9).unwrap();
        assert_eq!(a, b);
        assert!(sample_trace_equal_frequency(5, 1, 12, 16, 0, 9).is_err());
    }

    #[test]
    fn forced_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for det in [1u64, 2, 7, 24] {
            let [a, b, c, d] = matrix_with_det(&mut rng, 5, 25, det);
            assert_eq!((a * d + 625 - b * c) % 25, det);
        }
    }
}
