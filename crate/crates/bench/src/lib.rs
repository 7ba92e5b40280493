//! Inputs shared by the benchmarks.

use num_bigint::{BigInt, BigUint, RandBigInt};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `count` random integers of exactly `bits` bits, reproducible from `seed`.
pub fn random_integers(count: usize, bits: u64, seed: u64) -> Vec<BigInt> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let top = BigUint::from(1u8) << (bits - 1);
            BigInt::from(rng.gen_biguint(bits - 1) + top)
        })
        .collect()
}

/// The product of two primes just above `2^31` and `2^61`.
pub fn hard_semiprime() -> BigInt {
    BigInt::from(2_147_483_659u64) * BigInt::from(2_305_843_009_213_693_951u64)
}
