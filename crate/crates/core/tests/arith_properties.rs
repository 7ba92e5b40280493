use std::time::Duration;

use cuspdiff::arith::{big_omega, factorize_with, omega, primes_up_to, FactorConfig};
use num_integer::Integer;
use proptest::prelude::*;
use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Strong-probable-prime test to fixed bases, written from scratch.
fn oracle_is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u8);
    if n < &two {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u8;
    let s = n1.trailing_zeros().unwrap();
    let d = &n1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn check(n: &BigInt, config: &FactorConfig) {
    let f = factorize_with(n, config).unwrap_or_else(|e| panic!("{n}: {e}"));
    assert_eq!(f.product(), *n.magnitude(), "n = {n}");
    let mut last = BigUint::zero();
    for pf in f.factors() {
        assert!(pf.exponent >= 1);
        assert!(pf.prime > last, "factors unsorted for {n}");
        assert!(oracle_is_prime(&pf.prime), "{} listed as prime in {n}", pf.prime);
        last = pf.prime.clone();
    }
}

#[test]
fn random_40_bit_reassemble() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let config = FactorConfig::default();
    for _ in 0..10_000 {
        check(&(BigInt::from(rng.gen_biguint(40)) + 1), &config);
    }
}

#[test]
fn random_120_bit_reassemble() {
    // Pure rho needs √q steps for the second-largest factor q; a generous
    // deadline keeps the few balanced cases from timing out on a loaded host.
    let config = FactorConfig {
        timeout: Duration::from_secs(600),
        ..FactorConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(120);
    for _ in 0..1_000 {
        check(&(BigInt::from(rng.gen_biguint(120)) + 1), &config);
    }
}

#[test]
fn sieve_matches_trial_division() {
    let naive: Vec<u64> = (2..20_000u64)
        .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .collect();
    assert_eq!(primes_up_to(19_999), naive);
    assert!(primes_up_to(1).is_empty());
}

/// Odd primes from Sundaram's sieve: `i + j + 2ij` never hits `(p − 1)/2`.
fn sundaram(limit: u64) -> Vec<u64> {
    let half = ((limit - 1) / 2) as usize;
    let mut struck = vec![false; half + 1];
    let mut i = 1;
    while i + i + 2 * i * i <= half {
        let mut j = i;
        while i + j + 2 * i * j <= half {
            struck[i + j + 2 * i * j] = true;
            j += 1;
        }
        i += 1;
    }
    let mut primes = vec![2];
    primes.extend((1..=half).filter(|&k| !struck[k]).map(|k| 2 * k as u64 + 1));
    primes
}

#[test]
fn sieve_matches_sundaram_to_a_million() {
    assert_eq!(primes_up_to(1_000_000), sundaram(1_000_000));
    assert_eq!(primes_up_to(999_983).last(), Some(&999_983));
}

proptest! {
    #[test]
    fn omega_additive_on_coprime(m in 1u64..1u64 << 40, n in 1u64..1u64 << 40) {
        prop_assume!(m.gcd(&n) == 1);
        let (bm, bn) = (BigInt::from(m), BigInt::from(n));
        let mn = &bm * &bn;
        prop_assert_eq!(omega(&mn).unwrap(), omega(&bm).unwrap() + omega(&bn).unwrap());
        prop_assert_eq!(big_omega(&mn).unwrap(), big_omega(&bm).unwrap() + big_omega(&bn).unwrap());
    }

    #[test]
    fn factorization_sign_insensitive(n in 2i64..1i64 << 50) {
        let config = FactorConfig::default();
        let pos = factorize_with(&BigInt::from(n), &config).unwrap();
        let neg = factorize_with(&BigInt::from(-n), &config).unwrap();
        prop_assert_eq!(pos.factors(), neg.factors());
    }
}
