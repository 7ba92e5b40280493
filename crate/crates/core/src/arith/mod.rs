//! Primes, primality and factorization.
//!
//! [`factorize`] runs trial division by the primes below 10⁵, then
//! Miller–Rabin on the cofactor, then Pollard–Brent rho on whatever composite
//! remains. A per-integer deadline turns a stuck search into
//! [`Error::FactorizationIncomplete`]; a partial answer is never returned.

mod prime;
mod rho;
mod sieve;

use std::fmt;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use prime::{is_prime_u64, primality, Primality};
pub use sieve::primes_up_to;

/// Trial division covers every prime below this bound.
pub const TRIAL_DIVISION_BOUND: u64 = 100_000;

/// Random Miller–Rabin rounds for inputs of 64 bits and more.
pub const MILLER_RABIN_ROUNDS: u32 = 64;

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_DIVISION_BOUND - 1))
}

/// Knobs for [`factorize_with`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorConfig {
    pub timeout: Duration,
    pub seed: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            timeout: Duration::from_secs(10),
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeFactor {
    #[serde(with = "crate::lab::serde_decimal::biguint")]
    pub prime: BigUint,
    pub exponent: u32,
    /// `false` when primality rests on random Miller–Rabin rounds.
    pub certified: bool,
}

/// Complete factorization of `|n|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    #[serde(with = "crate::lab::serde_decimal::biguint")]
    value: BigUint,
    factors: Vec<PrimeFactor>,
}

impl Factorization {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &[PrimeFactor] {
        &self.factors
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Number of prime divisors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|f| f.exponent).sum()
    }

    pub fn is_certified(&self) -> bool {
        self.factors.iter().all(|f| f.certified)
    }

    /// Multiply the factors back together.
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, f| acc * f.prime.pow(f.exponent))
    }

    /// Exponent of `p` in the factorization (0 if absent).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|f| f.prime == BigUint::from(p))
            .map_or(0, |f| f.exponent)
    }
}

impl fmt::Display for Factorization {
    /// `2^4*3*5`; the empty product prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, pf) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if pf.exponent == 1 {
                write!(f, "{}", pf.prime)?;
            } else {
                write!(f, "{}^{}", pf.prime, pf.exponent)?;
            }
        }
        Ok(())
    }
}

/// Factor with the default configuration.
pub fn factorize(n: &BigInt) -> Result<Factorization> {
    factorize_with(n, &FactorConfig::default())
}

fn push_factor(out: &mut Vec<PrimeFactor>, prime: BigUint, exponent: u32, certified: bool) {
    match out.iter_mut().find(|f| f.prime == prime) {
        Some(f) => {
            f.exponent += exponent;
            f.certified &= certified;
        }
        None => out.push(PrimeFactor {
            prime,
            exponent,
            certified,
        }),
    }
}

/// Strip primes below [`TRIAL_DIVISION_BOUND`]; returns the cofactor.
fn trial_divide(mut m: BigUint, out: &mut Vec<PrimeFactor>) -> BigUint {
    for &p in trial_primes() {
        if let Some(small) = m.to_u128() {
            let mut small = small;
            let p = p as u128;
            if p * p > small {
                break;
            }
            let mut e = 0;
            while small % p == 0 {
                small /= p;
                e += 1;
            }
            if e > 0 {
                push_factor(out, BigUint::from(p), e, true);
            }
            m = BigUint::from(small);
        } else {
            let mut e = 0;
            loop {
                let (q, r) = m.div_rem(&BigUint::from(p));
                if !r.is_zero() {
                    break;
                }
                m = q;
                e += 1;
            }
            if e > 0 {
                push_factor(out, BigUint::from(p), e, true);
            }
        }
    }
    m
}

/// Factor `|n|` completely, or fail with
/// [`Error::FactorizationIncomplete`] once `config.timeout` has elapsed.
pub fn factorize_with(n: &BigInt, config: &FactorConfig) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::invalid("n", "cannot factor zero"));
    }
    let start = Instant::now();
    let deadline = start + config.timeout;
    let value = n.magnitude().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut factors = Vec::new();

    let rest = trial_divide(value.clone(), &mut factors);
    let bound_sq = BigUint::from(TRIAL_DIVISION_BOUND) * TRIAL_DIVISION_BOUND;
    let mut pending = Vec::new();
    if !rest.is_one() {
        if rest < bound_sq {
            // No prime factor below its square root: prime.
            push_factor(&mut factors, rest, 1, true);
        } else {
            pending.push(rest);
        }
    }
    while let Some(m) = pending.pop() {
        match primality(&m, MILLER_RABIN_ROUNDS, &mut rng) {
            Primality::Prime => push_factor(&mut factors, m, 1, true),
            Primality::ProbablePrime => push_factor(&mut factors, m, 1, false),
            Primality::Composite => match rho::find_divisor(&m, &mut rng, deadline) {
                rho::RhoOutcome::Factor(d) => {
                    let other = &m / &d;
                    pending.push(d);
                    pending.push(other);
                }
                rho::RhoOutcome::TimedOut => {
                    return Err(Error::FactorizationIncomplete {
                        value: value.to_string(),
                        elapsed_ms: start.elapsed().as_millis(),
                    })
                }
            },
        }
    }
    factors.sort_by(|a, b| a.prime.cmp(&b.prime));
    Ok(Factorization { value, factors })
}

/// An upper bound on Ω(n) that needs no factorization beyond trial
/// division: the smooth part counts exactly, and every prime in the cofactor
/// exceeds [`TRIAL_DIVISION_BOUND`].
pub fn big_omega_upper_bound(n: &BigInt) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::invalid("n", "cannot bound Ω(0)"));
    }
    let mut small = Vec::new();
    let rest = trial_divide(n.magnitude().clone(), &mut small);
    let smooth: u32 = small.iter().map(|f| f.exponent).sum();
    let bound_sq = BigUint::from(TRIAL_DIVISION_BOUND) * TRIAL_DIVISION_BOUND;
    let large = if rest < bound_sq {
        // 1 or a prime.
        u32::from(!rest.is_one())
    } else {
        // rest < 2^bits and each of its prime factors exceeds B.
        (rest.bits() as f64 / (TRIAL_DIVISION_BOUND as f64).log2()).floor() as u32
    };
    Ok(smooth + large)
}

/// ω(n); ω(±1) = 0.
pub fn omega(n: &BigInt) -> Result<usize> {
    Ok(factorize(n)?.omega())
}

/// Ω(n); Ω(±1) = 0.
pub fn big_omega(n: &BigInt) -> Result<u32> {
    Ok(factorize(n)?.big_omega())
}

/// gcd of the absolute values; `gcd_all([0, …, 0]) = 0`.
pub fn gcd_all(values: &[BigInt]) -> Result<BigUint> {
    if values.is_empty() {
        return Err(Error::invalid("values", "gcd of an empty list"));
    }
    Ok(values
        .iter()
        .fold(BigUint::zero(), |acc, v| acc.gcd(v.magnitude())))
}
