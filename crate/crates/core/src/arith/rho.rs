//! Pollard's rho with Brent's cycle detection.
//!
//! The iteration `x ↦ x² + c` runs in one of three residue rings chosen by
//! the size of the modulus: native 64-bit, 128-bit Montgomery (moduli below
//! 2¹²⁷), or arbitrary precision.

use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

pub(crate) trait RhoRing {
    type E: Clone + PartialEq;
    fn elem(&self, x: u64) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// `gcd(a, n)`; for Montgomery forms this equals `gcd` of the plain value.
    fn gcd_n(&self, a: &Self::E) -> BigUint;
}

pub(crate) struct Ring64 {
    n: u64,
}

impl RhoRing for Ring64 {
    type E = u64;
    fn elem(&self, x: u64) -> u64 {
        x % self.n
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        super::prime::mul_mod64(*a, *b, self.n)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        (s % self.n as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.n - (b - a)
        }
    }
    fn gcd_n(&self, a: &u64) -> BigUint {
        BigUint::from(a.gcd(&self.n))
    }
}

const LO64: u128 = u64::MAX as u128;

fn mul_64(a: u64, b: u64) -> u128 {
    a as u128 * b as u128
}

fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a1, a0) = ((a >> 64) as u64, a as u64);
    let (b1, b0) = ((b >> 64) as u64, b as u64);
    let p00 = mul_64(a0, b0);
    let p01 = mul_64(a0, b1);
    let p10 = mul_64(a1, b0);
    let p11 = mul_64(a1, b1);
    let mid = (p00 >> 64) + (p01 & LO64) + (p10 & LO64);
    let lo = (p00 & LO64) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Montgomery arithmetic modulo an odd `n < 2¹²⁷` with `R = 2¹²⁸`.
pub(crate) struct Mont128 {
    n: u128,
    neg_inv: u128,
    r2: u128,
}

impl Mont128 {
    pub(crate) fn new(n: u128) -> Self {
        assert!(n & 1 == 1 && n >> 127 == 0, "Mont128 needs an odd modulus below 2^127");
        let mut inv = n;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        let r2 = ((BigUint::one() << 256u32) % n).to_u128().expect("reduced below n");
        Mont128 {
            n,
            neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.neg_inv);
        let (mh, ml) = mul_wide(m, self.n);
        let (_, carry) = lo.overflowing_add(ml);
        let t = hi + mh + carry as u128;
        if t >= self.n {
            t - self.n
        } else {
            t
        }
    }

    pub(crate) fn to_mont(&self, x: u128) -> u128 {
        let (hi, lo) = mul_wide(x % self.n, self.r2);
        self.redc(hi, lo)
    }

    #[cfg(test)]
    fn from_mont(&self, x: u128) -> u128 {
        self.redc(0, x)
    }
}

impl RhoRing for Mont128 {
    type E = u128;
    fn elem(&self, x: u64) -> u128 {
        self.to_mont(x as u128)
    }
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        let (hi, lo) = mul_wide(*a, *b);
        self.redc(hi, lo)
    }
    fn add(&self, a: &u128, b: &u128) -> u128 {
        let s = a + b;
        if s >= self.n {
            s - self.n
        } else {
            s
        }
    }
    fn sub(&self, a: &u128, b: &u128) -> u128 {
        // Branch-free: the sign of x − y is a coin flip inside rho.
        let (d, borrow) = a.overflowing_sub(*b);
        d.wrapping_add(self.n & (borrow as u128).wrapping_neg())
    }
    fn gcd_n(&self, a: &u128) -> BigUint {
        BigUint::from(a.gcd(&self.n))
    }
}

pub(crate) struct RingBig {
    n: BigUint,
}

impl RhoRing for RingBig {
    type E = BigUint;
    fn elem(&self, x: u64) -> BigUint {
        BigUint::from(x) % &self.n
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b % &self.n
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.n {
            s - &self.n
        } else {
            s
        }
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.n - (b - a)
        }
    }
    fn gcd_n(&self, a: &BigUint) -> BigUint {
        a.gcd(&self.n)
    }
}

/// Outcome of a rho search.
pub(crate) enum RhoOutcome {
    Factor(BigUint),
    TimedOut,
}

/// Steps between gcds and deadline checks.
const BATCH: u64 = 1024;

fn brent<R: RhoRing, G: Rng + ?Sized>(
    ring: &R,
    n: &BigUint,
    rng: &mut G,
    deadline: Instant,
) -> RhoOutcome {
    loop {
        let c = ring.elem(rng.gen_range(1..u64::MAX));
        let mut y = ring.elem(rng.gen::<u64>());
        let f = |v: &R::E| ring.add(&ring.mul(v, v), &c);
        let mut q = ring.elem(1);
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut r: u64 = 1;
        while g.is_one() {
            x = y.clone();
            for i in 0..r {
                y = f(&y);
                if i % BATCH == BATCH - 1 && Instant::now() >= deadline {
                    return RhoOutcome::TimedOut;
                }
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = f(&y);
                    q = ring.mul(&q, &ring.sub(&x, &y));
                }
                g = ring.gcd_n(&q);
                k += BATCH;
                if Instant::now() >= deadline {
                    return RhoOutcome::TimedOut;
                }
            }
            r *= 2;
        }
        if &g == n {
            // The batch overshot; replay it one step at a time.
            loop {
                ys = f(&ys);
                g = ring.gcd_n(&ring.sub(&x, &ys));
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n && !g.is_zero() {
            return RhoOutcome::Factor(g);
        }
        if Instant::now() >= deadline {
            return RhoOutcome::TimedOut;
        }
        // Cycle closed without splitting n: restart with a fresh polynomial.
    }
}

/// Find a nontrivial divisor of the odd composite `n`.
pub(crate) fn find_divisor<G: Rng + ?Sized>(n: &BigUint, rng: &mut G, deadline: Instant) -> RhoOutcome {
    debug_assert!(n.is_odd());
    if let Some(small) = n.to_u64() {
        brent(&Ring64 { n: small }, n, rng, deadline)
    } else if n.bits() < 127 {
        let m = Mont128::new(n.to_u128().expect("fewer than 127 bits"));
        brent(&m, n, rng, deadline)
    } else {
        brent(&RingBig { n: n.clone() }, n, rng, deadline)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::time::Duration;

    #[test]
    fn montgomery_matches_bigint() {
        let n: u128 = (1u128 << 126) - 137;
        let m = Mont128::new(n);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let a = rng.gen::<u128>() % n;
            let b = rng.gen::<u128>() % n;
            let want = (BigUint::from(a) * BigUint::from(b) % n).to_u128().unwrap();
            let got = m.from_mont(m.mul(&m.to_mont(a), &m.to_mont(b)));
            assert_eq!(got, want);
        }
    }

    #[test]
    fn splits_semiprimes_in_each_ring() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let deadline = Instant::now() + Duration::from_secs(30);
        let cases: [(u128, u128); 3] = [
            (1_000_003, 1_000_033),
            (4_294_967_311, 1_099_511_627_791),
            (1_152_921_504_606_847_009, 1_000_000_007),
        ];
        for (p, q) in cases {
            let n = BigUint::from(p) * BigUint::from(q);
            match find_divisor(&n, &mut rng, deadline) {
                RhoOutcome::Factor(d) => assert!(d == BigUint::from(p) || d == BigUint::from(q)),
                RhoOutcome::TimedOut => panic!("timed out on {n}"),
            }
        }
        // > 127 bits: arbitrary-precision ring.
        let big = BigUint::from(1_000_003u64) * ((BigUint::one() << 127u32) - 1u8);
        match find_divisor(&big, &mut rng, deadline) {
            RhoOutcome::Factor(d) => assert!(d == BigUint::from(1_000_003u64) || d == (BigUint::one() << 127u32) - 1u8),
            RhoOutcome::TimedOut => panic!("timed out"),
        }
    }
}
