//! Segmented sieve of Eratosthenes over odd numbers.

const SEGMENT: u64 = 1 << 15;

fn small_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// All primes `≤ x` in ascending order.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let root = x.isqrt();
    let base = small_primes(root);
    let mut out = vec![2];
    // Sieve the odd numbers in [lo, lo + 2·SEGMENT); slot i stands for lo + 2i.
    let mut lo = 3u64;
    let mut marks = vec![false; SEGMENT as usize];
    while lo <= x {
        let hi = (lo + 2 * SEGMENT - 1).min(x);
        let len = ((hi - lo) / 2 + 1) as usize;
        marks[..len].fill(false);
        for &p in base.iter().skip(1) {
            if p * p > hi {
                break;
            }
            // first odd multiple of p that is ≥ max(p², lo)
            let mut start = (p * p).max(lo.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut idx = ((start - lo) / 2) as usize;
            while idx < len {
                marks[idx] = true;
                idx += p as usize;
            }
        }
        out.extend(
            marks[..len]
                .iter()
                .enumerate()
                .filter(|(_, &m)| !m)
                .map(|(i, _)| lo + 2 * i as u64),
        );
        lo = hi + 1 + (hi % 2 == 1) as u64;
    }
    out
}
