use cuspdiff::qexp::{
    delta_series, eigenform, eta24_series, mul, mul_schoolbook, pow, QSeries, SUPPORTED_WEIGHTS,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn series() -> impl Strategy<Value = QSeries> {
    prop::collection::vec(any::<i64>(), 0..40).prop_map(|c| QSeries::from_i64(&c, "s"))
}

/// Direct truncated convolution.
fn convolve(a: &QSeries, b: &QSeries, n: usize) -> Vec<BigInt> {
    (0..n)
        .map(|k| (0..=k).map(|i| a.coeff(i) * b.coeff(k - i)).sum())
        .collect()
}

proptest! {
    #[test]
    fn mul_is_convolution(a in series(), b in series(), n in 0usize..60) {
        let got = mul(&a, &b, n).into_coeffs();
        prop_assert_eq!(&got, &convolve(&a, &b, n));
        prop_assert_eq!(got, mul_schoolbook(&a, &b, n).into_coeffs());
    }

    #[test]
    fn mul_commutes_and_associates(a in series(), b in series(), c in series(), n in 0usize..50) {
        prop_assert_eq!(mul(&a, &b, n), mul(&b, &a, n));
        let left = mul(&mul(&a, &b, n), &c, n);
        let right = mul(&a, &mul(&b, &c, n), n);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn pow_is_iterated_mul(a in series(), e in 0u32..6, n in 1usize..40) {
        let mut want = QSeries::one(n);
        for _ in 0..e {
            want = mul(&want, &a, n);
        }
        prop_assert_eq!(pow(&a, e, n).into_coeffs(), want.into_coeffs());
    }
}

#[test]
fn delta_two_ways_to_five_thousand() {
    let n = 5000;
    assert_eq!(delta_series(n).unwrap().coeffs(), eta24_series(n).unwrap().coeffs());
}

#[test]
fn hecke_square_identity_every_weight() {
    let n = 4000;
    for k in SUPPORTED_WEIGHTS {
        let f = eigenform(k, n).unwrap();
        for p in cuspdiff::arith::primes_up_to(63) {
            let p = p as usize;
            let ap = f.coefficient(p);
            assert_eq!(f.coefficient(p * p), &ap * &ap - f.det_power(p as u64), "k={k} p={p}");
        }
        f.check_hecke_recursion(n).unwrap();
        f.check_multiplicativity(n).unwrap();
        f.check_deligne(n as u64 - 1).unwrap();
    }
}
