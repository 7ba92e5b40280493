use cuspdiff::richert::{
    bounds, params_main, params_omega_variant, weighted_sum_w, SieveParams, WeightMode,
};
use num_bigint::BigUint;
use proptest::prelude::*;

#[test]
fn families_valid_on_2_to_60() {
    for k in 2..=60 {
        let m = params_main(k).unwrap();
        let v = params_omega_variant(k).unwrap();
        assert!(m.is_valid() && v.is_valid(), "k={k}");
        assert!((m.alpha * m.v - 4.0).abs() < 1e-12, "k={k}: αv = {}", m.alpha * m.v);
        assert!((v.alpha * v.v - 15.0 / 7.0).abs() < 1e-12, "k={k}");
    }
}

#[test]
fn sqrt_log_bound_never_larger() {
    for k in 6..=200 {
        let b = bounds(k).unwrap();
        let sharp = (7.0 * k as f64 + 0.5 + (k as f64).ln().sqrt()).floor() as u64;
        assert_eq!(b.b_omega_sqrtlog, Some(sharp));
        assert!(sharp <= b.b_omega, "k={k}");
    }
    assert_eq!(bounds(5).unwrap().b_omega_sqrtlog, None);
}

const X: f64 = 1e6;

fn params() -> SieveParams {
    // Middle range [X^{1/6}, X^{1/3}) = [10, 100).
    SieveParams::new(0.5, 3.0, 6.0, 0.5)
}

fn items() -> impl Strategy<Value = Vec<(u64, BigUint)>> {
    prop::collection::vec((2u64..10_000, 1u64..1 << 40), 1..30).prop_map(|v| {
        v.into_iter().map(|(p, m)| (p, BigUint::from(m))).collect()
    })
}

fn odd(q: u64) -> bool {
    q % 2 == 1
}

proptest! {
    #[test]
    fn contributions_at_most_one(data in items(), exact in any::<bool>()) {
        let mode = if exact { WeightMode::ExactlyDivides } else { WeightMode::Divides };
        let w = weighted_sum_w(&data, X, &params(), mode, odd).unwrap();
        prop_assert_eq!(w.contributions.len(), data.len());
        for c in &w.contributions {
            prop_assert!(c.value <= 1.0);
            if c.sifted_out {
                prop_assert_eq!(c.value, 0.0);
            }
        }
    }

    #[test]
    fn removing_an_item_subtracts_its_contribution(data in items(), idx in any::<prop::sample::Index>()) {
        let full = weighted_sum_w(&data, X, &params(), WeightMode::Divides, odd).unwrap();
        let i = idx.index(data.len());
        let mut rest = data.clone();
        rest.remove(i);
        let partial = weighted_sum_w(&rest, X, &params(), WeightMode::Divides, odd).unwrap();
        let diff = full.total - partial.total;
        prop_assert!((diff - full.contributions[i].value).abs() < 1e-9);
    }
}
