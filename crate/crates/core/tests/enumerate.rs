//! Matching counts by closed form, backtracking and Kasteleyn determinant.

use dp3_core::enumerate::{count_formula, count_matchings, enumerate_matchings, kasteleyn_count, Method, Mode};
use dp3_core::{build_diamond, Error, Order};
use num_bigint::BigUint;

#[test]
fn three_way_agreement_through_three() {
    let expected = [1u64, 2, 4, 16, 64, 512, 4096];
    for (h, want) in expected.iter().enumerate() {
        let m = Order::from_halves(h as u32);
        let d = build_diamond(m).unwrap();
        let want = BigUint::from(*want);
        assert_eq!(count_formula(m), want);
        let brute = count_matchings(&d).unwrap();
        assert_eq!((brute.count, brute.method), (want.clone(), Method::Backtracking));
        assert_eq!(kasteleyn_count(&d).unwrap().count, want);
    }
}

#[test]
fn kasteleyn_matches_closed_form_through_six() {
    for h in 0..=12 {
        let m = Order::from_halves(h);
        let d = build_diamond(m).unwrap();
        assert_eq!(kasteleyn_count(&d).unwrap().count, count_formula(m), "{m}");
    }
    assert_eq!(count_formula(Order::integer(4)), BigUint::from(1u64 << 20));
}

#[test]
fn small_budget_gives_up() {
    let d = build_diamond(Order::integer(3)).unwrap();
    assert!(matches!(enumerate_matchings(&d, Mode::Count, 10), Err(Error::ResourceLimit(_))));
}
