use num_bigint::BigUint;
use num_traits::One;
use pi_forge::fixedpoint::{change_magnifier, isqrt, isqrt_signed, rescale_mantissa, Magnifier, Ulp};
use pi_forge::FixedPointError;
use proptest::prelude::*;

fn big() -> impl Strategy<Value = BigUint> {
    prop::collection::vec(any::<u32>(), 0..24).prop_map(BigUint::new)
}

fn magnifier() -> impl Strategy<Value = Magnifier> {
    prop_oneof![
        (10u64..400).prop_map(|k| Magnifier::power_of_two(k).unwrap()),
        (4u32..80).prop_map(|e| Magnifier::power(10, e).unwrap()),
        (1001u64..u64::MAX).prop_map(|v| Magnifier::new(v.into()).unwrap()),
    ]
}

proptest! {
    #[test]
    fn isqrt_is_the_floor_root(n in big()) {
        let r = isqrt(&n);
        prop_assert!(&r * &r <= n);
        prop_assert!(n < (&r + 1u32) * (&r + 1u32));
    }

    #[test]
    fn isqrt_of_squares(r in big()) {
        let sq = &r * &r;
        prop_assert_eq!(isqrt(&sq), r.clone());
        if r > BigUint::one() {
            prop_assert_eq!(isqrt(&(sq - 1u32)), r - 1u32);
        }
    }

    #[test]
    fn one_sided_windows(m in magnifier(), x in big(), y in big()) {
        let mv = m.value().clone();
        let (fx, fy) = (m.real(x.clone()), m.real(&y + 1u32));
        let y = y + 1u32;
        let p = m.mul(&fx, &fy).unwrap().into_mantissa();
        prop_assert!(&p * &mv <= &x * &y && &x * &y < (&p + 1u32) * &mv);
        let d = m.div(&fx, &fy).unwrap().into_mantissa();
        prop_assert!(&d * &y <= &x * &mv && &x * &mv < (&d + 1u32) * &y);
        let s = m.sqrt(&fx).unwrap().into_mantissa();
        prop_assert!(&s * &s <= &x * &mv && &x * &mv < (&s + 1u32) * (&s + 1u32));
    }

    #[test]
    fn power_of_two_path_is_bit_identical(k in 10u64..600, x in big(), y in big()) {
        let fast = Magnifier::power_of_two(k).unwrap();
        let slow = fast.without_fast_path();
        prop_assert_eq!(slow.log2(), None);
        let y = y + 1u32;
        let f = |m: &Magnifier| {
            let (a, b) = (m.real(x.clone()), m.real(y.clone()));
            (m.mul(&a, &b).unwrap(), m.div(&a, &b).unwrap(), m.sqrt(&a).unwrap())
        };
        let (a, b) = (f(&fast), f(&slow));
        prop_assert_eq!(a.0.mantissa(), b.0.mantissa());
        prop_assert_eq!(a.1.mantissa(), b.1.mantissa());
        prop_assert_eq!(a.2.mantissa(), b.2.mantissa());
    }

    #[test]
    fn add_sub_scale_are_exact(m in magnifier(), x in big(), y in big(), s in 0u64..1000) {
        let (fx, fy) = (m.real(x.clone()), m.real(y.clone()));
        let sum = fx.checked_add(&fy).unwrap();
        prop_assert_eq!(sum.mantissa(), &(&x + &y));
        prop_assert_eq!(sum.checked_sub(&fy).unwrap(), fx.clone());
        prop_assert_eq!(fx.scale(s).into_mantissa(), &x * s);
        if x < y {
            prop_assert_eq!(fx.checked_sub(&fy).unwrap_err(), FixedPointError::Underflow);
        }
    }

    #[test]
    fn change_magnifier_window(m1 in magnifier(), shrink in 1u32..1000, x in big()) {
        let to = m1.value() / (shrink as u64 + 1);
        prop_assume!(to > BigUint::from(1000u32));
        let m2 = Magnifier::new(to.clone()).unwrap();
        let y = change_magnifier(&m1.real(x.clone()), &m2).unwrap().into_mantissa();
        // y/m2 <= x/m1 < (y + 1)/m2
        prop_assert!(&y * m1.value() <= &x * &to);
        prop_assert!(&x * &to < (&y + 1u32) * m1.value());
        prop_assert_eq!(rescale_mantissa(&x, &m1, &to).unwrap(), y);
    }

    #[test]
    fn ulp_rescale_rounds_up(count in 0u64..1_000_000, k in 20u64..80, e in 4u32..20) {
        let from = Magnifier::power_of_two(k).unwrap();
        let to = Magnifier::power(10, e).unwrap();
        prop_assume!(to.value() < from.value());
        let r = Ulp::from(count).rescaled(&from, &to);
        // r >= count * to / from
        prop_assert!(r.count() * from.value() >= BigUint::from(count) * to.value());
    }
}

#[test]
fn refuses_upscale_and_negative_roots() {
    let m = Magnifier::power(10, 5).unwrap();
    let big = Magnifier::power(10, 6).unwrap();
    assert!(change_magnifier(&m.one(), &big).is_err());
    assert!(change_magnifier(&m.one(), &m).is_err());
    assert!(isqrt_signed(&(-1).into()).is_err());
    assert_eq!(isqrt_signed(&99.into()).unwrap(), BigUint::from(9u32));
}

#[test]
fn magnifier_floor() {
    assert!(Magnifier::new(1000u32.into()).is_err());
    assert!(Magnifier::new(1001u32.into()).is_ok());
    assert!(Magnifier::power_of_two(9).is_err());
    assert_eq!(Magnifier::power_of_two(10).unwrap().two().mantissa(), &BigUint::from(2048u32));
}

#[test]
fn mixed_magnifiers_are_rejected() {
    let a = Magnifier::power_of_two(20).unwrap();
    let b = Magnifier::power_of_two(21).unwrap();
    assert_eq!(a.mul(&a.one(), &b.one()).unwrap_err(), FixedPointError::MagnifierMismatch);
    assert!(a.one().checked_add(&b.one()).is_err());
}
