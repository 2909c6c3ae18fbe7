use longzeta::oracle::{raw_equal_in_t, raw_reduce, render_back, RawLaurentPQ};
use longzeta::{Laurent, QPowerRelation, Ring, RingT, ZetaPolynomial};
use proptest::prelude::*;

fn ring_t() -> impl Strategy<Value = RingT> {
    (
        prop::collection::vec((-4i32..=4, -6i64..=6), 0..4),
        -5i64..=5,
    )
        .prop_map(|(terms, eps)| RingT::new(Laurent::from_terms(terms), eps))
}

fn zeta_poly() -> impl Strategy<Value = ZetaPolynomial> {
    prop::collection::vec((-3i32..=3, ring_t()), 0..4).prop_map(Laurent::from_terms)
}

fn raw() -> impl Strategy<Value = RawLaurentPQ> {
    prop::collection::vec((-3i32..=3, -3i32..=3, -4i64..=4), 0..5).prop_map(|terms| {
        terms
            .into_iter()
            .fold(RawLaurentPQ::zero(), |acc, (a, b, c)| {
                &acc + &RawLaurentPQ::monomial(a, b, c)
            })
    })
}

proptest! {
    #[test]
    fn multiplication_is_commutative_and_associative(x in ring_t(), y in ring_t(), z in ring_t()) {
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn multiplication_distributes(x in ring_t(), y in ring_t(), z in ring_t()) {
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
    }

    #[test]
    fn normal_form_agrees_with_oracle(x in raw(), y in raw()) {
        let (tx, ty) = (raw_reduce(&x), raw_reduce(&y));
        prop_assert!(raw_equal_in_t(&render_back(&(&tx * &ty)), &(&x * &y)));
        prop_assert!(raw_equal_in_t(&render_back(&(&tx - &ty)), &(&x - &y)));
        prop_assert_eq!(raw_reduce(&render_back(&tx)), tx);
    }

    #[test]
    fn epsilon_is_nilpotent_and_absorbs_q(x in ring_t(), m in -6i32..=6) {
        let eps = RingT::epsilon();
        prop_assert!((&eps * &eps).is_zero());
        prop_assert_eq!(&RingT::q_pow(m) * &eps, eps.clone());
        prop_assert_eq!(x.is_zero_divisor(), !x.is_zero() && (&x * &eps).is_zero());
    }

    #[test]
    fn rendering_parses_back(x in ring_t(), z in zeta_poly()) {
        prop_assert_eq!(x.to_string().parse::<RingT>().unwrap(), x);
        prop_assert_eq!(z.to_string().parse::<ZetaPolynomial>().unwrap(), z);
    }

    #[test]
    fn q_shifts_are_detected(z in zeta_poly(), r in -5i32..=5) {
        let shifted = z.mul_q_power(r);
        match z.equal_up_to_q_power(&shifted) {
            QPowerRelation::Equal(found) => prop_assert_eq!(z.mul_q_power(found), shifted),
            QPowerRelation::NotEqual => prop_assert!(false, "shift by q^{} not found", r),
        }
    }

    #[test]
    fn laurent_product_matches_naive(x in zeta_poly(), y in zeta_poly()) {
        let mut naive = ZetaPolynomial::zero();
        for (a, u) in x.terms() {
            for (b, v) in y.terms() {
                naive = naive.add_ref(&Laurent::monomial(a + b, u * v));
            }
        }
        prop_assert_eq!(x.mul_ref(&y), naive);
    }
}

#[test]
fn paper_example_identity() {
    let q_minus_p = RingT::q_pow(1) - RingT::p_pow(1);
    for m in [0, 1, 2, 5, 9] {
        let lhs = RingT::q_pow(m) * (RingT::q_pow(1) * RingT::p_pow(-1) - RingT::one());
        assert_eq!(lhs, q_minus_p);
    }
    assert!(q_minus_p.is_zero_divisor());
    assert!(!RingT::zero().is_zero_divisor());
    assert!(!(RingT::p_pow(1) + RingT::one()).is_zero_divisor());
}
