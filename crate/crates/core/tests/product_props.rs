use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use torusmix_core::rational::half_pow;
use torusmix_core::{torus_shift, EndoMap, FiniteSupportSeq, RationalAngle, TorusPoint, TorusShift};

fn angle() -> impl Strategy<Value = RationalAngle> {
    (1i64..40).prop_flat_map(|q| (0..q).prop_map(move |p| RationalAngle::new(p, q).unwrap()))
}

fn point(dim: usize) -> impl Strategy<Value = TorusPoint> {
    proptest::collection::vec(angle(), dim).prop_map(|c| TorusPoint::new(c).unwrap())
}

fn shift_2d() -> TorusShift {
    let spec = r#"{"type":"matrix","A":[[2,1],[0,3]]}"#;
    let map = serde_json::from_str::<torusmix_core::MapSpec>(spec)
        .unwrap()
        .build()
        .unwrap();
    torus_shift(map).unwrap()
}

fn seq(max_len: usize) -> impl Strategy<Value = FiniteSupportSeq<TorusPoint>> {
    proptest::collection::vec(point(2), 0..=max_len).prop_map(|v| shift_2d().seq(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn phi_is_a_homomorphism(g in seq(6), h in seq(6)) {
        let x = shift_2d();
        prop_assert_eq!(x.phi(&x.mul(&g, &h)), x.mul(&x.phi(&g), &x.phi(&h)));
    }

    #[test]
    fn phi_undoes_psi(g in seq(8)) {
        let x = shift_2d();
        prop_assert_eq!(x.phi(&x.psi(&g)), g.clone());
        prop_assert_eq!(x.phi_pow(&x.psi_pow(&g, 5), 5), g);
    }

    #[test]
    fn closed_form_matches_iteration(g in seq(6), extra in 0u64..7) {
        let x = shift_2d();
        let k = g.support_len() as u64 - 1 + extra;
        prop_assert_eq!(x.phi_iterate_closed_form(&g, k).unwrap(), x.phi_pow(&g, k));
    }

    #[test]
    fn shrink_bound_holds(g in seq(6), extra in 0u64..7) {
        let x = shift_2d();
        let k = g.support_len() as u64 - 1 + extra;
        let s = x.shrink_bound_check(&g, k).unwrap();
        prop_assert!(s.within_bound && s.within_tight_bound);
    }

    #[test]
    fn c_tilde_is_annihilated_and_close(g in seq(6), extra in 0u64..5) {
        let x = shift_2d();
        let n = g.support_len() as u64 - 1 + extra;
        let c = x.c_tilde_element(&g, n).unwrap();
        prop_assert!(x.is_identity(&x.phi_pow(&c, n)));
        prop_assert!(x.metric(&c, &g) <= half_pow(n));
    }

    #[test]
    fn psi_contracts(g in seq(6), k in 0u64..10) {
        let x = shift_2d();
        let e = x.identity();
        prop_assert!(x.metric(&x.psi_pow(&g, k), &e) <= x.metric(&g, &e) * half_pow(k));
    }

    #[test]
    fn metric_laws(a in seq(5), b in seq(5), c in seq(5)) {
        let x = shift_2d();
        prop_assert_eq!(x.metric(&a, &b), x.metric(&b, &a));
        prop_assert_eq!(x.metric(&a, &b) == BigRational::from_integer(BigInt::from(0)), a == b);
        prop_assert!(x.metric(&a, &c) <= x.metric(&a, &b) + x.metric(&b, &c));
        prop_assert!(x.metric(&a, &b) <= BigRational::from_integer(BigInt::from(1)));
    }

    #[test]
    fn coordinate_zero_projection(p in point(2)) {
        let x = shift_2d();
        let g = x.seq(vec![p.clone()]).unwrap();
        prop_assert_eq!(x.project0(&x.phi(&g)), x.base().map().apply(&p).unwrap());
    }

    #[test]
    fn group_laws(a in seq(5), b in seq(5), c in seq(5)) {
        let x = shift_2d();
        prop_assert_eq!(x.mul(&a, &b), x.mul(&b, &a));
        prop_assert_eq!(x.mul(&x.mul(&a, &b), &c), x.mul(&a, &x.mul(&b, &c)));
        prop_assert!(x.is_identity(&x.mul(&a, &x.inv(&a))));
    }

    #[test]
    fn sequences_round_trip_through_json(g in seq(5)) {
        let text = serde_json::to_string(&g).unwrap();
        let back: FiniteSupportSeq<TorusPoint> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(shift_2d().canonical(back).unwrap(), g);
    }
}

#[test]
fn psi_phi_asymmetry() {
    let x = torus_shift(EndoMap::circle_power(2)).unwrap();
    let g = x
        .seq(vec![
            TorusPoint::parse(&["1/3"]).unwrap(),
            TorusPoint::parse(&["0"]).unwrap(),
        ])
        .unwrap();
    let back = x.psi(&x.phi(&g));
    assert_eq!(serde_json::to_string(&back).unwrap(), r#"[["0/1"],["2/3"]]"#);
    assert_ne!(back, g);
}
