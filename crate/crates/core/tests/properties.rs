use fanocoeff_core::oracle;
use fanocoeff_core::verify::laurent_remainder;
use fanocoeff_core::{
    b_from_d, d_from_b, render_chern_expansion, ChernExpansion, Coefficients, Method, Rational,
    TripleIndex,
};
use proptest::prelude::*;

fn idx(i: usize, j: usize, k: usize) -> TripleIndex {
    TripleIndex::new(i, j, k).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn methods_agree_anywhere(i in 1usize..9, j in 0usize..7, extra in 0usize..12) {
        let k = 1 + extra.min(i + j + 2);
        let mut e = Coefficients::new();
        let at = idx(i, j, k);
        let rec = e.b(at, Method::Recurrence).unwrap();
        prop_assert_eq!(&rec, &e.b(at, Method::Genfunc).unwrap());
        prop_assert_eq!(&rec, &e.b(at, Method::ClosedForm).unwrap());
        if k > i + j {
            prop_assert!(rec.is_zero());
        }
    }

    #[test]
    fn restricted_recurrence_matches(i in 1usize..7, j in 1usize..6, k_off in 0usize..12) {
        let k = 1 + k_off % (i + j);
        let want = oracle::restricted_recurrence(i, j, k).unwrap();
        prop_assert_eq!(Coefficients::new().b(idx(i, j, k), Method::ClosedForm).unwrap(), want);
    }

    #[test]
    fn positivity_for_small_j(i in 1usize..60, j in 1usize..3, k_off in 0usize..200) {
        let k = 1 + k_off % (i + j);
        prop_assert!(Coefficients::new().b(idx(i, j, k), Method::ClosedForm).unwrap().is_positive());
    }

    #[test]
    fn b_and_d_convert(i in 1usize..20, j in 0usize..20, k in 1usize..40, p in -50i64..50, q in 1i64..50) {
        let at = idx(i, j, k);
        let v = Rational::from_ratio(p, q).unwrap();
        prop_assert_eq!(b_from_d(at, &d_from_b(at, &v)), v.clone());
        prop_assert_eq!(d_from_b(at, &b_from_d(at, &v)), v);
    }

    #[test]
    fn expansion_shape(i in 1usize..8, j in 1usize..8) {
        let mut e = Coefficients::new();
        let exp = render_chern_expansion(&mut e, i, j, Method::ClosedForm).unwrap();
        prop_assert_eq!(exp.terms.len() + 1, i + j + 1);
        for t in &exp.terms {
            let (order, power) = if t.k < i { (t.k, j) } else { (i, i + j - t.k) };
            prop_assert_eq!((t.operator_order, t.c1_power), (order, power));
        }
        prop_assert_eq!(ChernExpansion::from_latex(&exp.to_latex()).unwrap(), exp);
    }

    #[test]
    fn laurent_divisibility(k in 1usize..5, depth in 1usize..6) {
        let i = k + depth;
        let rem = laurent_remainder(&mut Coefficients::new(), k, i, depth + 3, Method::ClosedForm).unwrap();
        prop_assert!(rem.valuation().is_none_or(|v| v >= depth));
    }
}

#[test]
fn table_records_each_method_once_consistently() {
    let mut e = Coefficients::new();
    for method in Method::ALL {
        e.b(idx(4, 2, 3), method).unwrap();
    }
    assert_eq!(e.table().len(), 1);
    assert_eq!(e.table().get(&idx(4, 2, 3)).unwrap().value, Rational::one());
}
