//! Cross-module invariants over random parameters.

use proptest::prelude::*;
use rug::Integer;

use relpow_core::absindex::{alpha_for, char_poly, conjugate_resultant, Alpha0, OrderElement};
use relpow_core::forms::{thue_lhs, QuarticParams};
use relpow_core::oracle::{intersection_poly, u_poly, uprime_poly};
use relpow_core::{QuadInt, RingSpec};

fn ring_d() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![1u64, 2, 3, 5, 7, 11])
}

fn element(r: &RingSpec, a: i64, b: i64) -> QuadInt {
    r.ab(a, b)
}

fn admissible(c: &QuadInt) -> bool {
    let r = c.ring();
    !(c.is_zero() || *c == r.int(2) || *c == r.int(-2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn xi_char_poly_is_the_quartic(d in ring_d(), a in -20i64..=20, b in -20i64..=20) {
        let r = RingSpec::new(d).unwrap();
        let c = element(&r, a, b);
        prop_assume!(admissible(&c));
        let params = QuarticParams::new(c).unwrap();
        let g = char_poly(&OrderElement::xi_power(&r, 1), &params).unwrap();
        prop_assert_eq!(g, params.poly());
    }

    #[test]
    fn resultant_is_shift_invariant(d in prop::sample::select(vec![1u64, 2, 5]),
                                    a in -8i64..=8, b in -8i64..=8, k in -5i64..=5) {
        let r = RingSpec::new(d).unwrap();
        let c = element(&r, a, b);
        prop_assume!(admissible(&c));
        let params = QuarticParams::new(c).unwrap();
        let alpha = alpha_for(&params, 1, &r.one(), Alpha0::Xi);
        let shifted = alpha.add(&OrderElement::constant(r.int(k)));
        prop_assert_eq!(
            conjugate_resultant(&alpha, &params).unwrap(),
            conjugate_resultant(&shifted, &params).unwrap()
        );
    }

    #[test]
    fn sequence_polys_agree_at_integers(m in 0u64..12, t in -6i64..=6) {
        // Degree-k polynomials with leading coefficient 2^k.
        let r = RingSpec::new(1).unwrap();
        let c = r.int(t);
        let u = u_poly(m);
        prop_assert_eq!(u.degree(), Some(m as usize));
        prop_assert_eq!(u.leading(), Integer::from(1) << (m as u32));
        let diff = intersection_poly(m, m, 1);
        prop_assert_eq!(diff.eval(&c), &u.eval(&c) - &uprime_poly(m).eval(&c));
    }

    #[test]
    fn thue_lhs_is_homogeneous(d in ring_d(), a in -6i64..=6, p in -4i64..=4, q in -4i64..=4) {
        let r = RingSpec::new(d).unwrap();
        let c = r.int(a);
        prop_assume!(admissible(&c));
        let params = QuarticParams::new(c).unwrap();
        let (p, q) = (r.int(p), r.int(q));
        let base = thue_lhs(&p, &q, &params);
        for unit in r.units() {
            let scaled = thue_lhs(&(&unit * &p), &(&unit * &q), &params);
            prop_assert_eq!(scaled, &unit.pow(4) * &base);
        }
    }
}
