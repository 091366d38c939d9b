use std::sync::OnceLock;

use proptest::prelude::*;
use ss3_core::fermat_curve::{self as fc, UnitaryGroup};
use ss3_core::field_tower::{make_field, FieldCtx, Fp2Field};
use ss3_core::group_oracle::{PiMatrix, QuatOrder};
use ss3_core::linalg_ff::M3;
use ss3_core::mass_formulas as mf;
use ss3_core::strata::{symmetric_from_coeffs, StratumLabel};

fn fields() -> &'static [FieldCtx] {
    static F: OnceLock<Vec<FieldCtx>> = OnceLock::new();
    F.get_or_init(|| vec![make_field(2, 4).unwrap(), make_field(3, 3).unwrap(), make_field(5, 2).unwrap(), make_field(7, 1).unwrap()])
}

fn unitary2() -> &'static UnitaryGroup {
    static U: OnceLock<UnitaryGroup> = OnceLock::new();
    U.get_or_init(|| fc::unitary_group(2).unwrap())
}

fn g_m2_element(k: &Fp2Field, ai: usize, sc: &[usize]) -> PiMatrix {
    let u = unitary2();
    let a: M3 = u.elements[ai % u.elements.len()];
    let coeffs: Vec<_> = sc.iter().map(|&i| k.from_index(i % k.size())).collect();
    PiMatrix { a, b: fc::m3_mul(k, &symmetric_from_coeffs(&coeffs), &a) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_ring_laws(f in 0usize..4, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let ctx = &fields()[f];
        let q = ctx.order();
        let (a, b, c) = [a, b, c].map(|v| ctx.elem_from_index(v as u128 % q)).into();
        prop_assert_eq!(ctx.mul(&a, &ctx.add(&b, &c)), ctx.add(&ctx.mul(&a, &b), &ctx.mul(&a, &c)));
        prop_assert_eq!(ctx.mul(&ctx.mul(&a, &b), &c), ctx.mul(&a, &ctx.mul(&b, &c)));
        if let Some(inv) = ctx.inv(&a) {
            prop_assert_eq!(ctx.mul(&a, &inv), ctx.one());
        } else {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn frobenius_is_a_field_automorphism(f in 0usize..4, a in any::<u64>(), b in any::<u64>(), e in -8i64..8) {
        let ctx = &fields()[f];
        let q = ctx.order();
        let (a, b) = (ctx.elem_from_index(a as u128 % q), ctx.elem_from_index(b as u128 % q));
        prop_assert_eq!(ctx.frob(&ctx.add(&a, &b), e), ctx.add(&ctx.frob(&a, e), &ctx.frob(&b, e)));
        prop_assert_eq!(ctx.frob(&ctx.mul(&a, &b), e), ctx.mul(&ctx.frob(&a, e), &ctx.frob(&b, e)));
        prop_assert_eq!(ctx.frob(&ctx.frob(&a, e), -e), a);
        prop_assert_eq!(ctx.frob(&a, ctx.two_m() as i64), a);
    }

    #[test]
    fn nth_roots_are_roots(f in 0usize..4, a in any::<u64>(), n in 1u64..12) {
        let ctx = &fields()[f];
        let a = ctx.elem_from_index(a as u128 % ctx.order());
        let roots = ctx.nth_roots(&a, n).unwrap();
        for r in &roots {
            prop_assert_eq!(ctx.pow(r, n as u128), a);
        }
        prop_assert!(roots.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn fp2_embedding_round_trips(f in 0usize..4, i in any::<usize>()) {
        let ctx = &fields()[f];
        let k = ctx.fp2();
        let x = k.from_index(i % k.size());
        prop_assert_eq!(ctx.to_fp2(&ctx.embed(x)), Some(x));
        prop_assert_eq!(ctx.embed(k.conj(x)), ctx.frob(&ctx.embed(x), 1));
    }

    #[test]
    fn g_m2_is_closed_and_star_inverts(
        a1 in any::<usize>(), s1 in proptest::collection::vec(any::<usize>(), 6),
        a2 in any::<usize>(), s2 in proptest::collection::vec(any::<usize>(), 6),
    ) {
        let k = Fp2Field::new(2).unwrap();
        let g = g_m2_element(&k, a1, &s1);
        let h = g_m2_element(&k, a2, &s2);
        prop_assert!(g.in_g_m2(&k));
        let gh = g.mul(&k, &h);
        prop_assert!(gh.in_g_m2(&k));
        prop_assert_eq!(g.star(&k).mul(&k, &g), PiMatrix::identity());
        prop_assert_eq!(gh.star(&k), h.star(&k).mul(&k, &g.star(&k)));
    }

    #[test]
    fn quaternion_norm_is_multiplicative(o in 0usize..2, x in proptest::array::uniform4(-6i64..6), y in proptest::array::uniform4(-6i64..6)) {
        let order = [QuatOrder::O2, QuatOrder::O3][o];
        // force membership by doubling
        let (x, y) = (x.map(|c| 2 * c), y.map(|c| 2 * c));
        let xy = order.mul(&x, &y);
        prop_assert!(order.contains(&xy));
        prop_assert_eq!(order.norm(&xy), order.norm(&x) * order.norm(&y));
        prop_assert_eq!(QuatOrder::conj(&xy), order.mul(&QuatOrder::conj(&y), &QuatOrder::conj(&x)));
    }

    #[test]
    fn reduction_is_multiplicative(o in 0usize..2, x in proptest::array::uniform4(-4i64..4), y in proptest::array::uniform4(-4i64..4)) {
        let order = [QuatOrder::O2, QuatOrder::O3][o];
        let red = ss3_core::group_oracle::reduction_mod_p_embedding(order).unwrap();
        let k = Fp2Field::new(order.p()).unwrap();
        let lift = |c: [i64; 4]| order.from_basis_coords(&c);
        let (x, y) = (lift(x), lift(y));
        let ((a1, b1), (a2, b2)) = (red.map(&x), red.map(&y));
        let expect = (k.mul(a1, a2), k.add(k.mul(b1, a2), k.mul(k.conj(a1), b2)));
        prop_assert_eq!(red.map(&order.mul(&x, &y)), expect);
    }

    #[test]
    fn masses_factor_through_the_index(pi in 0usize..6, li in any::<usize>()) {
        let p = [2u32, 3, 5, 7, 11, 13][pi];
        let labels = StratumLabel::legal(p);
        let label = labels[li % labels.len()];
        let mass = mf::mass_stratum_g3(p, &label).unwrap();
        prop_assert!(mass.is_positive());
        let base = mf::base_mass(p, &label);
        let idx = mf::local_index_g3(p, &label).unwrap();
        prop_assert_eq!(mass.0, base.0 * num_rational::BigRational::from_integer(idx));
    }
}
