use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ss3_core::fermat_curve as fc;
use ss3_core::field_tower::{make_field, FieldCtx};
use ss3_core::group_oracle::{self as go, QuatOrder};
use ss3_core::mass_formulas as mf;
use ss3_core::strata::{classify_stratum, A1Case, StratumLabel, StratumPoint};

fn points_by_case(ctx: &FieldCtx, deg: u32, want: usize, seed: u64) -> Vec<(StratumPoint, u32, A1Case)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<(StratumPoint, u32, A1Case)> = Vec::new();
    for _ in 0..400 {
        let t = fc::random_point_of_degree(ctx, deg, &mut rng);
        let r = ctx.elem_from_index(rng.gen_range(0..ctx.order()));
        let x = StratumPoint::new(ctx, t, [ctx.one(), r]).unwrap();
        if let StratumLabel::A1 { d, case } = classify_stratum(ctx, &x).unwrap().label {
            if found.iter().filter(|f| f.2 == case).count() < want {
                found.push((x, d, case));
            }
        }
    }
    found
}

#[test]
fn g_m_orders_and_indices_at_two() {
    let u = fc::unitary_group(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let census = go::enumerate_g_m2(&u, 200, &mut rng).unwrap();
    assert_eq!(census.order, 2_654_208);
    assert_eq!(census.closure_failures, 0);
    for (m, deg) in [(3, 3), (4, 4)] {
        let ctx = make_field(2, m).unwrap();
        let pts = points_by_case(&ctx, deg, 3, m as u64);
        assert!(pts.len() >= 3);
        for (x, d, case) in pts {
            let gm = go::enumerate_g_m(&ctx, &x).unwrap();
            let f = mf::formula_group_orders(2, d, case);
            assert_eq!(num_bigint::BigInt::from(gm.order()), f.g_m);
            let label = StratumLabel::A1 { d, case };
            let index = mf::local_index_g3(2, &label).unwrap();
            assert_eq!(num_bigint::BigInt::from(census.order / gm.order() as u128), index);
        }
    }
}

#[test]
fn g_m2_fibre_count() {
    for p in [2u32, 3] {
        let u = fc::unitary_group(p as u64).unwrap();
        let n = go::g_m2_order_by_fibres(&u).unwrap();
        assert_eq!(num_bigint::BigInt::from(n), mf::g_m2_order(p));
    }
}

#[test]
fn quaternion_unitary_groups() {
    let u2 = go::unitary_perm_group(QuatOrder::O2, 3).unwrap();
    assert_eq!(u2.order(), 82944);
    let u3 = go::unitary_perm_group(QuatOrder::O3, 3).unwrap();
    assert_eq!(u3.order(), 10368);
    let red = go::reduction_mod_p_embedding(QuatOrder::O2).unwrap();
    let ker = go::reduction_kernel(&red, &u2).unwrap();
    assert_eq!(ker.group_type().name, "C2^3");
}

#[test]
fn automorphism_groups_at_two() {
    let red = go::reduction_mod_p_embedding(QuatOrder::O2).unwrap();
    let u3o = go::unitary_perm_group(QuatOrder::O2, 3).unwrap();
    let ctx = make_field(2, 4).unwrap();
    for (x, _, case) in points_by_case(&ctx, 4, 3, 9) {
        let aut = go::aut_polarised(&ctx, &x, &red, &u3o).unwrap();
        let expected = if case == A1Case::NotInD { "C2^3" } else { "C2^3 x C3" };
        assert_eq!(aut.group_type().name, expected);
        assert_eq!(u3o.order() % aut.order(), 0);
    }
}

#[test]
fn membership_criteria_agree_on_random_elements() {
    let ctx = make_field(2, 4).unwrap();
    let k = *ctx.fp2();
    let u = fc::unitary_group(2).unwrap();
    let sym = go::symmetric_matrices(&k);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (x, _, _) in points_by_case(&ctx, 4, 2, 3) {
        let oracle = go::MembershipOracle::new(&ctx, &x).unwrap();
        for _ in 0..300 {
            let a = u.elements[rng.gen_range(0..u.elements.len())];
            let s = sym[rng.gen_range(0..sym.len())];
            let g = go::PiMatrix { a, b: fc::m3_mul(&k, &s, &a) };
            oracle.check(&g).unwrap();
        }
    }
}

#[test]
fn wrong_a_number_is_rejected() {
    let ctx = make_field(2, 3).unwrap();
    let (_, pts) = fc::enumerate_points(2, 3).unwrap();
    let t = *pts.iter().find(|t| t.degree == 3).unwrap();
    let x = StratumPoint::new(&ctx, t, [ctx.zero(), ctx.one()]).unwrap();
    assert_eq!(go::enumerate_g_m(&ctx, &x).unwrap_err(), go::GroupError::WrongANumber);
}
