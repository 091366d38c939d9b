use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ss3_core::fermat_curve::{self as fc, CurvePoint};
use ss3_core::field_tower::make_field;
use ss3_core::strata::{self, A1Case, StratumLabel, StratumPoint};

#[test]
fn point_counts_match_closed_form() {
    for (p, i) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2)] {
        let (_, pts) = fc::enumerate_points(p, i).unwrap();
        assert_eq!(pts.len() as i128, fc::count_points_closed_form(p, i), "p={p} i={i}");
    }
}

#[test]
fn fp2_points_are_rank_deficient() {
    for p in [2, 3] {
        let (ctx, pts) = fc::enumerate_points(p, 3).unwrap();
        for t in &pts {
            // errors on disagreement between degree and rank
            fc::is_fp2_point(&ctx, t).unwrap();
        }
    }
}

#[test]
fn end_algebra_on_degree_three_points() {
    let (ctx, pts) = fc::enumerate_points(2, 3).unwrap();
    for t in pts.iter().filter(|t| t.degree == 3) {
        assert_eq!(fc::end_t(&ctx, t).unwrap().dimension, 3);
        // p³ + 1 unitary elements in End(t)
        assert_eq!(fc::end_t_unitary(&ctx, t).unwrap().len(), 9);
    }
}

fn sample(p: u64, m: u32, n: usize, seed: u64) -> (ss3_core::field_tower::FieldCtx, Vec<CurvePoint>) {
    let ctx = make_field(p, m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n).map(|_| fc::random_point_of_degree(&ctx, m, &mut rng)).collect();
    (ctx, pts)
}

#[test]
fn w_relations_and_eigenvalue_commutation() {
    for (p, m) in [(2, 4), (3, 4), (5, 3)] {
        let (ctx, pts) = sample(p, m, 25, 11);
        let k = *ctx.fp2();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for t in &pts {
            let psi = strata::PsiT::new(&ctx, t).unwrap();
            assert!(strata::w_relations_hold(&ctx, &psi, t));
            let coeffs: Vec<_> = (0..6).map(|_| k.from_index(rng.gen_range(0..k.size()))).collect();
            let s = strata::symmetric_from_coeffs(&coeffs);
            let base = psi.apply(&ctx, &s).unwrap();
            for (a, alpha) in fc::end_t_unitary(&ctx, t).unwrap() {
                assert_eq!(strata::psi_t_a(&ctx, &psi, &s, &a), ctx.mul(&alpha, &base));
            }
        }
    }
}

#[test]
fn p3_degree_three_points_have_d_three() {
    let (ctx, pts) = fc::enumerate_points(3, 3).unwrap();
    let c0: Vec<_> = pts.iter().filter(|t| t.degree == 3).collect();
    assert_eq!(c0.len(), 864);
    for t in c0 {
        let d = strata::d_invariant(&ctx, t).unwrap();
        assert_eq!(d.value(), 3);
        assert!(strata::in_delta(&ctx, t));
    }
}

#[test]
fn p3_degree_four_samples_have_d_four() {
    let (ctx, pts) = sample(3, 4, 50, 2);
    for t in &pts {
        assert_eq!(strata::d_invariant(&ctx, t).unwrap().value(), 4);
        assert!(strata::in_delta(&ctx, t));
    }
}

#[test]
fn delta_agrees_with_monomial_span() {
    for (p, m) in [(3, 6), (5, 3), (2, 6)] {
        let (ctx, pts) = sample(p, m, 30, 7);
        for t in &pts {
            let span = strata::d_span(&ctx, t).unwrap();
            assert_eq!(strata::in_delta(&ctx, t), span <= 5, "p={p} span={span}");
        }
    }
}

#[test]
fn classification_is_legal_and_consistent() {
    for (p, m) in [(2, 4), (3, 4), (3, 6)] {
        let ctx = make_field(p, m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(p * 100 + m as u64);
        for _ in 0..20 {
            let t = fc::random_point(&ctx, &mut rng);
            let r = ctx.elem_from_index(rng.gen_range(0..ctx.order()));
            let x = StratumPoint::new(&ctx, t, [ctx.one(), r]).unwrap();
            let c = strata::classify_stratum(&ctx, &x).unwrap();
            assert!(c.label.is_legal(p as u32), "{}", c.label);
            if let StratumLabel::A1 { d, case } = c.label {
                assert_eq!(Some(d), c.d);
                assert_eq!(case != A1Case::NotInD, strata::in_divisor_d(&ctx, &x).unwrap());
            }
        }
    }
}
