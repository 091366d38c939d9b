//! Deterministic fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ss3_core::fermat_curve as fc;
use ss3_core::field_tower::{make_field, FieldCtx, FieldElem};
use ss3_core::strata::{classify_stratum, A1Case, StratumLabel, StratumPoint};

pub fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed)
}

/// `n` random pairs of nonzero elements of `F_{p^{2m}}`.
pub fn element_pairs(ctx: &FieldCtx, n: usize) -> Vec<(FieldElem, FieldElem)> {
    let mut r = rng();
    let mut draw = || ctx.elem_from_index(r.gen_range(1..ctx.order()));
    (0..n).map(|_| (draw(), draw())).collect()
}

/// An a-number one point over `F_{2^8}` outside the divisor `D`.
pub fn generic_point_p2() -> (FieldCtx, StratumPoint) {
    let ctx = make_field(2, 4).expect("valid field");
    let mut r = rng();
    loop {
        let t = fc::random_point_of_degree(&ctx, 4, &mut r);
        let u2 = ctx.elem_from_index(r.gen_range(0..ctx.order()));
        let x = StratumPoint::new(&ctx, t, [ctx.one(), u2]).expect("nonzero u");
        let label = classify_stratum(&ctx, &x).expect("classifiable").label;
        if matches!(label, StratumLabel::A1 { case: A1Case::NotInD, .. }) {
            return (ctx, x);
        }
    }
}
