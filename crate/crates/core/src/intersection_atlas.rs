//! Points of `C ∩ Δ`: degree census, the error term `ε` and explicit points
//! of degree `p+1` and `2(p+1)` lying on conics defined over `F_{p²}`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::fermat_curve::{self as fc, CurveError, CurvePoint};
use crate::field_tower::{make_field, make_field_bounded, FieldCtx, FieldElem, FieldError, Fp2, DEFAULT_MAX_M};
use crate::strata::in_delta;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AtlasError {
    #[error("p = {0} is not supported here")]
    UnsupportedPrime(u32),
    #[error("no suitable generator found")]
    GeneratorSearchFailed,
    #[error("witness search failed: {0}")]
    SearchFailed(String),
    #[error("witness check failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Coefficients of `Σ c·X^e` in the order `X₁², X₂², X₃², X₁X₂, X₁X₃, X₂X₃`.
pub type Conic = [Fp2; 6];

pub fn conic_value(ctx: &FieldCtx, q: &Conic, t: &[FieldElem; 3]) -> FieldElem {
    let [a, b, c] = t;
    let mons = [ctx.square(a), ctx.square(b), ctx.square(c), ctx.mul(a, b), ctx.mul(a, c), ctx.mul(b, c)];
    q.iter().zip(mons.iter()).fold(ctx.zero(), |acc, (k, m)| ctx.add(&acc, &ctx.mul(&ctx.embed(*k), m)))
}

/// A Frobenius orbit of a point of `C`, keyed by its least member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPoint {
    pub representative: CurvePoint,
    pub degree: u32,
    pub in_delta: bool,
    pub conic: Option<Conic>,
}

fn key(ctx: &FieldCtx, c: &[FieldElem; 3]) -> [u128; 3] {
    c.map(|x| ctx.index_of(&x))
}

/// The members `t^{(p^{2k})}` for `k < deg t`.
pub fn orbit(ctx: &FieldCtx, t: &CurvePoint) -> Vec<[FieldElem; 3]> {
    (0..t.degree as i64).map(|k| t.coords.map(|c| ctx.frob(&c, 2 * k))).collect()
}

pub fn orbit_representative(ctx: &FieldCtx, t: &CurvePoint) -> CurvePoint {
    let best = orbit(ctx, t).into_iter().min_by_key(|c| key(ctx, c)).expect("nonempty orbit");
    CurvePoint { coords: best, degree: t.degree }
}

impl OrbitPoint {
    pub fn new(ctx: &FieldCtx, t: &CurvePoint) -> Self {
        OrbitPoint { representative: orbit_representative(ctx, t), degree: t.degree, in_delta: in_delta(ctx, t), conic: None }
    }

    /// The orbit has exactly `degree` members and the conic, if any, vanishes on it.
    pub fn check(&self, ctx: &FieldCtx) -> bool {
        let members: BTreeSet<[u128; 3]> = orbit(ctx, &self.representative).iter().map(|c| key(ctx, c)).collect();
        let conic_ok = self.conic.map_or(true, |q| conic_value(ctx, &q, &self.representative.coords).is_zero());
        members.len() == self.degree as usize && conic_ok
    }
}

fn mobius(n: u32) -> i64 {
    let f = crate::nt::factor(n as u64);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `|C_d|` for `d = 1..=d_max`, the number of geometric points of exact degree
/// `d` over `F_{p²}`, by Möbius inversion of enumerated point counts.
pub fn census_degrees(p: u64, d_max: u32) -> Result<BTreeMap<u32, i128>, AtlasError> {
    let mut totals: BTreeMap<u32, i128> = BTreeMap::new();
    for e in 1..=d_max {
        let ctx = make_field_bounded(p, e, DEFAULT_MAX_M)?;
        totals.insert(e, fc::enumerate_in(&ctx).len() as i128);
    }
    Ok((1..=d_max)
        .map(|d| {
            let c = crate::nt::divisors(d).into_iter().map(|e| mobius(d / e) as i128 * totals[&e]).sum();
            (d, c)
        })
        .collect())
}

/// `|C_1|, |C_3|, |C_4|, |C_5|` in closed form.
pub fn census_closed_form(p: u64) -> [(u32, i128); 4] {
    let p = p as i128;
    [
        (1, p.pow(3) + 1),
        (3, p.pow(6) + p.pow(5) - p.pow(4) - p.pow(3)),
        (4, p.pow(8) - p.pow(6) + p.pow(5) - p.pow(3)),
        (5, p.pow(10) + p.pow(7) - p.pow(6) - p.pow(3)),
    ]
}

/// `p¹¹ + 2p⁸ + 2p⁶ + 3p⁵ + p⁴ + 2p³ + p² + 2p + 2`.
pub fn rhs_without_epsilon(p: u64) -> i128 {
    let p = p as i128;
    p.pow(11) + 2 * p.pow(8) + 2 * p.pow(6) + 3 * p.pow(5) + p.pow(4) + 2 * p.pow(3) + p * p + 2 * p + 2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRow {
    pub degree: u32,
    /// Geometric points of this exact degree.
    pub points: u64,
    pub in_delta: u64,
    pub orbits_in_delta: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionCensus {
    pub p: u32,
    pub per_degree: Vec<DegreeRow>,
    pub count: u64,
    pub rhs_without_epsilon: i128,
    pub epsilon: i128,
    /// One entry per Frobenius orbit in `C ∩ Δ`.
    #[serde(skip)]
    pub orbits: Vec<OrbitPoint>,
}

impl IntersectionCensus {
    pub fn contains(&self, ctx_degree: u32, rep: &CurvePoint) -> bool {
        self.orbits.iter().any(|o| o.degree == ctx_degree && o.representative == *rep)
    }
}

/// Scans points of exact degree `d` in `F_{p^{2d}}` for `d = 1..=d_max`.
pub fn degree_census(p: u64, d_max: u32) -> Result<IntersectionCensus, AtlasError> {
    let mut per_degree = Vec::new();
    let mut orbits = Vec::new();
    for d in 1..=d_max {
        let ctx = make_field_bounded(p, d, DEFAULT_MAX_M)?;
        let pts: Vec<CurvePoint> = fc::enumerate_in(&ctx).into_iter().filter(|t| t.degree == d).collect();
        let hits: Vec<&CurvePoint> = pts.iter().filter(|t| in_delta(&ctx, t)).collect();
        let mut seen = BTreeSet::new();
        for t in &hits {
            let rep = orbit_representative(&ctx, t);
            if seen.insert(key(&ctx, &rep.coords)) {
                orbits.push(OrbitPoint { representative: rep, degree: d, in_delta: true, conic: None });
            }
        }
        per_degree.push(DegreeRow {
            degree: d,
            points: pts.len() as u64,
            in_delta: hits.len() as u64,
            orbits_in_delta: seen.len() as u64,
        });
    }
    let count = per_degree.iter().map(|r| r.in_delta).sum();
    let rhs = rhs_without_epsilon(p);
    Ok(IntersectionCensus {
        p: p as u32,
        per_degree,
        count,
        rhs_without_epsilon: rhs,
        epsilon: rhs - count as i128,
        orbits,
    })
}

/// The full census of `C ∩ Δ` at `p = 2`, where every point has degree at most 6.
pub fn intersection_census(p: u64) -> Result<IntersectionCensus, AtlasError> {
    if p != 2 {
        return Err(AtlasError::UnsupportedPrime(p as u32));
    }
    degree_census(p, 2 * (p as u32 + 1))
}

/// Order of `a` in `K^×/(K^×)^n` where `K` is the subfield of size `k_size`.
pub fn kummer_order(ctx: &FieldCtx, a: &FieldElem, n: u64, k_size: u128) -> u64 {
    let g = num_integer::gcd(n as u128, k_size - 1);
    let e = (k_size - 1) / g;
    (1..=n).find(|&j| ctx.pow(&ctx.pow(a, j as u128), e) == ctx.one()).expect("a^n is an n-th power")
}

/// Kummer: with `μ_n ⊆ K` and `a` of order `n` modulo `n`-th powers, `[K(a^{1/n}) : K] = n`.
pub fn kummer_predicate(ctx: &FieldCtx, a: &FieldElem, n: u64, k_size: u128) -> bool {
    (k_size - 1) % n as u128 == 0 && kummer_order(ctx, a, n, k_size) == n
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub p: u32,
    /// Working field `F_{p^{2m}}`.
    pub m: u32,
    pub point: OrbitPoint,
    pub conic: Conic,
    pub checks: BTreeMap<String, bool>,
}

impl Witness {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.values().all(|&b| b)
    }
}

fn finish(
    ctx: &FieldCtx,
    coords: [FieldElem; 3],
    conic: Conic,
    expected: u32,
    mut checks: BTreeMap<String, bool>,
) -> Result<Witness, AtlasError> {
    let t = fc::on_curve(ctx, &coords)?.ok_or_else(|| AtlasError::CheckFailed("point is not on C".into()))?;
    checks.insert("on_curve".into(), true);
    checks.insert("conic_vanishes".into(), conic_value(ctx, &conic, &t.coords).is_zero());
    checks.insert("degree".into(), t.degree == expected);
    let mut point = OrbitPoint::new(ctx, &t);
    point.conic = Some(conic);
    // The conic is defined over F_{p²}, so it vanishes on the whole orbit.
    checks.insert("orbit".into(), point.check(ctx));
    checks.insert("in_delta".into(), point.in_delta);
    let w = Witness { p: ctx.p(), m: ctx.m(), point, conic, checks };
    if !w.all_checks_pass() {
        return Err(AtlasError::CheckFailed(format!("{:?}", w.checks)));
    }
    Ok(w)
}

/// A point of degree `p+1` on the conic `X₁X₂ = u X₃²`.
pub fn witness_degree_p_plus_1(p: u64) -> Result<Witness, AtlasError> {
    if !matches!(p, 2 | 3 | 5) {
        return Err(AtlasError::UnsupportedPrime(p as u32));
    }
    let ctx = make_field(p, p as u32 + 1)?;
    let k = *ctx.fp2();
    let q2 = (p * p) as u128;
    let (u1, a) = k
        .elements()
        .into_iter()
        .filter(|x| !x.is_zero())
        .map(|x| ctx.embed(x))
        .filter(|x| ctx.multiplicative_order(x) == q2 - 1)
        .find_map(|x| {
            let s = ctx.add(&ctx.frob(&x, 1), &x);
            (!s.is_zero()).then(|| (x, ctx.neg(&s)))
        })
        .ok_or(AtlasError::GeneratorSearchFailed)?;
    let u = ctx.div(&u1, &a).expect("a ≠ 0");
    let alpha = *ctx.nonzero_nth_roots(&u, p + 1)?.first().ok_or_else(|| AtlasError::SearchFailed("no root".into()))?;
    let coords = [alpha, ctx.div(&u, &alpha).expect("α ≠ 0"), ctx.one()];
    let uf = ctx.to_fp2(&u).expect("u ∈ F_{p²}");
    let conic = [Fp2::ZERO, Fp2::ZERO, k.neg(uf), Fp2::ONE, Fp2::ZERO, Fp2::ZERO];
    let mut checks = BTreeMap::new();
    checks.insert("a_in_fp".into(), ctx.frob(&a, 1) == a);
    checks.insert("u_trace_minus_one".into(), ctx.add(&ctx.frob(&u, 1), &u) == ctx.from_int(-1));
    checks.insert("kummer".into(), kummer_predicate(&ctx, &u, p + 1, q2));
    finish(&ctx, coords, conic, p as u32 + 1, checks)
}

/// The quadratic `w² + b w + c` of `w` over the subfield of size `q`, as `(b, c)`.
fn min_poly_over(ctx: &FieldCtx, w: &FieldElem, frob_exp: i64) -> (FieldElem, FieldElem) {
    let wq = ctx.frob(w, frob_exp);
    (ctx.neg(&ctx.add(w, &wq)), ctx.mul(w, &wq))
}

/// A point of degree `2(p+1)` on a degenerate conic.
pub fn witness_degree_2p_plus_2(p: u64) -> Result<Witness, AtlasError> {
    match p {
        2 => akio_p2(),
        3 => akio_odd(3),
        _ => Err(AtlasError::UnsupportedPrime(p as u32)),
    }
}

fn akio_p2() -> Result<Witness, AtlasError> {
    let ctx = make_field(2, 6)?;
    let zeta = ctx
        .elements()
        .find(|x| !x.is_zero() && ctx.multiplicative_order(x) == 5)
        .ok_or(AtlasError::GeneratorSearchFailed)?;
    let one_zeta = ctx.add(&ctx.one(), &zeta);
    let y = ctx.nonzero_nth_roots(&zeta, 3)?[0];
    let z = ctx.nonzero_nth_roots(&one_zeta, 3)?[0];
    let coords = [ctx.one(), y, z];
    // y ∈ F_16 \ F_4 satisfies y² + b y + c = 0 over F_4.
    let (b, c) = min_poly_over(&ctx, &y, 2);
    let (bf, cf) = (ctx.to_fp2(&b).expect("in F_4"), ctx.to_fp2(&c).expect("in F_4"));
    let conic = [cf, Fp2::ONE, Fp2::ZERO, bf, Fp2::ZERO, Fp2::ZERO];
    let mut checks = BTreeMap::new();
    checks.insert("one_plus_zeta_generates".into(), ctx.multiplicative_order(&one_zeta) == 15);
    checks.insert("kummer".into(), kummer_predicate(&ctx, &one_zeta, 3, 16));
    checks.insert("y_not_in_fp2".into(), !ctx.in_fp2(&y));
    finish(&ctx, coords, conic, 6, checks)
}

/// Sizes of the search sets: `|Z|`, `|Y|`, `|X|` and `|X̄|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSets {
    pub z: u64,
    pub y: u64,
    pub x: u64,
    pub x_bar: u64,
}

fn akio_odd(p: u64) -> Result<Witness, AtlasError> {
    let m = 2 * (p as u32 + 1);
    let ctx = make_field(p, m)?;
    let q = ctx.order();
    let (p2, p4) = ((p * p) as u128, (p * p * p * p) as u128);
    let h = ctx.pow(&ctx.primitive_element(), (q - 1) / (p4 - 1));
    let f4: Vec<FieldElem> = (0..(p4 - 1)).scan(ctx.one(), |acc, _| {
        let cur = *acc;
        *acc = ctx.mul(acc, &h);
        Some(cur)
    })
    .collect();
    let e = p as u128 + 1;
    let zset: BTreeSet<[u128; 1]> = f4
        .iter()
        .filter(|x| ctx.frob(x, 2) == **x)
        .map(|x| [ctx.index_of(&ctx.pow(x, e))])
        .collect();
    let yset: BTreeSet<[u128; 1]> =
        f4.iter().map(|x| [ctx.index_of(&ctx.pow(x, e))]).filter(|k| !zset.contains(k)).collect();
    // f(ξ) generates C_{2(p+1)} iff ξ is a non-square in F_{p⁴}.
    let minus_one = ctx.from_int(-1);
    let in_x = |xi: &FieldElem| !xi.is_zero() && ctx.pow(xi, (p4 - 1) / 2) == minus_one;
    let sets = SearchSets {
        z: zset.len() as u64,
        y: yset.len() as u64,
        x: f4.iter().filter(|x| in_x(x)).count() as u64,
        x_bar: 0,
    };
    let sets = SearchSets { x_bar: sets.x / (p - 1), ..sets };
    let from_idx = |k: &[u128; 1]| ctx.elem_from_index(k[0]);
    let (eta, zeta, xi) = yset
        .iter()
        .flat_map(|y| zset.iter().map(move |z| (from_idx(y), from_idx(z))))
        .map(|(y, z)| (y, z, ctx.add(&y, &z)))
        .find(|(_, _, xi)| in_x(xi))
        .ok_or_else(|| AtlasError::SearchFailed("no η + ζ = ξ".into()))?;
    let z = *ctx
        .nonzero_nth_roots(&zeta, p + 1)?
        .iter()
        .find(|r| ctx.frob(r, 2) == **r)
        .ok_or_else(|| AtlasError::SearchFailed("no root of ζ in F_{p²}".into()))?;
    let y = *ctx
        .nonzero_nth_roots(&eta, p + 1)?
        .iter()
        .find(|r| ctx.frob(r, 4) == **r && ctx.frob(r, 2) != **r)
        .ok_or_else(|| AtlasError::SearchFailed("no root of η in F_{p⁴} \\ F_{p²}".into()))?;
    let x = ctx.nonzero_nth_roots(&ctx.neg(&xi), p + 1)?[0];
    let w = ctx.div(&y, &z).expect("z ≠ 0");
    let (b, c) = min_poly_over(&ctx, &w, 2);
    let conic = [
        Fp2::ZERO,
        Fp2::ONE,
        ctx.to_fp2(&c).expect("in F_{p²}"),
        Fp2::ZERO,
        Fp2::ZERO,
        ctx.to_fp2(&b).expect("in F_{p²}"),
    ];
    let mut checks = BTreeMap::new();
    checks.insert("set_sizes".into(), sets.z == p - 1 && sets.y == (p * p) * (p - 1));
    checks.insert(
        "x_bar_exceeds_p2_plus_p".into(),
        sets.x_bar as u128 == (p2 + 1) * crate::nt::totient(2 * (p + 1)) as u128 / 2 && sets.x_bar > p * p + p,
    );
    checks.insert("xi_not_in_fp2".into(), ctx.frob(&xi, 2) != xi);
    checks.insert("kummer".into(), kummer_predicate(&ctx, &ctx.neg(&xi), p + 1, p4));
    finish(&ctx, [x, y, z], conic, 2 * (p as u32 + 1), checks)
}

/// The search-set sizes for the odd-prime construction.
pub fn akio_search_sets(p: u64) -> Result<SearchSets, AtlasError> {
    if p != 3 {
        return Err(AtlasError::UnsupportedPrime(p as u32));
    }
    let x_bar = (p * p + 1) * crate::nt::totient(2 * (p + 1)) / 2;
    Ok(SearchSets { z: p - 1, y: p * p * (p - 1), x: x_bar * (p - 1), x_bar })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_p2_closed_forms() {
        let c = census_degrees(2, 5).unwrap();
        for (d, v) in census_closed_form(2) {
            assert_eq!(c[&d], v, "degree {d}");
        }
        assert_eq!(c[&2], 0);
        assert_eq!(rhs_without_epsilon(2), 2826);
    }

    #[test]
    fn ml_witness_small() {
        let w = witness_degree_p_plus_1(2).unwrap();
        assert_eq!(w.point.degree, 3);
        let w = witness_degree_p_plus_1(3).unwrap();
        assert_eq!(w.point.degree, 4);
    }

    #[test]
    fn akio_p2_witness() {
        let w = witness_degree_2p_plus_2(2).unwrap();
        assert_eq!(w.point.degree, 6);
        assert!(w.all_checks_pass());
    }
}
