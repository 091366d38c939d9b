//! The Fermat curve `X₁^{p+1} + X₂^{p+1} + X₃^{p+1} = 0`, its points, the
//! endomorphism spaces `End(t)` and the finite unitary group `U₃(F_p)`.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field_tower::{make_field, FieldCtx, FieldElem, FieldError, Fp2, Fp2Field};
use crate::linalg_ff::{self, det_and_inverse, rank_over_subfield, Mat, M3};
use crate::nt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurveError {
    #[error("all coordinates are zero")]
    AllZero,
    #[error("point is defined over F_(p^2); expected a point of C^0")]
    NotInC0,
    #[error("cross-check failed: {0}")]
    CrossCheckFailure(String),
    #[error("p = {0} is too large for full enumeration")]
    TooLarge(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A normalised projective point of the curve (last nonzero coordinate is 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurvePoint {
    pub coords: [FieldElem; 3],
    /// `[F_{p^2}(t) : F_{p^2}]`.
    pub degree: u32,
}

/// Scales so that the last nonzero coordinate is 1.
pub fn normalize(ctx: &FieldCtx, coords: &[FieldElem; 3]) -> Option<[FieldElem; 3]> {
    let k = (0..3).rev().find(|&i| !coords[i].is_zero())?;
    let inv = ctx.inv(&coords[k]).unwrap();
    Some(coords.map(|c| ctx.mul(&c, &inv)))
}

/// Degree over `F_{p^2}` of the field generated by the normalised coordinates.
pub fn point_degree(ctx: &FieldCtx, coords: &[FieldElem; 3]) -> u32 {
    coords
        .iter()
        .map(|c| ctx.element_degree(c))
        .fold(1u32, |acc, d| acc / num_integer::gcd(acc, d) * d)
}

pub fn curve_value(ctx: &FieldCtx, coords: &[FieldElem; 3]) -> FieldElem {
    let e = ctx.p() as u128 + 1;
    coords.iter().fold(ctx.zero(), |acc, c| ctx.add(&acc, &ctx.pow(c, e)))
}

pub fn on_curve(ctx: &FieldCtx, coords: &[FieldElem; 3]) -> Result<Option<CurvePoint>, CurveError> {
    for c in coords {
        ctx.check(c)?;
    }
    let norm = normalize(ctx, coords).ok_or(CurveError::AllZero)?;
    if !curve_value(ctx, &norm).is_zero() {
        return Ok(None);
    }
    Ok(Some(CurvePoint { coords: norm, degree: point_degree(ctx, &norm) }))
}

/// All points of `C` over the working field, enumerated fibre by fibre.
pub fn enumerate_in(ctx: &FieldCtx) -> Vec<CurvePoint> {
    let e = ctx.p() as u64 + 1;
    let minus_one = ctx.from_int(-1);
    let mut points: Vec<CurvePoint> = (0..ctx.order())
        .into_par_iter()
        .flat_map_iter(|i| {
            let x1 = ctx.elem_from_index(i);
            let rhs = ctx.sub(&minus_one, &ctx.pow(&x1, e as u128));
            let roots = ctx.nth_roots(&rhs, e).expect("positive exponent");
            roots
                .into_iter()
                .map(move |x2| {
                    let c = [x1, x2, ctx.one()];
                    CurvePoint { coords: c, degree: point_degree(ctx, &c) }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    // line at infinity: X₃ = 0, X₂ = 1
    for x1 in ctx.nonzero_nth_roots(&minus_one, e).expect("nonzero") {
        let c = [x1, ctx.one(), ctx.zero()];
        points.push(CurvePoint { coords: c, degree: point_degree(ctx, &c) });
    }
    points
}

/// `C(F_{p^{2i}})`, together with the field it lives in.
pub fn enumerate_points(p: u64, i: u32) -> Result<(FieldCtx, Vec<CurvePoint>), CurveError> {
    let ctx = make_field(p, i)?;
    let pts = enumerate_in(&ctx);
    Ok((ctx, pts))
}

/// Closed-form `|C(F_{p^{2i}})|`.
pub fn count_points_closed_form(p: u64, i: u32) -> i128 {
    let p = p as i128;
    let (a, b, c) = (p.pow(2 * i), p.pow(i + 2), p.pow(i + 1));
    if i % 2 == 1 {
        a + b - c + 1
    } else {
        a - b + c + 1
    }
}

/// `deg t = 1`, cross-checked against `F_{p^2}`-dependence of the coordinates.
pub fn is_fp2_point(ctx: &FieldCtx, t: &CurvePoint) -> Result<bool, CurveError> {
    let by_degree = t.degree == 1;
    let rank = rank_over_subfield(ctx, &t.coords).map_err(|e| CurveError::CrossCheckFailure(e.to_string()))?.rank;
    if (rank < 3) != by_degree {
        return Err(CurveError::CrossCheckFailure(format!(
            "degree {} but F_(p^2)-rank {}",
            t.degree, rank
        )));
    }
    Ok(by_degree)
}

/// A random point of `C` over the working field.
pub fn random_point<R: Rng + ?Sized>(ctx: &FieldCtx, rng: &mut R) -> CurvePoint {
    let e = ctx.p() as u64 + 1;
    let minus_one = ctx.from_int(-1);
    loop {
        let x1 = ctx.elem_from_index(rng.gen_range(0..ctx.order()));
        let rhs = ctx.sub(&minus_one, &ctx.pow(&x1, e as u128));
        let roots = ctx.nth_roots(&rhs, e).expect("positive exponent");
        if roots.is_empty() {
            continue;
        }
        let x2 = roots[rng.gen_range(0..roots.len())];
        let c = [x1, x2, ctx.one()];
        return CurvePoint { coords: c, degree: point_degree(ctx, &c) };
    }
}

/// A random point of exact degree `d` (which must divide `m`).
pub fn random_point_of_degree<R: Rng + ?Sized>(ctx: &FieldCtx, d: u32, rng: &mut R) -> CurvePoint {
    assert!(ctx.m() % d == 0, "degree must divide m");
    loop {
        let t = random_point(ctx, rng);
        if t.degree == d {
            return t;
        }
    }
}

// ---------- 3×3 matrices over F_{p^2} ----------

pub fn m3_identity() -> M3 {
    let mut a = [[Fp2::ZERO; 3]; 3];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = Fp2::ONE;
    }
    a
}

pub fn m3_zero() -> M3 {
    [[Fp2::ZERO; 3]; 3]
}

#[inline]
pub fn m3_mul(k: &Fp2Field, a: &M3, b: &M3) -> M3 {
    let mut out = [[Fp2::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = Fp2::ZERO;
            for l in 0..3 {
                s = k.add(s, k.mul(a[i][l], b[l][j]));
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn m3_add(k: &Fp2Field, a: &M3, b: &M3) -> M3 {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = k.add(a[i][j], b[i][j]);
        }
    }
    out
}

pub fn m3_scale(k: &Fp2Field, c: Fp2, a: &M3) -> M3 {
    a.map(|row| row.map(|x| k.mul(c, x)))
}

/// Entrywise `p`-power Frobenius `A ↦ A^{(p)}`.
pub fn m3_conj(k: &Fp2Field, a: &M3) -> M3 {
    a.map(|row| row.map(|x| k.conj(x)))
}

pub fn m3_transpose(a: &M3) -> M3 {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn m3_is_symmetric(a: &M3) -> bool {
    a[0][1] == a[1][0] && a[0][2] == a[2][0] && a[1][2] == a[2][1]
}

pub fn m3_det(k: &Fp2Field, a: &M3) -> Fp2 {
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
        k.sub(k.mul(a[r1][c1], a[r2][c2]), k.mul(a[r1][c2], a[r2][c1]))
    };
    let t0 = k.mul(a[0][0], minor(1, 2, 1, 2));
    let t1 = k.mul(a[0][1], minor(1, 2, 0, 2));
    let t2 = k.mul(a[0][2], minor(1, 2, 0, 1));
    k.add(k.sub(t0, t1), t2)
}

pub fn m3_inv(k: &Fp2Field, a: &M3) -> Option<M3> {
    let d = k.inv(m3_det(k, a))?;
    let mut out = [[Fp2::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // cofactor C_{ji}
            let (r1, r2) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c1, c2) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = k.sub(k.mul(a[r1][c1], a[r2][c2]), k.mul(a[r1][c2], a[r2][c1]));
            let signed = if (i + j) % 2 == 0 { minor } else { k.neg(minor) };
            out[i][j] = k.mul(signed, d);
        }
    }
    Some(out)
}

/// `A^T A^{(p)} = I`.
pub fn is_unitary(k: &Fp2Field, a: &M3) -> bool {
    m3_mul(k, &m3_transpose(a), &m3_conj(k, a)) == m3_identity()
}

/// `A·v` with `A` over `F_{p^2}` and `v` in the working field.
pub fn m3_apply(ctx: &FieldCtx, a: &M3, v: &[FieldElem; 3]) -> [FieldElem; 3] {
    let mut out = [ctx.zero(); 3];
    for i in 0..3 {
        for j in 0..3 {
            if !a[i][j].is_zero() {
                out[i] = ctx.add(&out[i], &ctx.mul(&ctx.embed(a[i][j]), &v[j]));
            }
        }
    }
    out
}

pub fn m3_to_mat(ctx: &FieldCtx, a: &M3) -> Mat<FieldElem> {
    Mat::from_rows(a.iter().map(|row| row.iter().map(|&x| ctx.embed(x)).collect()).collect())
}

/// `α` with `A·t = α t`, read off the first nonzero coordinate, if `t` is an eigenvector.
pub fn eigenvalue(ctx: &FieldCtx, a: &M3, t: &[FieldElem; 3]) -> Option<FieldElem> {
    let at = m3_apply(ctx, a, t);
    let i = (0..3).find(|&i| !t[i].is_zero())?;
    let alpha = ctx.div(&at[i], &t[i]).unwrap();
    (0..3)
        .all(|j| at[j] == ctx.mul(&alpha, &t[j]))
        .then_some(alpha)
}

// ---------- End(t) ----------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndAlgebra {
    pub dimension: usize,
    pub basis: Vec<M3>,
}

pub fn end_t(ctx: &FieldCtx, t: &CurvePoint) -> Result<EndAlgebra, CurveError> {
    if t.degree == 1 {
        return Err(CurveError::NotInC0);
    }
    assert_ne!(t.degree, 2, "the curve has no points of degree 2");
    let basis = linalg_ff::solve_parallel_condition(ctx, &t.coords)
        .map_err(|e| CurveError::CrossCheckFailure(e.to_string()))?;
    Ok(EndAlgebra { dimension: basis.len(), basis })
}

/// The matrix `(t, t^{(p²)}, t^{(p⁴)}) · diag(α, α^{p²}, α^{p⁴}) · (…)⁻¹`, for
/// `t` of degree 3; entries lie in `F_{p^2}` when `α ∈ F_{p^6}`.
pub fn a_alpha(ctx: &FieldCtx, t: &CurvePoint, alpha: &FieldElem) -> Option<M3> {
    let cols: Vec<Vec<FieldElem>> = (0..3)
        .map(|k| t.coords.iter().map(|c| ctx.frob(c, 2 * k)).collect())
        .collect();
    let tt = Mat::from_cols(&cols);
    let (_, inv) = det_and_inverse(ctx, &tt).ok()?;
    let inv = inv?;
    let mut d = linalg_ff::identity(ctx, 3);
    for k in 0..3 {
        d.set(k, k, ctx.frob(alpha, 2 * k as i64));
    }
    let prod = linalg_ff::mat_mul(ctx, &linalg_ff::mat_mul(ctx, &tt, &d), &inv);
    let mut out = [[Fp2::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = ctx.to_fp2(&prod.get(i, j))?;
        }
    }
    Some(out)
}

/// All `F_{p^2}`-combinations of a basis.
pub fn span_elements(k: &Fp2Field, basis: &[M3]) -> Vec<M3> {
    let mut out = vec![m3_zero()];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * k.size());
        for x in &out {
            for c in k.elements() {
                next.push(m3_add(k, x, &m3_scale(k, c, b)));
            }
        }
        out = next;
    }
    out
}

/// `End(t) ∩ U₃(F_p)` with the eigenvalue of each element on `t`.
pub fn end_t_unitary(ctx: &FieldCtx, t: &CurvePoint) -> Result<Vec<(M3, FieldElem)>, CurveError> {
    let end = end_t(ctx, t)?;
    let k = ctx.fp2();
    let mut out: Vec<(M3, FieldElem)> = span_elements(k, &end.basis)
        .into_par_iter()
        .filter(|a| is_unitary(k, a))
        .map(|a| {
            let alpha = eigenvalue(ctx, &a, &t.coords).expect("End(t) element fixes the line of t");
            (a, alpha)
        })
        .collect();
    out.sort();
    Ok(out)
}

// ---------- U₃(F_p) ----------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitaryGroup {
    pub p: u32,
    pub elements: Vec<M3>,
    pub order: u64,
}

pub fn unitary_order_formula(p: u64) -> u64 {
    p.pow(3) * (p + 1) * (p * p - 1) * (p.pow(3) + 1)
}

fn herm(k: &Fp2Field, x: &[Fp2; 3], y: &[Fp2; 3]) -> Fp2 {
    (0..3).fold(Fp2::ZERO, |acc, i| k.add(acc, k.mul(x[i], k.conj(y[i]))))
}

/// `U₃(F_p)` by orthonormal completion of columns.
pub fn unitary_group(p: u64) -> Result<UnitaryGroup, CurveError> {
    if !nt::is_prime(p) {
        return Err(FieldError::CompositeP(p).into());
    }
    if p >= 5 {
        return Err(CurveError::TooLarge(p as u32));
    }
    let k = Fp2Field::new(p as u32)?;
    let n = k.size();
    let unit_vectors: Vec<[Fp2; 3]> = (0..n * n * n)
        .map(|i| [k.from_index(i % n), k.from_index((i / n) % n), k.from_index(i / (n * n))])
        .filter(|v| herm(&k, v, v) == Fp2::ONE)
        .collect();
    let mut elements: Vec<M3> = unit_vectors
        .par_iter()
        .flat_map_iter(|v1| {
            let mut local = Vec::new();
            for v2 in unit_vectors.iter().filter(|v2| herm(&k, v1, v2).is_zero()) {
                for v3 in unit_vectors
                    .iter()
                    .filter(|v3| herm(&k, v1, v3).is_zero() && herm(&k, v2, v3).is_zero())
                {
                    let mut a = m3_zero();
                    for r in 0..3 {
                        a[r] = [v1[r], v2[r], v3[r]];
                    }
                    local.push(a);
                }
            }
            local
        })
        .collect();
    elements.sort();
    let order = elements.len() as u64;
    let g = UnitaryGroup { p: p as u32, elements, order };
    g.verify(&k)?;
    Ok(g)
}

impl UnitaryGroup {
    /// Unitarity of every element, distinctness, inverses, and strided closure samples.
    pub fn verify(&self, k: &Fp2Field) -> Result<(), CurveError> {
        let set: HashSet<&M3> = self.elements.iter().collect();
        if set.len() != self.elements.len() {
            return Err(CurveError::CrossCheckFailure("duplicate unitary matrices".into()));
        }
        if self.order != unitary_order_formula(self.p as u64) {
            return Err(CurveError::CrossCheckFailure(format!(
                "|U3| = {} but the formula gives {}",
                self.order,
                unitary_order_formula(self.p as u64)
            )));
        }
        let n = self.elements.len();
        for (i, a) in self.elements.iter().enumerate() {
            if !is_unitary(k, a) {
                return Err(CurveError::CrossCheckFailure("non-unitary element".into()));
            }
            let inv = m3_transpose(&m3_conj(k, a));
            if !set.contains(&inv) {
                return Err(CurveError::CrossCheckFailure("missing inverse".into()));
            }
            let b = &self.elements[(i * 7919 + 13) % n];
            if !set.contains(&m3_mul(k, a, b)) {
                return Err(CurveError::CrossCheckFailure("product left the group".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        for (p, i, n) in [(2u64, 1u32, 9usize), (2, 2, 9), (2, 3, 81), (3, 1, 28)] {
            let (_, pts) = enumerate_points(p, i).unwrap();
            assert_eq!(pts.len(), n, "p={p} i={i}");
            assert_eq!(count_points_closed_form(p, i), n as i128);
        }
        assert_eq!(count_points_closed_form(3, 2), 28);
    }

    #[test]
    fn membership() {
        let f = make_field(2, 1).unwrap();
        let w = f.primitive_element();
        assert!(on_curve(&f, &[w, f.zero(), f.one()]).unwrap().is_some());
        assert!(on_curve(&f, &[f.one(), f.zero(), f.zero()]).unwrap().is_none());
        assert_eq!(on_curve(&f, &[f.zero(); 3]), Err(CurveError::AllZero));
    }

    #[test]
    fn unitary_p2() {
        let g = unitary_group(2).unwrap();
        assert_eq!(g.order, 648);
    }

    #[test]
    fn end_dims_p2() {
        let ctx = make_field(2, 3).unwrap();
        for t in enumerate_in(&ctx).iter().filter(|t| t.degree == 3).take(5) {
            let e = end_t(&ctx, t).unwrap();
            assert_eq!(e.dimension, 3);
            assert_eq!(end_t_unitary(&ctx, t).unwrap().len(), 9);
        }
    }
}
