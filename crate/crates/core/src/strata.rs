//! The `(t, u)` model of the a-number stratification: the matrix `𝕋`, the map
//! `ψ_t`, the invariant `d(t)`, the locus `Δ`, the divisor `𝒟_t` and the
//! stratum classifier.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fermat_curve::{m3_is_symmetric, m3_mul, CurveError, CurvePoint};
use crate::field_tower::{FieldCtx, FieldElem, Fp2};
use crate::linalg_ff::{self, det_and_inverse, rank_over_subfield, subfield_rank, Mat, M3};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StratumError {
    #[error("the matrix T is singular: t is an F_(p^2)-point")]
    SingularT,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("t must lie in C^0")]
    NotInC0,
    #[error("u = (0:1) lies on the section T")]
    OnSectionT,
    #[error("u = (0:0) is not a projective point")]
    ZeroU,
    #[error("cross-check failed: {0}")]
    CrossCheckFailure(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// A point `(t, u)` with `u` normalised to `(1 : u₂)` or `(0 : 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StratumPoint {
    pub t: CurvePoint,
    pub u: [FieldElem; 2],
}

impl StratumPoint {
    pub fn new(ctx: &FieldCtx, t: CurvePoint, u: [FieldElem; 2]) -> Result<Self, StratumError> {
        let u = if !u[0].is_zero() {
            [ctx.one(), ctx.div(&u[1], &u[0]).expect("nonzero")]
        } else if !u[1].is_zero() {
            [ctx.zero(), ctx.one()]
        } else {
            return Err(StratumError::ZeroU);
        };
        Ok(StratumPoint { t, u })
    }

    pub fn on_section(&self) -> bool {
        self.u[0].is_zero()
    }

    /// `u₂ u₁⁻¹`, or `None` on the section.
    pub fn ratio(&self) -> Option<FieldElem> {
        (!self.on_section()).then_some(self.u[1])
    }
}

/// Sub-case of an a-number one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum A1Case {
    /// `u ∉ 𝒟_t`.
    NotInD,
    /// `u ∈ 𝒟_t`, `t ∉ C(F_{p^6})`.
    InDNotF6,
    /// `u ∈ 𝒟_t`, `t ∈ C(F_{p^6})`.
    InDF6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StratumLabel {
    /// Superspecial, including the a = 2 points with `u ∈ ℙ¹(F_{p²})`.
    A3,
    /// a = 2 and `u ∈ ℙ¹(F_{p⁴}) ∖ ℙ¹(F_{p²})`.
    A2F4MinusF2,
    /// a = 2 and `u ∉ ℙ¹(F_{p⁴})`.
    A2Generic,
    A1 { d: u32, case: A1Case },
}

impl StratumLabel {
    pub fn a_number(&self) -> u32 {
        match self {
            StratumLabel::A3 => 3,
            StratumLabel::A2F4MinusF2 | StratumLabel::A2Generic => 2,
            StratumLabel::A1 { .. } => 1,
        }
    }

    pub fn d(&self) -> Option<u32> {
        match self {
            StratumLabel::A1 { d, .. } => Some(*d),
            _ => None,
        }
    }

    pub fn in_d(&self) -> Option<bool> {
        match self {
            StratumLabel::A1 { case, .. } => Some(*case != A1Case::NotInD),
            _ => None,
        }
    }

    /// Every label that can occur at `p`: 11 for odd `p`, 6 for `p = 2`.
    pub fn legal(p: u32) -> Vec<StratumLabel> {
        let mut out = vec![StratumLabel::A3, StratumLabel::A2F4MinusF2, StratumLabel::A2Generic];
        if p == 2 {
            for case in [A1Case::NotInD, A1Case::InDNotF6, A1Case::InDF6] {
                out.push(StratumLabel::A1 { d: 3, case });
            }
        } else {
            out.push(StratumLabel::A1 { d: 3, case: A1Case::NotInD });
            out.push(StratumLabel::A1 { d: 3, case: A1Case::InDF6 });
            for d in 4..=6 {
                out.push(StratumLabel::A1 { d, case: A1Case::NotInD });
                out.push(StratumLabel::A1 { d, case: A1Case::InDNotF6 });
            }
        }
        out
    }

    pub fn is_legal(&self, p: u32) -> bool {
        Self::legal(p).contains(self)
    }
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StratumLabel::A3 => write!(f, "A3"),
            StratumLabel::A2F4MinusF2 => write!(f, "A2_F4MINUS_F2"),
            StratumLabel::A2Generic => write!(f, "A2_GENERIC"),
            StratumLabel::A1 { d, case } => {
                let c = match case {
                    A1Case::NotInD => "notInD",
                    A1Case::InDNotF6 => "inD_notF6",
                    A1Case::InDF6 => "inD_F6",
                };
                write!(f, "A1_d{d}_{c}")
            }
        }
    }
}

/// `𝕋 = (t, t^{(p)}, t^{(p⁻¹)})` as a 3×3 matrix over the working field.
pub fn t_matrix(ctx: &FieldCtx, t: &CurvePoint) -> Result<Mat<FieldElem>, StratumError> {
    let cols: Vec<Vec<FieldElem>> = [0i64, 1, -1]
        .iter()
        .map(|&e| t.coords.iter().map(|c| ctx.frob(c, e)).collect())
        .collect();
    let m = Mat::from_cols(&cols);
    let d = linalg_ff::det(ctx, &m).expect("square");
    if d.is_zero() {
        return Err(StratumError::SingularT);
    }
    Ok(m)
}

/// The standard basis `I₁₁, I₂₂, I₃₃, I₁₂+I₂₁, I₁₃+I₃₁, I₂₃+I₃₂` of `S₃(F_{p²})`.
pub fn symmetric_basis() -> [M3; 6] {
    let pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
    pairs.map(|(i, j)| {
        let mut s = [[Fp2::ZERO; 3]; 3];
        s[i][j] = Fp2::ONE;
        s[j][i] = Fp2::ONE;
        s
    })
}

/// Combines basis coefficients into a symmetric matrix.
pub fn symmetric_from_coeffs(coeffs: &[Fp2]) -> M3 {
    let pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
    let mut s = [[Fp2::ZERO; 3]; 3];
    for (&(i, j), &c) in pairs.iter().zip(coeffs) {
        s[i][j] = c;
        s[j][i] = c;
    }
    s
}

/// `ψ_t` with `𝕋⁻¹` precomputed. Only the first row of `𝕋⁻¹` and the first
/// column of `𝕋` (which is `t`) enter the `(1,1)` entry.
#[derive(Debug, Clone)]
pub struct PsiT {
    row: [FieldElem; 3],
    t: [FieldElem; 3],
    images: [FieldElem; 6],
}

impl PsiT {
    pub fn new(ctx: &FieldCtx, t: &CurvePoint) -> Result<Self, StratumError> {
        if t.degree == 1 {
            return Err(StratumError::NotInC0);
        }
        let tm = t_matrix(ctx, t)?;
        let (_, inv) = det_and_inverse(ctx, &tm).expect("square");
        let inv = inv.ok_or(StratumError::SingularT)?;
        let row = [inv.get(0, 0), inv.get(0, 1), inv.get(0, 2)];
        let mut psi = PsiT { row, t: t.coords, images: [ctx.zero(); 6] };
        let basis = symmetric_basis();
        for (k, s) in basis.iter().enumerate() {
            psi.images[k] = psi.apply_any(ctx, s);
        }
        Ok(psi)
    }

    /// `(1,1)` entry of `𝕋⁻¹ M 𝕋` for any `M` over `F_{p²}`.
    pub fn apply_any(&self, ctx: &FieldCtx, m: &M3) -> FieldElem {
        let mut acc = ctx.zero();
        for i in 0..3 {
            for j in 0..3 {
                if m[i][j].is_zero() {
                    continue;
                }
                let c = ctx.mul(&self.row[i], &self.t[j]);
                acc = ctx.add(&acc, &ctx.mul(&ctx.embed(m[i][j]), &c));
            }
        }
        acc
    }

    pub fn apply(&self, ctx: &FieldCtx, s: &M3) -> Result<FieldElem, StratumError> {
        if !m3_is_symmetric(s) {
            return Err(StratumError::NotSymmetric);
        }
        Ok(self.apply_any(ctx, s))
    }

    /// `w₁, …, w₆`: the images of [`symmetric_basis`].
    pub fn images(&self) -> &[FieldElem; 6] {
        &self.images
    }

    /// `d(t) = dim Im ψ_t`.
    pub fn rank(&self, ctx: &FieldCtx) -> u32 {
        subfield_rank(ctx, &self.images) as u32
    }

    /// Basis of `ker ψ_t`, as symmetric matrices.
    pub fn kernel(&self, ctx: &FieldCtx) -> Vec<M3> {
        let r = rank_over_subfield(ctx, &self.images).expect("same context");
        r.relations.iter().map(|c| symmetric_from_coeffs(c)).collect()
    }

    /// Some `S` with `ψ_t(S) = target`, if one exists.
    pub fn preimage(&self, ctx: &FieldCtx, target: &FieldElem) -> Option<M3> {
        linalg_ff::solve_over_subfield(ctx, &self.images, target).map(|c| symmetric_from_coeffs(&c))
    }

    /// Whether `x ∈ Im ψ_t`, decided by comparing ranks.
    pub fn in_image(&self, ctx: &FieldCtx, x: &FieldElem) -> bool {
        let mut v = self.images.to_vec();
        let base = subfield_rank(ctx, &v);
        v.push(*x);
        subfield_rank(ctx, &v) == base
    }
}

pub fn psi_t(ctx: &FieldCtx, t: &CurvePoint, s: &M3) -> Result<FieldElem, StratumError> {
    PsiT::new(ctx, t)?.apply(ctx, s)
}

/// `ψ_{t,A}(S A)`, the `(1,1)` entry of `𝕋⁻¹ S A 𝕋`.
pub fn psi_t_a(ctx: &FieldCtx, psi: &PsiT, s: &M3, a: &M3) -> FieldElem {
    psi.apply_any(ctx, &m3_mul(ctx.fp2(), s, a))
}

/// The affine relations between the `w_i` (with `t₃ = 1`):
/// `w₁ = t₁²w₃`, `w₂ = t₂²w₃`, `w₄ = 2t₁t₂w₃`, `w₅ = 2t₁w₃`, `w₆ = 2t₂w₃`, `w₃ ≠ 0`.
pub fn w_relations_hold(ctx: &FieldCtx, psi: &PsiT, t: &CurvePoint) -> bool {
    let [t1, t2, t3] = t.coords;
    if t3 != ctx.one() {
        return false;
    }
    let w = psi.images();
    let two = ctx.from_int(2);
    let m = |a: &FieldElem, b: &FieldElem| ctx.mul(a, b);
    !w[2].is_zero()
        && w[0] == m(&m(&t1, &t1), &w[2])
        && w[1] == m(&m(&t2, &t2), &w[2])
        && w[3] == m(&m(&two, &m(&t1, &t2)), &w[2])
        && w[4] == m(&m(&two, &t1), &w[2])
        && w[5] == m(&m(&two, &t2), &w[2])
}

/// `dim ⟨1, t₁, t₂, t₁t₂, t₁², t₂²⟩` over `F_{p²}` for `t` normalised with `t₃ = 1`.
pub fn d_span(ctx: &FieldCtx, t: &CurvePoint) -> Result<u32, StratumError> {
    let [t1, t2, t3] = t.coords;
    if t.degree == 1 || t3 != ctx.one() {
        return Err(StratumError::NotInC0);
    }
    let v = [ctx.one(), t1, t2, ctx.mul(&t1, &t2), ctx.square(&t1), ctx.square(&t2)];
    Ok(subfield_rank(ctx, &v) as u32)
}

/// Both computations of `d(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DInvariant {
    /// Rank of the image of `ψ_t`.
    pub method_a: u32,
    /// Rank of the monomial span; `None` for `p = 2`.
    pub method_b: Option<u32>,
}

impl DInvariant {
    pub fn value(&self) -> u32 {
        self.method_a
    }
}

pub fn d_invariant(ctx: &FieldCtx, t: &CurvePoint) -> Result<DInvariant, StratumError> {
    let psi = PsiT::new(ctx, t)?;
    d_invariant_with(ctx, &psi, t)
}

fn d_invariant_with(ctx: &FieldCtx, psi: &PsiT, t: &CurvePoint) -> Result<DInvariant, StratumError> {
    let method_a = psi.rank(ctx);
    let method_b = if ctx.p() == 2 { None } else { Some(d_span(ctx, t)?) };
    if let Some(b) = method_b {
        if b != method_a {
            return Err(StratumError::CrossCheckFailure(format!("rank of Im psi is {method_a}, monomial span {b}")));
        }
    }
    Ok(DInvariant { method_a, method_b })
}

/// Vanishing of the 6×6 determinant with columns `v^{(p^{2k})}`, `k = 0..5`,
/// where `v = (t₁², t₂², t₃², t₁t₂, t₁t₃, t₂t₃)`.
pub fn in_delta(ctx: &FieldCtx, t: &CurvePoint) -> bool {
    let [t1, t2, t3] = t.coords;
    let v = [
        ctx.square(&t1),
        ctx.square(&t2),
        ctx.square(&t3),
        ctx.mul(&t1, &t2),
        ctx.mul(&t1, &t3),
        ctx.mul(&t2, &t3),
    ];
    let cols: Vec<Vec<FieldElem>> = (0..6).map(|k| v.iter().map(|x| ctx.frob(x, 2 * k)).collect()).collect();
    linalg_ff::det(ctx, &Mat::from_cols(&cols)).expect("square").is_zero()
}

/// `u ∈ 𝒟_t`, i.e. `u₂u₁⁻¹ ∈ Im ψ_t`.
pub fn in_divisor_d(ctx: &FieldCtx, x: &StratumPoint) -> Result<bool, StratumError> {
    let r = x.ratio().ok_or(StratumError::OnSectionT)?;
    Ok(PsiT::new(ctx, &x.t)?.in_image(ctx, &r))
}

/// Everything the classifier learns about a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub label: StratumLabel,
    /// `d(t)` by the image rank; absent for `t ∈ C(F_{p²})`.
    pub d: Option<u32>,
    pub d_span: Option<u32>,
    pub in_delta: bool,
    pub in_d: Option<bool>,
}

pub fn classify_stratum(ctx: &FieldCtx, x: &StratumPoint) -> Result<Classification, StratumError> {
    let t = &x.t;
    let delta = in_delta(ctx, t);
    if t.degree == 1 {
        let label = match x.ratio() {
            None => StratumLabel::A3,
            Some(r) => match ctx.element_degree(&r) {
                1 => StratumLabel::A3,
                2 => StratumLabel::A2F4MinusF2,
                _ => StratumLabel::A2Generic,
            },
        };
        return Ok(Classification { label, d: None, d_span: None, in_delta: delta, in_d: None });
    }
    let psi = PsiT::new(ctx, t)?;
    let d = d_invariant_with(ctx, &psi, t)?.value();
    let span = d_span(ctx, t)?;
    let Some(r) = x.ratio() else {
        return Ok(Classification { label: StratumLabel::A3, d: Some(d), d_span: Some(span), in_delta: delta, in_d: None });
    };
    let in_d = psi.in_image(ctx, &r);
    let case = match (in_d, t.degree == 3) {
        (false, _) => A1Case::NotInD,
        (true, false) => A1Case::InDNotF6,
        (true, true) => A1Case::InDF6,
    };
    Ok(Classification {
        label: StratumLabel::A1 { d, case },
        d: Some(d),
        d_span: Some(span),
        in_delta: delta,
        in_d: Some(in_d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermat_curve::enumerate_points;

    #[test]
    fn label_counts() {
        assert_eq!(StratumLabel::legal(3).len(), 11);
        assert_eq!(StratumLabel::legal(2).len(), 6);
        assert!(!StratumLabel::A1 { d: 4, case: A1Case::NotInD }.is_legal(2));
    }

    #[test]
    fn psi_on_degree_three_points() {
        let (ctx, pts) = enumerate_points(2, 3).unwrap();
        for t in pts.iter().filter(|t| t.degree == 3) {
            assert!(t_matrix(&ctx, t).is_ok());
            let psi = PsiT::new(&ctx, t).unwrap();
            assert!(w_relations_hold(&ctx, &psi, t));
            assert_eq!(psi.rank(&ctx), 3);
            assert_eq!(d_span(&ctx, t).unwrap(), 3);
            assert!(in_delta(&ctx, t));
            assert_eq!(psi.apply(&ctx, &[[Fp2::ZERO; 3]; 3]).unwrap(), ctx.zero());
        }
        let fp2_pt = pts.iter().find(|t| t.degree == 1).unwrap();
        assert_eq!(t_matrix(&ctx, fp2_pt).unwrap_err(), StratumError::SingularT);
    }

    #[test]
    fn classifier_basics() {
        let (ctx, pts) = enumerate_points(2, 3).unwrap();
        let t = *pts.iter().find(|t| t.degree == 3).unwrap();
        let sec = StratumPoint::new(&ctx, t, [ctx.zero(), ctx.gen()]).unwrap();
        assert_eq!(classify_stratum(&ctx, &sec).unwrap().label, StratumLabel::A3);
        let zero_u = StratumPoint::new(&ctx, t, [ctx.one(), ctx.zero()]).unwrap();
        let c = classify_stratum(&ctx, &zero_u).unwrap();
        assert_eq!(c.label, StratumLabel::A1 { d: 3, case: A1Case::InDF6 });
        let t1 = *pts.iter().find(|t| t.degree == 1).unwrap();
        let w = ctx.embed(Fp2 { a: 0, b: 1 });
        let x = StratumPoint::new(&ctx, t1, [ctx.one(), w]).unwrap();
        assert_eq!(classify_stratum(&ctx, &x).unwrap().label, StratumLabel::A3);
        let x = StratumPoint::new(&ctx, t1, [ctx.one(), ctx.gen()]).unwrap();
        assert_eq!(classify_stratum(&ctx, &x).unwrap().label, StratumLabel::A2Generic);
    }
}
