//! Brute-force constructions of the finite groups whose orders are predicted
//! in closed form: the reduction groups `G_{M₂}` and `G_M`, quaternion unit
//! groups, `U(3, O)`, the reduction map `O → F_{p²}[Π]/(Π²)` and the
//! automorphism groups of a-number one points.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fermat_curve::{
    self as fc, is_unitary, m3_add, m3_conj, m3_is_symmetric, m3_mul, m3_transpose, CurveError, UnitaryGroup,
};
use crate::field_tower::{invert_mod_p, FieldCtx, FieldElem, FieldError, Fp2, Fp2Field};
use crate::linalg_ff::{self, M3};
use crate::strata::{PsiT, StratumError, StratumPoint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("enumeration at p = {0} is too large")]
    TooLarge(u32),
    #[error("p = {0} is not supported here")]
    UnsupportedPrime(u32),
    #[error("the point does not have a-number one")]
    WrongANumber,
    #[error("membership criteria disagree: {0}")]
    OracleDisagreement(String),
    #[error("no reduction isomorphism found at p = {0}")]
    SearchExhausted(u32),
    #[error("element set is not a group: {0}")]
    NotClosed(String),
    #[error("matrix is not invertible")]
    Singular,
    #[error(transparent)]
    Strata(#[from] StratumError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

// ---------- finite groups ----------

/// Multiplication oracle for a finite group.
pub trait GroupOps: Clone + Send + Sync {
    type E: Clone + Eq + Hash + Ord + Debug + Send + Sync;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn identity(&self) -> Self::E;
}

/// A finite group given by its elements and a multiplication oracle.
/// Closure is verified on construction by regenerating the set from a
/// greedily chosen generating set.
#[derive(Debug, Clone)]
pub struct FiniteGroup<G: GroupOps> {
    ops: G,
    elements: Vec<G::E>,
    set: HashSet<G::E>,
    generators: Vec<G::E>,
}

impl<G: GroupOps> FiniteGroup<G> {
    pub fn new(ops: G, mut elements: Vec<G::E>) -> Result<Self, GroupError> {
        elements.sort();
        elements.dedup();
        let set: HashSet<G::E> = elements.iter().cloned().collect();
        let id = ops.identity();
        if !set.contains(&id) {
            return Err(GroupError::NotClosed("identity missing".into()));
        }
        let mut generated: HashSet<G::E> = HashSet::from([id.clone()]);
        let mut list = vec![id];
        let mut generators: Vec<G::E> = Vec::new();
        for e in &elements {
            if generated.contains(e) {
                continue;
            }
            generators.push(e.clone());
            // Right-multiply everything reached so far by all generators
            // until nothing new appears.
            let mut i = 0;
            while i < list.len() {
                let x = list[i].clone();
                for g in &generators {
                    let y = ops.mul(&x, g);
                    if !set.contains(&y) {
                        return Err(GroupError::NotClosed(format!("{x:?} * {g:?} = {y:?}")));
                    }
                    if generated.insert(y.clone()) {
                        list.push(y);
                    }
                }
                i += 1;
            }
        }
        Ok(FiniteGroup { ops, elements, set, generators })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[G::E] {
        &self.elements
    }

    pub fn contains(&self, x: &G::E) -> bool {
        self.set.contains(x)
    }

    pub fn generators(&self) -> &[G::E] {
        &self.generators
    }

    pub fn ops(&self) -> &G {
        &self.ops
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        g.iter().all(|a| g.iter().all(|b| self.ops.mul(a, b) == self.ops.mul(b, a)))
    }

    pub fn element_order(&self, x: &G::E) -> u64 {
        let id = self.ops.identity();
        let mut y = x.clone();
        let mut k = 1;
        while y != id {
            y = self.ops.mul(&y, x);
            k += 1;
        }
        k
    }

    pub fn center_order(&self) -> usize {
        let g = &self.generators;
        self.elements
            .iter()
            .filter(|z| g.iter().all(|a| self.ops.mul(a, z) == self.ops.mul(z, a)))
            .count()
    }

    /// Number of elements of each order.
    pub fn order_histogram(&self) -> BTreeMap<u64, u64> {
        let mut h = BTreeMap::new();
        for x in &self.elements {
            *h.entry(self.element_order(x)).or_insert(0) += 1;
        }
        h
    }

    pub fn group_type(&self) -> GroupType {
        group_type(self)
    }
}

/// Isomorphism-type summary of a finite group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupType {
    pub name: String,
    pub order: u64,
    pub abelian: bool,
    pub exponent: u64,
    pub center_order: u64,
    /// Orders of the cyclic factors in primary form (abelian groups only).
    pub invariants: Vec<u64>,
    pub order_histogram: BTreeMap<u64, u64>,
}

fn abelian_invariants(hist: &BTreeMap<u64, u64>, order: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for (r, e) in crate::nt::factor(order.max(1)) {
        // s_k = log_r #{x : x^{r^k} = 1}
        let s: Vec<u32> = (0..=e)
            .map(|k| {
                let rk = r.pow(k);
                let c: u64 = hist.iter().filter(|(o, _)| rk % **o == 0).map(|(_, n)| n).sum();
                c.ilog(r)
            })
            .collect();
        // number of factors of order ≥ r^k
        let at_least: Vec<u32> = (1..=e as usize).map(|k| s[k] - s[k - 1]).collect();
        for k in (1..=e as usize).rev() {
            let exact = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
            for _ in 0..exact {
                out.push(r.pow(k as u32));
            }
        }
    }
    out
}

fn name_abelian(inv: &[u64]) -> String {
    if inv.is_empty() {
        return "C1".into();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < inv.len() {
        let mut j = i;
        while j < inv.len() && inv[j] == inv[i] {
            j += 1;
        }
        let n = j - i;
        parts.push(if n == 1 { format!("C{}", inv[i]) } else { format!("C{}^{}", inv[i], n) });
        i = j;
    }
    parts.join(" x ")
}

fn name_nonabelian(order: u64, hist: &BTreeMap<u64, u64>) -> Option<&'static str> {
    let h: Vec<(u64, u64)> = hist.iter().map(|(a, b)| (*a, *b)).collect();
    match (order, h.as_slice()) {
        (24, [(1, 1), (2, 1), (3, 8), (4, 6), (6, 8)]) => Some("SL(2,3)"),
        (12, [(1, 1), (2, 1), (3, 2), (4, 6), (6, 2)]) => Some("C3 ⋊ C4"),
        (12, [(1, 1), (2, 3), (3, 8)]) => Some("A4"),
        (6, [(1, 1), (2, 3), (3, 2)]) => Some("S3"),
        _ => None,
    }
}

/// Names abelian groups by their invariants; nonabelian groups get a name
/// only for a few small signatures, otherwise a fingerprint.
pub fn group_type<G: GroupOps>(g: &FiniteGroup<G>) -> GroupType {
    let order = g.order() as u64;
    let hist = g.order_histogram();
    let exponent = hist.keys().fold(1u64, |acc, &o| num_integer::lcm(acc, o));
    let abelian = g.is_abelian();
    let center_order = if abelian { order } else { g.center_order() as u64 };
    let (name, invariants) = if abelian {
        let inv = abelian_invariants(&hist, order);
        (name_abelian(&inv), inv)
    } else {
        let name = name_nonabelian(order, &hist)
            .map(str::to_string)
            .unwrap_or_else(|| format!("nonabelian(order={order},exponent={exponent},center={center_order})"));
        (name, Vec::new())
    };
    GroupType { name, order, abelian, exponent, center_order, invariants, order_histogram: hist }
}

// ---------- PiMatrix ----------

/// `A + ΠB` in `Mat₃(F_{p²}[Π]/(Π²))` with `Π a = ā Π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PiMatrix {
    pub a: M3,
    pub b: M3,
}

impl PiMatrix {
    pub fn identity() -> Self {
        PiMatrix { a: fc::m3_identity(), b: fc::m3_zero() }
    }

    /// `(A₁ + ΠB₁)(A₂ + ΠB₂) = A₁A₂ + Π(B₁A₂ + A₁^{(p)}B₂)`.
    pub fn mul(&self, k: &Fp2Field, o: &PiMatrix) -> PiMatrix {
        PiMatrix {
            a: m3_mul(k, &self.a, &o.a),
            b: m3_add(k, &m3_mul(k, &self.b, &o.a), &m3_mul(k, &m3_conj(k, &self.a), &o.b)),
        }
    }

    /// The involution induced by quaternion conjugation: `(Ā^T, −B^T)`.
    pub fn star(&self, k: &Fp2Field) -> PiMatrix {
        PiMatrix { a: m3_transpose(&m3_conj(k, &self.a)), b: m3_transpose(&self.b).map(|r| r.map(|x| k.neg(x))) }
    }

    /// Membership in `G_{M₂}`: `A` unitary and `B A⁻¹` symmetric.
    pub fn in_g_m2(&self, k: &Fp2Field) -> bool {
        is_unitary(k, &self.a) && m3_is_symmetric(&m3_mul(k, &self.b, &m3_transpose(&m3_conj(k, &self.a))))
    }

    /// The 6×6 block matrix `[[A, 0], [B, A^{(p)}]]` acting on `(ē, f̄)`.
    pub fn action(&self, ctx: &FieldCtx, x: &[FieldElem; 3], y: &[FieldElem; 3]) -> [FieldElem; 6] {
        let k = ctx.fp2();
        let top = fc::m3_apply(ctx, &self.a, x);
        let bx = fc::m3_apply(ctx, &self.b, x);
        let ay = fc::m3_apply(ctx, &m3_conj(k, &self.a), y);
        [top[0], top[1], top[2], ctx.add(&bx[0], &ay[0]), ctx.add(&bx[1], &ay[1]), ctx.add(&bx[2], &ay[2])]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PiOps(pub Fp2Field);

impl GroupOps for PiOps {
    type E = PiMatrix;
    fn mul(&self, a: &PiMatrix, b: &PiMatrix) -> PiMatrix {
        a.mul(&self.0, b)
    }
    fn identity(&self) -> PiMatrix {
        PiMatrix::identity()
    }
}

// ---------- G_{M₂} ----------

/// All symmetric 3×3 matrices over `F_{p²}`.
pub fn symmetric_matrices(k: &Fp2Field) -> Vec<M3> {
    let n = k.size();
    (0..n.pow(6))
        .map(|mut i| {
            let mut c = [Fp2::ZERO; 6];
            for x in &mut c {
                *x = k.from_index(i % n);
                i /= n;
            }
            crate::strata::symmetric_from_coeffs(&c)
        })
        .collect()
}

fn pack_p2(k: &Fp2Field, g: &PiMatrix) -> u64 {
    let mut key = 0u64;
    for m in [&g.a, &g.b] {
        for row in m {
            for x in row {
                key = key * 4 + k.index(*x) as u64;
            }
        }
    }
    key
}

/// Result of enumerating `G_{M₂}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GM2Census {
    pub p: u32,
    pub order: u128,
    /// Whether the elements were materialised and deduplicated.
    pub materialised: bool,
    pub identity_present: bool,
    pub closure_samples: usize,
    pub closure_failures: usize,
}

/// `G_{M₂}` at `p = 2`: all `(A, S A)` built, checked for membership and
/// deduplicated; closure is sampled on random pairs.
pub fn enumerate_g_m2<R: Rng + ?Sized>(
    unitary: &UnitaryGroup,
    samples: usize,
    rng: &mut R,
) -> Result<GM2Census, GroupError> {
    let p = unitary.p;
    if p != 2 {
        return Err(GroupError::TooLarge(p));
    }
    let k = Fp2Field::new(p)?;
    let sym = symmetric_matrices(&k);
    let chunks: Vec<Result<Vec<u64>, GroupError>> = unitary
        .elements
        .par_iter()
        .map(|a| {
            let mut keys = Vec::with_capacity(sym.len());
            for s in &sym {
                let g = PiMatrix { a: *a, b: m3_mul(&k, s, a) };
                if !g.in_g_m2(&k) {
                    return Err(GroupError::NotClosed("generated element fails the membership test".into()));
                }
                keys.push(pack_p2(&k, &g));
            }
            Ok(keys)
        })
        .collect();
    let mut keys: Vec<u64> = Vec::with_capacity(unitary.elements.len() * sym.len());
    for c in chunks {
        keys.extend(c?);
    }
    keys.par_sort_unstable();
    keys.dedup();
    let identity_present = keys.binary_search(&pack_p2(&k, &PiMatrix::identity())).is_ok();
    let mut failures = 0;
    for _ in 0..samples {
        let pick = |rng: &mut R| {
            let a = unitary.elements[rng.gen_range(0..unitary.elements.len())];
            let s = sym[rng.gen_range(0..sym.len())];
            PiMatrix { a, b: m3_mul(&k, &s, &a) }
        };
        let (g, h) = (pick(rng), pick(rng));
        let gh = g.mul(&k, &h);
        if !gh.in_g_m2(&k) || keys.binary_search(&pack_p2(&k, &gh)).is_err() {
            failures += 1;
        }
    }
    Ok(GM2Census {
        p,
        order: keys.len() as u128,
        materialised: true,
        identity_present,
        closure_samples: samples,
        closure_failures: failures,
    })
}

/// `|G_{M₂}|` as `Σ_A |{B : B A⁻¹ symmetric}|`, each fibre size found by
/// solving the linear conditions on `B` over `F_{p²}`.
pub fn g_m2_order_by_fibres(unitary: &UnitaryGroup) -> Result<u128, GroupError> {
    let k = Fp2Field::new(unitary.p)?;
    let q = k.size() as u128;
    let total: u128 = unitary
        .elements
        .par_iter()
        .map(|a| {
            let c = m3_transpose(&m3_conj(&k, a));
            // unknown b_{il} at 3i + l; (B C)_{ij} − (B C)_{ji} = 0 for i < j
            let mut rows = Vec::new();
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let mut row = vec![Fp2::ZERO; 9];
                for l in 0..3 {
                    row[3 * i + l] = k.add(row[3 * i + l], c[l][j]);
                    row[3 * j + l] = k.sub(row[3 * j + l], c[l][i]);
                }
                rows.push(row);
            }
            let dim = linalg_ff::nullspace(&k, &rows, 9).len() as u32;
            q.pow(dim)
        })
        .sum();
    Ok(total)
}

// ---------- G_M and the membership oracle ----------

/// Decides whether a [`PiMatrix`] preserves `M/pM₂` for a fixed point `(t, u)`.
#[derive(Debug, Clone)]
pub struct MembershipOracle<'a> {
    ctx: &'a FieldCtx,
    psi: PsiT,
    t: [FieldElem; 3],
    ratio: FieldElem,
    basis: [([FieldElem; 3], [FieldElem; 3]); 3],
}

impl<'a> MembershipOracle<'a> {
    pub fn new(ctx: &'a FieldCtx, x: &StratumPoint) -> Result<Self, GroupError> {
        let ratio = x.ratio().ok_or(GroupError::WrongANumber)?;
        if x.t.degree == 1 {
            return Err(GroupError::WrongANumber);
        }
        let psi = PsiT::new(ctx, &x.t)?;
        let t = x.t.coords;
        let tp = t.map(|c| ctx.frob(&c, 1));
        let tq = t.map(|c| ctx.frob(&c, -1));
        let zero = [ctx.zero(); 3];
        let rt = t.map(|c| ctx.mul(&ratio, &c));
        Ok(MembershipOracle { ctx, psi, t, ratio, basis: [(t, rt), (zero, tp), (zero, tq)] })
    }

    pub fn psi(&self) -> &PsiT {
        &self.psi
    }

    /// `A t = α t`, and the `(1,1)` entry of `𝕋⁻¹B𝕋` equals `u₂u₁⁻¹(α − α^{p³})`.
    pub fn by_criterion(&self, g: &PiMatrix) -> bool {
        let ctx = self.ctx;
        let Some(alpha) = fc::eigenvalue(ctx, &g.a, &self.t) else {
            return false;
        };
        let rhs = ctx.mul(&self.ratio, &ctx.sub(&alpha, &ctx.frob(&alpha, 3)));
        self.psi.apply_any(ctx, &g.b) == rhs
    }

    /// `g W = W` for `W = span{(t; r t), (0; t^{(p)}), (0; t^{(p⁻¹)})}`.
    pub fn by_subspace(&self, g: &PiMatrix) -> bool {
        let ctx = self.ctx;
        let mut rows: Vec<Vec<FieldElem>> = Vec::with_capacity(6);
        for (x, y) in &self.basis {
            rows.push(x.iter().chain(y.iter()).copied().collect());
        }
        for (x, y) in &self.basis {
            rows.push(g.action(ctx, x, y).to_vec());
        }
        linalg_ff::rref(ctx, &mut rows, 6).len() == 3
    }

    /// Both tests; an error if they disagree.
    pub fn check(&self, g: &PiMatrix) -> Result<bool, GroupError> {
        if fc::m3_det(self.ctx.fp2(), &g.a).is_zero() {
            return Err(GroupError::Singular);
        }
        let a = self.by_criterion(g);
        let b = self.by_subspace(g);
        if a != b {
            return Err(GroupError::OracleDisagreement(format!("criterion {a}, subspace {b} for {g:?}")));
        }
        Ok(a)
    }
}

/// Convenience wrapper around [`MembershipOracle::check`].
pub fn action_on_m2_mod_p(ctx: &FieldCtx, x: &StratumPoint, g: &PiMatrix) -> Result<bool, GroupError> {
    MembershipOracle::new(ctx, x)?.check(g)
}

/// `G_M` for an a-number one point: `(A, S A)` with `A ∈ End(t) ∩ U₃(F_p)`
/// of eigenvalue `α` and `ψ_t(S) = u₂u₁⁻¹(1 − α^{p³−1})`.
pub fn enumerate_g_m(ctx: &FieldCtx, x: &StratumPoint) -> Result<FiniteGroup<PiOps>, GroupError> {
    let oracle = MembershipOracle::new(ctx, x)?;
    let k = *ctx.fp2();
    let psi = oracle.psi();
    let kernel = fc::span_elements(&k, &psi.kernel(ctx));
    let ratio = x.ratio().expect("checked by the oracle");
    let mut elements = Vec::new();
    for (a, alpha) in fc::end_t_unitary(ctx, &x.t)? {
        let ap = ctx.div(&ctx.frob(&alpha, 3), &alpha).expect("unit eigenvalue");
        let target = ctx.mul(&ratio, &ctx.sub(&ctx.one(), &ap));
        let Some(s0) = psi.preimage(ctx, &target) else {
            continue;
        };
        for kk in &kernel {
            let s = m3_add(&k, &s0, kk);
            elements.push(PiMatrix { a, b: m3_mul(&k, &s, &a) });
        }
    }
    FiniteGroup::new(PiOps(k), elements)
}

// ---------- quaternion orders ----------

/// The maximal orders used at `p = 2` and `p = 3`. Elements are stored as
/// numerators over 2 in the basis `1, i, j, k` of `(a, b)` with `i² = a`, `j² = b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuatOrder {
    /// `Z⟨1, i, j, (1+i+j+k)/2⟩` in `(−1, −1)`.
    O2,
    /// `Z⟨1, i, (1+j)/2, i(1+j)/2⟩` in `(−1, −3)`.
    O3,
}

pub type Quat = [i64; 4];

impl QuatOrder {
    pub fn for_prime(p: u32) -> Result<Self, GroupError> {
        match p {
            2 => Ok(QuatOrder::O2),
            3 => Ok(QuatOrder::O3),
            _ => Err(GroupError::UnsupportedPrime(p)),
        }
    }

    pub fn p(self) -> u32 {
        match self {
            QuatOrder::O2 => 2,
            QuatOrder::O3 => 3,
        }
    }

    fn params(self) -> (i64, i64) {
        match self {
            QuatOrder::O2 => (-1, -1),
            QuatOrder::O3 => (-1, -3),
        }
    }

    pub fn one() -> Quat {
        [2, 0, 0, 0]
    }

    pub fn contains(self, x: &Quat) -> bool {
        match self {
            QuatOrder::O2 => x.iter().all(|c| (c - x[0]) % 2 == 0),
            QuatOrder::O3 => (x[0] - x[2]) % 2 == 0 && (x[1] - x[3]) % 2 == 0,
        }
    }

    /// Coordinates in the Z-basis of the order.
    pub fn basis_coords(self, x: &Quat) -> [i64; 4] {
        match self {
            QuatOrder::O2 => [(x[0] - x[3]) / 2, (x[1] - x[3]) / 2, (x[2] - x[3]) / 2, x[3]],
            QuatOrder::O3 => [(x[0] - x[2]) / 2, (x[1] - x[3]) / 2, x[2], x[3]],
        }
    }

    pub fn from_basis_coords(self, c: &[i64; 4]) -> Quat {
        match self {
            QuatOrder::O2 => [2 * c[0] + c[3], 2 * c[1] + c[3], 2 * c[2] + c[3], c[3]],
            QuatOrder::O3 => [2 * c[0] + c[2], 2 * c[1] + c[3], c[2], c[3]],
        }
    }

    pub fn mul(self, x: &Quat, y: &Quat) -> Quat {
        let (a, b) = self.params();
        let r = [
            x[0] * y[0] + a * x[1] * y[1] + b * x[2] * y[2] - a * b * x[3] * y[3],
            x[0] * y[1] + x[1] * y[0] - b * x[2] * y[3] + b * x[3] * y[2],
            x[0] * y[2] + x[2] * y[0] + a * x[1] * y[3] - a * x[3] * y[1],
            x[0] * y[3] + x[3] * y[0] + x[1] * y[2] - x[2] * y[1],
        ];
        debug_assert!(r.iter().all(|c| c % 2 == 0));
        r.map(|c| c / 2)
    }

    pub fn conj(x: &Quat) -> Quat {
        [x[0], -x[1], -x[2], -x[3]]
    }

    pub fn norm(self, x: &Quat) -> i64 {
        let (a, b) = self.params();
        let n = x[0] * x[0] - a * x[1] * x[1] - b * x[2] * x[2] + a * b * x[3] * x[3];
        debug_assert!(n % 4 == 0);
        n / 4
    }

    /// Units found by scanning numerators with `|xᵢ| ≤ 2`.
    pub fn units(self) -> Vec<Quat> {
        let mut out = Vec::new();
        for x0 in -2..=2i64 {
            for x1 in -2..=2i64 {
                for x2 in -2..=2i64 {
                    for x3 in -2..=2i64 {
                        let x = [x0, x1, x2, x3];
                        if self.contains(&x) && self.norm(&x) == 1 {
                            out.push(x);
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuatOps(pub QuatOrder);

impl GroupOps for QuatOps {
    type E = Quat;
    fn mul(&self, a: &Quat, b: &Quat) -> Quat {
        self.0.mul(a, b)
    }
    fn identity(&self) -> Quat {
        QuatOrder::one()
    }
}

/// Units modulo `±1`, each class represented by its larger member.
#[derive(Debug, Clone, Copy)]
pub struct QuatModSignOps(pub QuatOrder);

fn sign_rep(x: Quat) -> Quat {
    x.max(x.map(|c| -c))
}

impl GroupOps for QuatModSignOps {
    type E = Quat;
    fn mul(&self, a: &Quat, b: &Quat) -> Quat {
        sign_rep(self.0.mul(a, b))
    }
    fn identity(&self) -> Quat {
        QuatOrder::one()
    }
}

pub fn quaternion_unit_group(order: QuatOrder) -> Result<FiniteGroup<QuatOps>, GroupError> {
    FiniteGroup::new(QuatOps(order), order.units())
}

pub fn unit_group_mod_sign(order: QuatOrder) -> Result<FiniteGroup<QuatModSignOps>, GroupError> {
    let els = order.units().into_iter().map(sign_rep).collect();
    FiniteGroup::new(QuatModSignOps(order), els)
}

// ---------- U(n, O) ----------

/// A monomial matrix over `O`: row `i` has the unit `units[u[i]]` in column `perm[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub perm: [u8; 3],
    pub u: [u8; 3],
}

#[derive(Debug, Clone)]
pub struct MonomialOps {
    pub order: QuatOrder,
    pub n: usize,
    pub units: Vec<Quat>,
    table: Vec<Vec<u8>>,
    one: u8,
}

impl MonomialOps {
    pub fn new(order: QuatOrder, n: usize) -> Self {
        assert!((1..=3).contains(&n));
        let units = order.units();
        let idx = |x: &Quat| units.binary_search(x).expect("units are closed") as u8;
        let table = units.iter().map(|a| units.iter().map(|b| idx(&order.mul(a, b))).collect()).collect();
        let one = idx(&QuatOrder::one());
        MonomialOps { order, n, units, table, one }
    }

    pub fn to_matrix(&self, m: &Monomial) -> [[Quat; 3]; 3] {
        let mut out = [[[0i64; 4]; 3]; 3];
        for i in 0..3 {
            out[i][m.perm[i] as usize] = self.units[m.u[i] as usize];
        }
        out
    }

    /// `A A* = I` computed with full quaternion matrix arithmetic.
    pub fn is_hermitian_unitary(&self, m: &Monomial) -> bool {
        let a = self.to_matrix(m);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut s = [0i64; 4];
                for l in 0..self.n {
                    let prod = self.order.mul(&a[i][l], &QuatOrder::conj(&a[j][l]));
                    for c in 0..4 {
                        s[c] += prod[c];
                    }
                }
                let expect = if i == j { QuatOrder::one() } else { [0; 4] };
                if s != expect {
                    return false;
                }
            }
        }
        true
    }

    pub fn elements(&self) -> Vec<Monomial> {
        let n = self.n;
        let perms: Vec<[u8; 3]> = permutations(n);
        let nu = self.units.len();
        let mut out = Vec::new();
        for perm in perms {
            for code in 0..nu.pow(n as u32) {
                let mut u = [self.one; 3];
                let mut c = code;
                for slot in u.iter_mut().take(n) {
                    *slot = (c % nu) as u8;
                    c /= nu;
                }
                out.push(Monomial { perm, u });
            }
        }
        out
    }
}

fn permutations(n: usize) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for a in 0..n as u8 {
        for b in 0..n as u8 {
            for c in 0..n as u8 {
                let full = [a, b, c];
                let v = &full[..n];
                let distinct = (0..n).all(|i| (0..i).all(|j| v[i] != v[j]));
                if distinct && (a as usize) < n && (n < 2 || (b as usize) < n) && (n < 3 || (c as usize) < n) {
                    let mut p = [0u8, 1, 2];
                    p[..n].copy_from_slice(v);
                    if !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

impl GroupOps for MonomialOps {
    type E = Monomial;
    fn mul(&self, m: &Monomial, n: &Monomial) -> Monomial {
        let mut perm = [0u8; 3];
        let mut u = [0u8; 3];
        for i in 0..3 {
            let s = m.perm[i] as usize;
            perm[i] = n.perm[s];
            u[i] = self.table[m.u[i] as usize][n.u[s] as usize];
        }
        Monomial { perm, u }
    }
    fn identity(&self) -> Monomial {
        Monomial { perm: [0, 1, 2], u: [self.one; 3] }
    }
}

/// `U(n, O)` as the monomial unit group, with `A A* = I` checked on every element.
pub fn unitary_perm_group(order: QuatOrder, n: usize) -> Result<FiniteGroup<MonomialOps>, GroupError> {
    let ops = MonomialOps::new(order, n);
    let els = ops.elements();
    if let Some(bad) = els.par_iter().find_any(|m| !ops.is_hermitian_unitary(m)) {
        return Err(GroupError::NotClosed(format!("{bad:?} is not unitary")));
    }
    FiniteGroup::new(ops, els)
}

// ---------- reduction modulo p ----------

/// An explicit isomorphism `O/pO ≅ F_{p²}[Π]/(Π²)`, given by `ω̂ ↦ γ` and `π̂ ↦ Π`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Reduction {
    pub order: QuatOrder,
    pub p: u32,
    /// `ω̂` and `π̂` in basis coordinates modulo `p`.
    pub omega: [u32; 4],
    pub pi: [u32; 4],
    inv: Vec<Vec<u32>>,
}

fn residue(order: QuatOrder, p: u32, x: &Quat) -> [u32; 4] {
    order.basis_coords(x).map(|c| c.rem_euclid(p as i64) as u32)
}

fn res_mul(order: QuatOrder, p: u32, a: &[u32; 4], b: &[u32; 4]) -> [u32; 4] {
    let x = order.from_basis_coords(&a.map(|c| c as i64));
    let y = order.from_basis_coords(&b.map(|c| c as i64));
    residue(order, p, &order.mul(&x, &y))
}

fn res_lin(p: u32, terms: &[(u32, &[u32; 4])]) -> [u32; 4] {
    let mut out = [0u32; 4];
    for (c, v) in terms {
        for i in 0..4 {
            out[i] = (out[i] + c * v[i]) % p;
        }
    }
    out
}

pub fn reduction_mod_p_embedding(order: QuatOrder) -> Result<Reduction, GroupError> {
    let p = order.p();
    let k = Fp2Field::new(p)?;
    let (c0, c1) = k.modulus();
    let one = residue(order, p, &QuatOrder::one());
    let all: Vec<[u32; 4]> = (0..p.pow(4))
        .map(|mut i| {
            let mut c = [0u32; 4];
            for x in &mut c {
                *x = i % p;
                i /= p;
            }
            c
        })
        .collect();
    // γ² + c1 γ + c0 = 0
    let is_root = |w: &[u32; 4]| res_lin(p, &[(1, &res_mul(order, p, w, w)), (c1, w), (c0, &one)]) == [0; 4];
    for omega in all.iter().filter(|w| is_root(w)) {
        let omega_bar = res_lin(p, &[(p - c1 % p, &one), (p - 1, omega)]);
        for pi in &all {
            if *pi == [0; 4] || res_mul(order, p, pi, pi) != [0; 4] {
                continue;
            }
            if res_mul(order, p, pi, omega) != res_mul(order, p, &omega_bar, pi) {
                continue;
            }
            let pw = res_mul(order, p, pi, omega);
            let cols = [one, *omega, *pi, pw];
            let mat: Vec<Vec<u32>> = (0..4).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
            if let Some(inv) = invert_mod_p(&mat, p) {
                return Ok(Reduction { order, p, omega: *omega, pi: *pi, inv });
            }
        }
    }
    Err(GroupError::SearchExhausted(p))
}

impl Reduction {
    /// `x ↦ (a, b)` with `x ≡ â + π̂ b̂ (mod p)`.
    pub fn map(&self, x: &Quat) -> (Fp2, Fp2) {
        let c = residue(self.order, self.p, x);
        let s: Vec<u8> = (0..4)
            .map(|r| ((0..4).map(|j| self.inv[r][j] * c[j]).sum::<u32>() % self.p) as u8)
            .collect();
        (Fp2 { a: s[0], b: s[1] }, Fp2 { a: s[2], b: s[3] })
    }

    /// Entrywise reduction of a monomial matrix.
    pub fn map_monomial(&self, ops: &MonomialOps, m: &Monomial) -> PiMatrix {
        let mut g = PiMatrix { a: fc::m3_zero(), b: fc::m3_zero() };
        for i in 0..3 {
            let (a, b) = self.map(&ops.units[m.u[i] as usize]);
            let j = m.perm[i] as usize;
            g.a[i][j] = a;
            g.b[i][j] = b;
        }
        g
    }

    /// Multiplicativity on all pairs of the given elements.
    pub fn is_multiplicative_on(&self, xs: &[Quat]) -> bool {
        let k = Fp2Field::new(self.p).expect("prime");
        xs.iter().all(|x| {
            xs.iter().all(|y| {
                let (a1, b1) = self.map(x);
                let (a2, b2) = self.map(y);
                let lhs = self.map(&self.order.mul(x, y));
                lhs == (k.mul(a1, a2), k.add(k.mul(b1, a2), k.mul(k.conj(a1), b2)))
            })
        })
    }

    /// Units reducing to 1.
    pub fn unit_kernel(&self) -> Vec<Quat> {
        self.order.units().into_iter().filter(|x| self.map(x) == (Fp2::ONE, Fp2::ZERO)).collect()
    }
}

/// Elements of `U(3, O)` whose reduction lies in `G_M`.
pub fn aut_polarised(
    ctx: &FieldCtx,
    x: &StratumPoint,
    red: &Reduction,
    u3o: &FiniteGroup<MonomialOps>,
) -> Result<FiniteGroup<MonomialOps>, GroupError> {
    if ctx.p() != red.p {
        return Err(GroupError::UnsupportedPrime(ctx.p()));
    }
    let oracle = MembershipOracle::new(ctx, x)?;
    let ops = u3o.ops();
    let k = ctx.fp2();
    let images: Vec<PiMatrix> = u3o.elements().iter().map(|h| red.map_monomial(ops, h)).collect();
    // Elements differing by the reduction kernel share an image; test each image once.
    let distinct: Vec<PiMatrix> = images.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let verdicts: Vec<Result<bool, GroupError>> = distinct
        .par_iter()
        .map(|g| {
            if !g.in_g_m2(k) {
                return Err(GroupError::OracleDisagreement(format!("{g:?} lies outside G_M2")));
            }
            oracle.check(g)
        })
        .collect();
    let mut inside = BTreeSet::new();
    for (g, v) in distinct.iter().zip(verdicts) {
        if v? {
            inside.insert(*g);
        }
    }
    let els = u3o.elements().iter().zip(&images).filter(|(_, g)| inside.contains(*g)).map(|(h, _)| *h).collect();
    FiniteGroup::new(ops.clone(), els)
}

/// Elements of `U(3, O)` with trivial reduction.
pub fn reduction_kernel(red: &Reduction, u3o: &FiniteGroup<MonomialOps>) -> Result<FiniteGroup<MonomialOps>, GroupError> {
    let ops = u3o.ops();
    let id = PiMatrix::identity();
    let els: Vec<Monomial> = u3o.elements().iter().filter(|h| red.map_monomial(ops, h) == id).copied().collect();
    FiniteGroup::new(ops.clone(), els)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_units() {
        let e24 = quaternion_unit_group(QuatOrder::O2).unwrap();
        assert_eq!(e24.order(), 24);
        assert_eq!(e24.group_type().name, "SL(2,3)");
        let t12 = quaternion_unit_group(QuatOrder::O3).unwrap();
        assert_eq!(t12.order(), 12);
        assert_eq!(t12.group_type().name, "C3 ⋊ C4");
        let a4 = unit_group_mod_sign(QuatOrder::O2).unwrap();
        assert_eq!((a4.order(), a4.group_type().name.as_str()), (12, "A4"));
        let s3 = unit_group_mod_sign(QuatOrder::O3).unwrap();
        assert_eq!(s3.group_type().name, "S3");
    }

    #[test]
    fn reduction_p2() {
        let red = reduction_mod_p_embedding(QuatOrder::O2).unwrap();
        let units = QuatOrder::O2.units();
        assert!(red.is_multiplicative_on(&units));
        assert_eq!(red.unit_kernel(), vec![[-2, 0, 0, 0], [2, 0, 0, 0]]);
        // (i + j)² = −2 ≡ 0
        let ij = [0, 2, 2, 0];
        assert_eq!(QuatOrder::O2.mul(&ij, &ij), [-4, 0, 0, 0]);
        let red3 = reduction_mod_p_embedding(QuatOrder::O3).unwrap();
        assert!(red3.is_multiplicative_on(&QuatOrder::O3.units()));
    }

    #[test]
    fn small_unitary_perm_groups() {
        let g = unitary_perm_group(QuatOrder::O2, 1).unwrap();
        assert_eq!(g.order(), 24);
        let g = unitary_perm_group(QuatOrder::O3, 2).unwrap();
        assert_eq!(g.order(), 12 * 12 * 2);
    }

    #[test]
    fn abelian_names() {
        let hist = BTreeMap::from([(1, 1), (2, 7)]);
        assert_eq!(name_abelian(&abelian_invariants(&hist, 8)), "C2^3");
        let hist = BTreeMap::from([(1, 1), (2, 7), (3, 2), (6, 14)]);
        assert_eq!(name_abelian(&abelian_invariants(&hist, 24)), "C2^3 x C3");
        assert_eq!(name_abelian(&abelian_invariants(&BTreeMap::from([(1, 1)]), 1)), "C1");
        let c4c2 = BTreeMap::from([(1, 1), (2, 3), (4, 4)]);
        assert_eq!(name_abelian(&abelian_invariants(&c4c2, 8)), "C4 x C2");
    }
}
