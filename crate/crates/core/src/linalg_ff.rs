//! Dense linear algebra over the working field and over `F_{p^2}`.

use crate::field_tower::{FieldCtx, FieldElem, Fp2, Fp2Field};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, not square")]
    NonSquare { rows: usize, cols: usize },
    #[error("elements belong to different fields")]
    ContextMismatch,
    #[error("zero vector")]
    ZeroVector,
}

/// Minimal field interface shared by [`FieldCtx`] and [`Fp2Field`].
pub trait Field {
    type E: Copy + PartialEq + std::fmt::Debug;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Option<Self::E>;
    fn is_zero(&self, a: &Self::E) -> bool;
}

impl Field for FieldCtx {
    type E = FieldElem;
    fn zero(&self) -> FieldElem {
        FieldCtx::zero(self)
    }
    fn one(&self) -> FieldElem {
        FieldCtx::one(self)
    }
    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldCtx::add(self, a, b)
    }
    fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldCtx::sub(self, a, b)
    }
    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldCtx::mul(self, a, b)
    }
    fn inv(&self, a: &FieldElem) -> Option<FieldElem> {
        FieldCtx::inv(self, a)
    }
    fn is_zero(&self, a: &FieldElem) -> bool {
        a.is_zero()
    }
}

impl Field for Fp2Field {
    type E = Fp2;
    fn zero(&self) -> Fp2 {
        Fp2::ZERO
    }
    fn one(&self) -> Fp2 {
        Fp2::ONE
    }
    fn add(&self, a: &Fp2, b: &Fp2) -> Fp2 {
        Fp2Field::add(self, *a, *b)
    }
    fn sub(&self, a: &Fp2, b: &Fp2) -> Fp2 {
        Fp2Field::sub(self, *a, *b)
    }
    fn mul(&self, a: &Fp2, b: &Fp2) -> Fp2 {
        Fp2Field::mul(self, *a, *b)
    }
    fn inv(&self, a: &Fp2) -> Option<Fp2> {
        Fp2Field::inv(self, *a)
    }
    fn is_zero(&self, a: &Fp2) -> bool {
        a.is_zero()
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Copy> Mat<E> {
    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_cols(cols: &[Vec<E>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for col in cols {
                data.push(col[i]);
            }
        }
        Mat { rows: r, cols: c, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> E {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<E> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_cols(&(0..self.rows).map(|i| self.row(i)).collect::<Vec<_>>())
    }
}

pub fn identity<F: Field>(f: &F, n: usize) -> Mat<F::E> {
    let mut m = Mat { rows: n, cols: n, data: vec![f.zero(); n * n] };
    for i in 0..n {
        m.set(i, i, f.one());
    }
    m
}

pub fn mat_mul<F: Field>(f: &F, a: &Mat<F::E>, b: &Mat<F::E>) -> Mat<F::E> {
    assert_eq!(a.cols, b.rows, "shape mismatch");
    let mut out = Mat { rows: a.rows, cols: b.cols, data: vec![f.zero(); a.rows * b.cols] };
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if f.is_zero(&aik) {
                continue;
            }
            for j in 0..b.cols {
                let v = f.add(&out.get(i, j), &f.mul(&aik, &b.get(k, j)));
                out.set(i, j, v);
            }
        }
    }
    out
}

pub fn mat_vec<F: Field>(f: &F, a: &Mat<F::E>, v: &[F::E]) -> Vec<F::E> {
    assert_eq!(a.cols, v.len());
    (0..a.rows)
        .map(|i| (0..a.cols).fold(f.zero(), |acc, j| f.add(&acc, &f.mul(&a.get(i, j), &v[j]))))
        .collect()
}

/// Determinant together with the inverse when it exists.
pub type DetInverse<E> = (E, Option<Mat<E>>);

/// Determinant and (when it exists) inverse, by Gauss-Jordan elimination with
/// first-nonzero pivoting.
pub fn det_and_inverse<F: Field>(f: &F, m: &Mat<F::E>) -> Result<DetInverse<F::E>, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NonSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a: Vec<Vec<F::E>> = (0..n).map(|i| m.row(i)).collect();
    let mut inv: Vec<Vec<F::E>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect())
        .collect();
    let mut det = f.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !f.is_zero(&a[r][col])) else {
            return Ok((f.zero(), None));
        };
        if piv != col {
            a.swap(piv, col);
            inv.swap(piv, col);
            det = f.sub(&f.zero(), &det);
        }
        let pv = a[col][col];
        det = f.mul(&det, &pv);
        let pinv = f.inv(&pv).expect("nonzero pivot");
        for j in 0..n {
            a[col][j] = f.mul(&a[col][j], &pinv);
            inv[col][j] = f.mul(&inv[col][j], &pinv);
        }
        for r in 0..n {
            if r == col || f.is_zero(&a[r][col]) {
                continue;
            }
            let factor = a[r][col];
            for j in 0..n {
                let x = f.mul(&factor, &a[col][j]);
                a[r][j] = f.sub(&a[r][j], &x);
                let y = f.mul(&factor, &inv[col][j]);
                inv[r][j] = f.sub(&inv[r][j], &y);
            }
        }
    }
    Ok((det, Some(Mat::from_rows(inv))))
}

pub fn det<F: Field>(f: &F, m: &Mat<F::E>) -> Result<F::E, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NonSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a: Vec<Vec<F::E>> = (0..n).map(|i| m.row(i)).collect();
    let mut det = f.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !f.is_zero(&a[r][col])) else {
            return Ok(f.zero());
        };
        if piv != col {
            a.swap(piv, col);
            det = f.sub(&f.zero(), &det);
        }
        let pv = a[col][col];
        det = f.mul(&det, &pv);
        let pinv = f.inv(&pv).expect("nonzero pivot");
        for r in col + 1..n {
            if f.is_zero(&a[r][col]) {
                continue;
            }
            let factor = f.mul(&a[r][col], &pinv);
            for j in col..n {
                let x = f.mul(&factor, &a[col][j]);
                a[r][j] = f.sub(&a[r][j], &x);
            }
        }
    }
    Ok(det)
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref<F: Field>(f: &F, rows: &mut [Vec<F::E>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(piv) = (r..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, piv);
        let pinv = f.inv(&rows[r][c]).unwrap();
        for j in 0..ncols {
            rows[r][j] = f.mul(&rows[r][j], &pinv);
        }
        for i in 0..rows.len() {
            if i != r && !f.is_zero(&rows[i][c]) {
                let factor = rows[i][c];
                for j in 0..ncols {
                    let x = f.mul(&factor, &rows[r][j]);
                    rows[i][j] = f.sub(&rows[i][j], &x);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{x : M x = 0}` for `M` given by its rows.
pub fn nullspace<F: Field>(f: &F, rows: &[Vec<F::E>], ncols: usize) -> Vec<Vec<F::E>> {
    let mut a = rows.to_vec();
    let pivots = rref(f, &mut a, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); ncols];
            v[fc] = f.one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.sub(&f.zero(), &a[i][fc]);
            }
            v
        })
        .collect()
}

/// Solves `M x = b`; returns one solution if consistent.
pub fn solve<F: Field>(f: &F, rows: &[Vec<F::E>], b: &[F::E], ncols: usize) -> Option<Vec<F::E>> {
    let mut aug: Vec<Vec<F::E>> = rows
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut x = r.clone();
            x.push(bi);
            x
        })
        .collect();
    let pivots = rref(f, &mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![f.zero(); ncols];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[i][ncols];
    }
    Some(x)
}

/// Rank over `F_{p^2}` of a family of elements, with a basis of relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubfieldRank {
    pub rank: usize,
    /// Each relation `r` satisfies `Σ r_i v_i = 0`.
    pub relations: Vec<Vec<Fp2>>,
}

/// Coordinate matrix (rows = `F_{p^2}`-coordinates, columns = vectors).
fn coordinate_rows(ctx: &FieldCtx, vectors: &[FieldElem]) -> Vec<Vec<Fp2>> {
    let m = ctx.m() as usize;
    let coords: Vec<Vec<Fp2>> = vectors.iter().map(|v| ctx.fp2_coords(v)).collect();
    (0..m).map(|i| coords.iter().map(|c| c[i]).collect()).collect()
}

pub fn rank_over_subfield(ctx: &FieldCtx, vectors: &[FieldElem]) -> Result<SubfieldRank, LinalgError> {
    for v in vectors {
        ctx.check(v).map_err(|_| LinalgError::ContextMismatch)?;
    }
    let rows = coordinate_rows(ctx, vectors);
    let relations = nullspace(ctx.fp2(), &rows, vectors.len());
    Ok(SubfieldRank { rank: vectors.len() - relations.len(), relations })
}

/// Rank only (cheaper bookkeeping than [`rank_over_subfield`]).
pub fn subfield_rank(ctx: &FieldCtx, vectors: &[FieldElem]) -> usize {
    let mut rows = coordinate_rows(ctx, vectors);
    rref(ctx.fp2(), &mut rows, vectors.len()).len()
}

/// Writes `target` as an `F_{p^2}`-combination of `vectors`, if possible.
pub fn solve_over_subfield(ctx: &FieldCtx, vectors: &[FieldElem], target: &FieldElem) -> Option<Vec<Fp2>> {
    let rows = coordinate_rows(ctx, vectors);
    let b = ctx.fp2_coords(target);
    solve(ctx.fp2(), &rows, &b, vectors.len())
}

/// A 3×3 matrix over `F_{p^2}`.
pub type M3 = [[Fp2; 3]; 3];

/// `F_{p^2}`-basis of `{A ∈ Mat_3(F_{p^2}) : (A·t) × t = 0}`.
pub fn solve_parallel_condition(ctx: &FieldCtx, t: &[FieldElem; 3]) -> Result<Vec<M3>, LinalgError> {
    for x in t {
        ctx.check(x).map_err(|_| LinalgError::ContextMismatch)?;
    }
    if t.iter().all(|x| x.is_zero()) {
        return Err(LinalgError::ZeroVector);
    }
    // unknown a_{kj} at index 3k + j; (A t)_k = Σ_j a_{kj} t_j.
    // cross product component i: (At)_{i+1} t_{i+2} - (At)_{i+2} t_{i+1}
    let m = ctx.m() as usize;
    let mut rows: Vec<Vec<Fp2>> = Vec::new();
    for i in 0..3 {
        let (k1, k2) = ((i + 1) % 3, (i + 2) % 3);
        let mut coef = vec![ctx.zero(); 9];
        for j in 0..3 {
            coef[3 * k1 + j] = ctx.add(&coef[3 * k1 + j], &ctx.mul(&t[j], &t[k2]));
            coef[3 * k2 + j] = ctx.sub(&coef[3 * k2 + j], &ctx.mul(&t[j], &t[k1]));
        }
        let coords: Vec<Vec<Fp2>> = coef.iter().map(|c| ctx.fp2_coords(c)).collect();
        for r in 0..m {
            rows.push(coords.iter().map(|c| c[r]).collect());
        }
    }
    let basis = nullspace(ctx.fp2(), &rows, 9);
    Ok(basis
        .into_iter()
        .map(|v| {
            let mut a = [[Fp2::ZERO; 3]; 3];
            for k in 0..3 {
                for j in 0..3 {
                    a[k][j] = v[3 * k + j];
                }
            }
            a
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::make_field;

    #[test]
    fn identity_and_singular() {
        let f = make_field(2, 1).unwrap();
        let id = identity(&f, 3);
        let (d, inv) = det_and_inverse(&f, &id).unwrap();
        assert_eq!(d, f.one());
        assert_eq!(inv.unwrap(), id);
        let w = f.primitive_element();
        let sing = Mat::from_rows(vec![vec![w, f.one()], vec![f.mul(&w, &w), w]]);
        let (d, inv) = det_and_inverse(&f, &sing).unwrap();
        assert!(d.is_zero() && inv.is_none());
        let rect = Mat::from_rows(vec![vec![w, w]]);
        assert!(matches!(det_and_inverse(&f, &rect), Err(LinalgError::NonSquare { .. })));
    }

    #[test]
    fn subfield_ranks() {
        let f = make_field(2, 3).unwrap();
        let g = f.primitive_element();
        let g2 = f.mul(&g, &g);
        assert_eq!(rank_over_subfield(&f, &[f.one(), g, g2]).unwrap().rank, 3);
        let lam = f.embed(Fp2 { a: 0, b: 1 });
        let r = rank_over_subfield(&f, &[f.one(), g, f.mul(&g, &lam)]).unwrap();
        assert_eq!(r.rank, 2);
        for rel in &r.relations {
            let vs = [f.one(), g, f.mul(&g, &lam)];
            let s = rel.iter().zip(&vs).fold(f.zero(), |acc, (c, v)| f.add(&acc, &f.mul(&f.embed(*c), v)));
            assert!(s.is_zero());
        }
    }
}
