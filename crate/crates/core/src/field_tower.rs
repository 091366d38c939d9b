//! Finite fields `F_{p^{2m}}` in a fixed power basis.
//!
//! A [`FieldCtx`] owns the modulus, the Frobenius tables, a primitive
//! element and a copy of `F_{p^2}` (as [`Fp2`]) embedded inside the working
//! field. Elements are small `Copy` values tagged with `(p, 2m)`; since the
//! modulus is a deterministic function of `(p, 2m)` the tag identifies the
//! field completely.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::nt;

/// Largest supported extension degree over `F_p`.
pub const MAX_TWO_M: usize = 32;
/// Default bound on `m` (so `2m <= 24`).
pub const DEFAULT_MAX_M: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    CompositeP(u64),
    #[error("extension degree 2m = {two_m} exceeds the bound {bound}")]
    DegreeOverflow { two_m: u64, bound: u64 },
    #[error("elements belong to different fields")]
    ContextMismatch,
    #[error("zero has no nonzero n-th roots")]
    ZeroRadicand,
    #[error("exponent must be positive")]
    InvalidExponent,
    #[error("malformed field element: {0}")]
    Parse(String),
}

/// An element of `F_{p^{2m}}`: coefficients in the power basis, low degree first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    tag: u32,
    c: [u8; MAX_TWO_M],
}

impl FieldElem {
    pub fn coeffs(&self, two_m: usize) -> &[u8] {
        &self.c[..two_m]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// `(p, 2m)` of the owning field.
    pub fn field_tag(&self) -> (u32, u32) {
        (self.tag >> 8, self.tag & 0xff)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = (self.tag & 0xff) as usize;
        write!(f, "{:?}", &self.c[..n])
    }
}

/// An element `a + b·γ` of `F_{p^2}`, where `γ` is a root of the
/// lexicographically smallest monic irreducible quadratic over `F_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Fp2 {
    pub a: u8,
    pub b: u8,
}

impl fmt::Debug for Fp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}g", self.a, self.b)
    }
}

impl Fp2 {
    pub const ZERO: Fp2 = Fp2 { a: 0, b: 0 };
    pub const ONE: Fp2 = Fp2 { a: 1, b: 0 };

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }
}

/// Arithmetic in `F_{p^2} = F_p[γ]/(γ² + c1·γ + c0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp2Field {
    p: u32,
    c0: u32,
    c1: u32,
}

impl Fp2Field {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if !nt::is_prime(p as u64) {
            return Err(FieldError::CompositeP(p as u64));
        }
        let q = smallest_irreducible(p, 2);
        Ok(Fp2Field { p, c0: q[0], c1: q[1] })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Coefficients `(c0, c1)` of the defining quadratic.
    pub fn modulus(&self) -> (u32, u32) {
        (self.c0, self.c1)
    }

    pub fn from_int(&self, v: i64) -> Fp2 {
        Fp2 { a: v.rem_euclid(self.p as i64) as u8, b: 0 }
    }

    #[inline]
    pub fn add(&self, x: Fp2, y: Fp2) -> Fp2 {
        let p = self.p;
        Fp2 {
            a: ((x.a as u32 + y.a as u32) % p) as u8,
            b: ((x.b as u32 + y.b as u32) % p) as u8,
        }
    }

    #[inline]
    pub fn neg(&self, x: Fp2) -> Fp2 {
        let p = self.p;
        Fp2 { a: ((p - x.a as u32) % p) as u8, b: ((p - x.b as u32) % p) as u8 }
    }

    #[inline]
    pub fn sub(&self, x: Fp2, y: Fp2) -> Fp2 {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: Fp2, y: Fp2) -> Fp2 {
        let p = self.p;
        let (a1, b1, a2, b2) = (x.a as u32, x.b as u32, y.a as u32, y.b as u32);
        // γ² = -c1 γ - c0
        let bb = b1 * b2 % p;
        let a = (a1 * a2 + bb * ((p - self.c0) % p)) % p;
        let b = (a1 * b2 + a2 * b1 + bb * ((p - self.c1) % p)) % p;
        Fp2 { a: a as u8, b: b as u8 }
    }

    pub fn scale(&self, k: u32, x: Fp2) -> Fp2 {
        let p = self.p;
        Fp2 { a: (k % p * x.a as u32 % p) as u8, b: (k % p * x.b as u32 % p) as u8 }
    }

    /// The `p`-power Frobenius `x ↦ x̄`.
    #[inline]
    pub fn conj(&self, x: Fp2) -> Fp2 {
        // γ^p = -c1 - γ
        let p = self.p;
        let a = (x.a as u32 + (p - x.b as u32 * self.c1 % p)) % p;
        Fp2 { a: a as u8, b: ((p - x.b as u32) % p) as u8 }
    }

    pub fn frob(&self, x: Fp2, e: i64) -> Fp2 {
        if e.rem_euclid(2) == 0 {
            x
        } else {
            self.conj(x)
        }
    }

    /// `x·x̄`, an element of `F_p`.
    pub fn norm(&self, x: Fp2) -> u32 {
        let n = self.mul(x, self.conj(x));
        debug_assert_eq!(n.b, 0);
        n.a as u32
    }

    pub fn inv(&self, x: Fp2) -> Option<Fp2> {
        if x.is_zero() {
            return None;
        }
        let n = self.norm(x);
        let ninv = pow_u32(n, self.p - 2, self.p);
        Some(self.scale(ninv, self.conj(x)))
    }

    pub fn pow(&self, x: Fp2, mut e: u64) -> Fp2 {
        let mut r = Fp2::ONE;
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn size(&self) -> usize {
        (self.p * self.p) as usize
    }

    /// Element with index `i = a + b·p`.
    pub fn from_index(&self, i: usize) -> Fp2 {
        let p = self.p as usize;
        Fp2 { a: (i % p) as u8, b: (i / p) as u8 }
    }

    pub fn index(&self, x: Fp2) -> usize {
        x.a as usize + x.b as usize * self.p as usize
    }

    /// All `p²` elements, by index.
    pub fn elements(&self) -> Vec<Fp2> {
        (0..self.size()).map(|i| self.from_index(i)).collect()
    }
}

fn pow_u32(b: u32, mut e: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = b as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

// ---------- polynomials over F_p (low degree first) ----------

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let df = f.len() - 1;
    let lead_inv = pow_u32(f[df], p - 2, p);
    while r.len() > df {
        let k = r.len() - 1;
        let c = r[k] * lead_inv % p;
        for i in 0..=df {
            let idx = k - df + i;
            r[idx] = (r[idx] + p - c * f[i] % p) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, f, p)
}

fn poly_powmod(a: &[u32], mut e: u64, f: &[u32], p: u32) -> Vec<u32> {
    let mut r = vec![1u32];
    let mut b = poly_rem(a, f, p);
    while e > 0 {
        if e & 1 == 1 {
            r = poly_mulmod(&r, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    r
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Irreducibility of a monic `f` of degree `n` over `F_p`: `gcd(x^{p^d} - x, f) = 1`
/// for every proper divisor `d` of `n`, and `x^{p^n} ≡ x`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = vec![0u32, 1];
    let mut h = x.clone();
    for k in 1..=n {
        h = poly_powmod(&h, p as u64, f, p);
        if k < n && n % k == 0 {
            let mut hx = h.clone();
            hx.resize(hx.len().max(2), 0);
            hx[1] = (hx[1] + p - 1) % p;
            poly_trim(&mut hx);
            let g = poly_gcd(&hx, f, p);
            if g.len() > 1 {
                return false;
            }
        }
    }
    let mut hx = h;
    poly_trim(&mut hx);
    hx == x
}

/// The lexicographically smallest monic irreducible polynomial of degree `n`
/// over `F_p`, coefficients compared from the constant term upwards.
pub fn smallest_irreducible(p: u32, n: usize) -> Vec<u32> {
    let mut coeffs = vec![0u32; n];
    coeffs[0] = 1;
    loop {
        let mut f = coeffs.clone();
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
        // advance: last coefficient is the least significant digit
        let mut i = n - 1;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            assert!(i > 0, "no irreducible polynomial found");
            i -= 1;
        }
    }
}

// ---------- the working field ----------

/// The finite field `F_{p^{2m}}`.
pub struct FieldCtx {
    p: u32,
    two_m: usize,
    tag: u32,
    modulus: Vec<u32>,
    red: Vec<(usize, u32)>,
    order: u128,
    group_factors: Vec<(u64, u32)>,
    // frob[e][j] = (x^j)^(p^e)
    frob: Vec<Vec<[u8; MAX_TWO_M]>>,
    primitive: FieldElem,
    fp2: Fp2Field,
    gamma: FieldElem,
    coord_inv: Vec<Vec<u32>>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{{{}^{}}} mod {:?}", self.p, self.two_m, self.modulus)
    }
}

/// Builds `F_{p^{2m}}` with the default bound `m <= 12`.
pub fn make_field(p: u64, m: u32) -> Result<FieldCtx, FieldError> {
    make_field_bounded(p, m, DEFAULT_MAX_M)
}

pub fn make_field_bounded(p: u64, m: u32, max_m: u32) -> Result<FieldCtx, FieldError> {
    if !nt::is_prime(p) {
        return Err(FieldError::CompositeP(p));
    }
    let two_m = 2 * m as u64;
    let bound = 2 * max_m.min((MAX_TWO_M / 2) as u32) as u64;
    if m == 0 || two_m > bound || p > 251 {
        return Err(FieldError::DegreeOverflow { two_m, bound });
    }
    // p^m must fit comfortably in 63 bits for the group-order factorisation.
    if (m as f64) * (p as f64).log2() > 62.0 {
        return Err(FieldError::DegreeOverflow { two_m, bound });
    }
    FieldCtx::build(p as u32, two_m as usize)
}

impl FieldCtx {
    fn build(p: u32, n: usize) -> Result<Self, FieldError> {
        let modulus = smallest_irreducible(p, n);
        let red = (0..n)
            .filter(|&i| modulus[i] != 0)
            .map(|i| (i, (p - modulus[i]) % p))
            .collect();
        let order = (p as u128).pow(n as u32);
        let group_factors = nt::factor_prime_power_minus_one(p as u64, n as u32);
        let fp2 = Fp2Field::new(p)?;
        let tag = (p << 8) | n as u32;
        let mut ctx = FieldCtx {
            p,
            two_m: n,
            tag,
            modulus,
            red,
            order,
            group_factors,
            frob: Vec::new(),
            primitive: FieldElem { tag, c: [0; MAX_TWO_M] },
            fp2,
            gamma: FieldElem { tag, c: [0; MAX_TWO_M] },
            coord_inv: Vec::new(),
        };
        ctx.build_frobenius();
        ctx.primitive = ctx.find_primitive();
        ctx.gamma = ctx.find_gamma();
        ctx.coord_inv = ctx.build_coord_inverse();
        Ok(ctx)
    }

    fn build_frobenius(&mut self) {
        let n = self.two_m;
        let x = self.gen();
        let xp = self.pow(&x, self.p as u128);
        let mut tables = Vec::with_capacity(n);
        // e = 0
        let mut img = xp;
        let mut base = x;
        for _e in 0..n {
            let mut row = Vec::with_capacity(n);
            let mut acc = self.one();
            for _j in 0..n {
                row.push(acc.c);
                acc = self.mul(&acc, &base);
            }
            tables.push(row);
            base = img;
            img = self.pow(&img, self.p as u128);
        }
        self.frob = tables;
    }

    fn find_primitive(&self) -> FieldElem {
        let mut i: u128 = 1;
        loop {
            let a = self.elem_from_index(i);
            if self.multiplicative_order(&a) == self.order - 1 {
                return a;
            }
            i += 1;
        }
    }

    fn find_gamma(&self) -> FieldElem {
        let (c0, c1) = self.fp2.modulus();
        let h = self.pow(&self.primitive, (self.order - 1) / (self.p as u128 * self.p as u128 - 1));
        let mut best: Option<FieldElem> = None;
        let mut z = self.one();
        for _ in 0..(self.p * self.p - 1) {
            // z² + c1 z + c0
            let v = self.add(&self.add(&self.mul(&z, &z), &self.scale(c1, &z)), &self.from_int(c0 as i64));
            if v.is_zero() && best.map_or(true, |b| z < b) {
                best = Some(z);
            }
            z = self.mul(&z, &h);
        }
        best.expect("quadratic subfield must contain a root")
    }

    fn build_coord_inverse(&self) -> Vec<Vec<u32>> {
        let n = self.two_m;
        let m = n / 2;
        let p = self.p;
        // columns: x^j (j < m), then γ x^j
        let mut cols: Vec<FieldElem> = Vec::with_capacity(n);
        let x = self.gen();
        let mut xj = self.one();
        for _ in 0..m {
            cols.push(xj);
            xj = self.mul(&xj, &x);
        }
        for j in 0..m {
            cols.push(self.mul(&self.gamma, &cols[j]));
        }
        let mat: Vec<Vec<u32>> = (0..n)
            .map(|r| (0..n).map(|c| cols[c].c[r] as u32).collect())
            .collect();
        invert_mod_p(&mat, p).expect("power basis over the quadratic subfield")
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn two_m(&self) -> usize {
        self.two_m
    }

    /// Degree over `F_{p^2}`.
    pub fn m(&self) -> u32 {
        (self.two_m / 2) as u32
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn fp2(&self) -> &Fp2Field {
        &self.fp2
    }

    /// The image of `γ` (the generator of [`Fp2`]) in this field.
    pub fn gamma(&self) -> FieldElem {
        self.gamma
    }

    pub fn group_order_factors(&self) -> &[(u64, u32)] {
        &self.group_factors
    }

    pub fn check(&self, a: &FieldElem) -> Result<(), FieldError> {
        if a.tag == self.tag {
            Ok(())
        } else {
            Err(FieldError::ContextMismatch)
        }
    }

    #[inline]
    fn assert_same(&self, a: &FieldElem) {
        assert!(a.tag == self.tag, "field element used with a different field");
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { tag: self.tag, c: [0; MAX_TWO_M] }
    }

    pub fn one(&self) -> FieldElem {
        self.from_int(1)
    }

    /// The power-basis generator `x`.
    pub fn gen(&self) -> FieldElem {
        let mut e = self.zero();
        if self.two_m == 1 {
            e.c[0] = ((self.p - self.modulus[0]) % self.p) as u8;
        } else {
            e.c[1] = 1;
        }
        e
    }

    pub fn from_int(&self, v: i64) -> FieldElem {
        let mut e = self.zero();
        e.c[0] = v.rem_euclid(self.p as i64) as u8;
        e
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem, FieldError> {
        if coeffs.len() > self.two_m {
            return Err(FieldError::Parse(format!(
                "{} coefficients for a field of degree {}",
                coeffs.len(),
                self.two_m
            )));
        }
        let mut e = self.zero();
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= self.p {
                return Err(FieldError::Parse(format!("coefficient {c} not reduced mod {}", self.p)));
            }
            e.c[i] = c as u8;
        }
        Ok(e)
    }

    /// Element number `i` in canonical order (lexicographic, constant term first).
    pub fn elem_from_index(&self, mut i: u128) -> FieldElem {
        let mut e = self.zero();
        for k in (0..self.two_m).rev() {
            e.c[k] = (i % self.p as u128) as u8;
            i /= self.p as u128;
        }
        e
    }

    pub fn index_of(&self, a: &FieldElem) -> u128 {
        a.c[..self.two_m].iter().fold(0u128, |acc, &d| acc * self.p as u128 + d as u128)
    }

    /// All field elements in canonical order (small fields only).
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.order).map(move |i| self.elem_from_index(i))
    }

    #[inline]
    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.assert_same(a);
        self.assert_same(b);
        let p = self.p as u16;
        let mut r = self.zero();
        for i in 0..self.two_m {
            let s = a.c[i] as u16 + b.c[i] as u16;
            r.c[i] = if s >= p { (s - p) as u8 } else { s as u8 };
        }
        r
    }

    #[inline]
    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        self.assert_same(a);
        let p = self.p as u16;
        let mut r = self.zero();
        for i in 0..self.two_m {
            r.c[i] = ((p - a.c[i] as u16) % p) as u8;
        }
        r
    }

    #[inline]
    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, k: u32, a: &FieldElem) -> FieldElem {
        self.assert_same(a);
        let p = self.p;
        let k = k % p;
        let mut r = self.zero();
        for i in 0..self.two_m {
            r.c[i] = (a.c[i] as u32 * k % p) as u8;
        }
        r
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.assert_same(a);
        self.assert_same(b);
        let n = self.two_m;
        let p = self.p;
        let mut acc = [0u32; 2 * MAX_TWO_M];
        for i in 0..n {
            let ai = a.c[i] as u32;
            if ai == 0 {
                continue;
            }
            for j in 0..n {
                acc[i + j] += ai * b.c[j] as u32;
            }
        }
        for k in (n..2 * n - 1).rev() {
            let c = acc[k] % p;
            if c != 0 {
                for &(i, nm) in &self.red {
                    acc[k - n + i] += c * nm;
                }
            }
        }
        let mut r = self.zero();
        for i in 0..n {
            r.c[i] = (acc[i] % p) as u8;
        }
        r
    }

    pub fn square(&self, a: &FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &FieldElem, e: u128) -> FieldElem {
        let mut r = self.one();
        let mut b = *a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        r
    }

    /// `a^{p^e}`; negative `e` is read modulo `2m`, so `p^{-1}` acts as `p^{2m-1}`.
    pub fn frob(&self, a: &FieldElem, e: i64) -> FieldElem {
        self.assert_same(a);
        let n = self.two_m;
        let e = e.rem_euclid(n as i64) as usize;
        if e == 0 {
            return *a;
        }
        let p = self.p;
        let table = &self.frob[e];
        let mut acc = [0u32; MAX_TWO_M];
        for j in 0..n {
            let aj = a.c[j] as u32;
            if aj == 0 {
                continue;
            }
            let img = &table[j];
            for i in 0..n {
                acc[i] = (acc[i] + aj * img[i] as u32) % p;
            }
        }
        let mut r = self.zero();
        for i in 0..n {
            r.c[i] = acc[i] as u8;
        }
        r
    }

    /// Checked Frobenius.
    pub fn frobenius(&self, a: &FieldElem, e: i64) -> Result<FieldElem, FieldError> {
        self.check(a)?;
        Ok(self.frob(a, e))
    }

    /// Multiplicative inverse via the norm to `F_p`.
    pub fn inv(&self, a: &FieldElem) -> Option<FieldElem> {
        self.assert_same(a);
        if a.is_zero() {
            return None;
        }
        // a^{r-1} with r = (q-1)/(p-1) is the product of the conjugates a^{p^k}, k >= 1
        let mut t = self.one();
        for k in 1..self.two_m as i64 {
            t = self.mul(&t, &self.frob(a, k));
        }
        let norm = self.mul(&t, a);
        debug_assert!(norm.c[1..].iter().all(|&x| x == 0));
        let ninv = pow_u32(norm.c[0] as u32, self.p - 2, self.p);
        Some(self.scale(ninv, &t))
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Option<FieldElem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// Order of `a` in the multiplicative group.
    pub fn multiplicative_order(&self, a: &FieldElem) -> u128 {
        assert!(!a.is_zero());
        let mut ord = self.order - 1;
        for &(r, _) in &self.group_factors {
            let r = r as u128;
            while ord % r == 0 && self.pow(a, ord / r) == self.one() {
                ord /= r;
            }
        }
        ord
    }

    pub fn primitive_element(&self) -> FieldElem {
        self.primitive
    }

    /// Degree of `a` over `F_{p^2}`: the least `d` with `a^{p^{2d}} = a`.
    pub fn element_degree(&self, a: &FieldElem) -> u32 {
        let m = self.m();
        for d in nt::divisors(m) {
            if self.frob(a, 2 * d as i64) == *a {
                return d;
            }
        }
        unreachable!("frob^(2m) is the identity")
    }

    pub fn in_fp2(&self, a: &FieldElem) -> bool {
        self.frob(a, 2) == *a
    }

    /// Coordinates of `a` over `F_{p^2}` in the basis `1, x, …, x^{m-1}`.
    pub fn fp2_coords(&self, a: &FieldElem) -> Vec<Fp2> {
        self.assert_same(a);
        let n = self.two_m;
        let m = n / 2;
        let p = self.p;
        let mut v = vec![0u32; n];
        for (r, row) in self.coord_inv.iter().enumerate() {
            let mut s = 0u32;
            for c in 0..n {
                s = (s + row[c] * a.c[c] as u32) % p;
            }
            v[r] = s;
        }
        (0..m).map(|j| Fp2 { a: v[j] as u8, b: v[m + j] as u8 }).collect()
    }

    /// Image of an `F_{p^2}` element in this field.
    pub fn embed(&self, x: Fp2) -> FieldElem {
        let a = self.from_int(x.a as i64);
        self.add(&a, &self.scale(x.b as u32, &self.gamma))
    }

    /// Inverse of [`FieldCtx::embed`] on the subfield.
    pub fn to_fp2(&self, a: &FieldElem) -> Option<Fp2> {
        let c = self.fp2_coords(a);
        c[1..].iter().all(|x| x.is_zero()).then(|| c[0])
    }

    /// All `x` with `x^n = a`, sorted canonically. Zero has the single root zero.
    pub fn nth_roots(&self, a: &FieldElem, n: u64) -> Result<Vec<FieldElem>, FieldError> {
        self.check(a)?;
        if n == 0 {
            return Err(FieldError::InvalidExponent);
        }
        if a.is_zero() {
            return Ok(vec![self.zero()]);
        }
        self.nonzero_nth_roots(a, n)
    }

    /// As [`FieldCtx::nth_roots`] but rejects a zero radicand.
    pub fn nonzero_nth_roots(&self, a: &FieldElem, n: u64) -> Result<Vec<FieldElem>, FieldError> {
        self.check(a)?;
        if n == 0 {
            return Err(FieldError::InvalidExponent);
        }
        if a.is_zero() {
            return Err(FieldError::ZeroRadicand);
        }
        let big_n = self.order - 1;
        let g = nt::gcd_u128(n as u128, big_n);
        if self.pow(a, big_n / g) != self.one() {
            return Ok(Vec::new());
        }
        let y = self.gth_root(a, g);
        let (_, e, _) = nt::ext_gcd(n as i128, big_n as i128);
        let e = e.rem_euclid(big_n as i128) as u128;
        let x = self.pow(&y, e);
        debug_assert_eq!(self.pow(&x, n as u128), *a);
        let zeta = self.pow(&self.primitive, big_n / g);
        let mut roots = Vec::with_capacity(g as usize);
        let mut r = x;
        for _ in 0..g {
            roots.push(r);
            r = self.mul(&r, &zeta);
        }
        roots.sort();
        Ok(roots)
    }

    /// A `g`-th root of `a`, where `g | q-1` and `a` is a `g`-th power.
    fn gth_root(&self, a: &FieldElem, g: u128) -> FieldElem {
        let big_n = self.order - 1;
        let mut result = self.one();
        let mut rest = big_n;
        for &(r, s) in &self.group_factors {
            let r = r as u128;
            let rr = r.pow(s);
            if g % r != 0 {
                continue;
            }
            rest /= rr;
            let cof = big_n / rr;
            let idem = (cof % big_n) * nt::inv_mod(cof % rr, rr).unwrap() % big_n;
            let a_r = self.pow(a, idem);
            let z = self.pow(&self.primitive, cof);
            let l = self.sylow_log(&a_r, &z, r, s);
            let mut v = 0;
            let mut gg = g;
            while gg % r == 0 {
                gg /= r;
                v += 1;
            }
            let rv = r.pow(v);
            debug_assert_eq!(l % rv, 0);
            let k = (l / rv) % rr * nt::inv_mod(gg % rr, rr).unwrap() % rr;
            result = self.mul(&result, &self.pow(&z, k));
        }
        if rest > 1 {
            let cof = big_n / rest;
            let idem = (cof % big_n) * nt::inv_mod(cof % rest, rest).unwrap() % big_n;
            let a_t = self.pow(a, idem);
            let k = nt::inv_mod(g % rest, rest).unwrap();
            result = self.mul(&result, &self.pow(&a_t, k));
        }
        result
    }

    /// Discrete log of `h` to base `z`, where `z` has order `r^s`, by base-`r` digits.
    fn sylow_log(&self, h: &FieldElem, z: &FieldElem, r: u128, s: u32) -> u128 {
        let rr = r.pow(s);
        let base = self.pow(z, rr / r);
        let zinv = self.inv(z).unwrap();
        let mut l = 0u128;
        let mut rk = 1u128;
        for k in 0..s {
            let cur = self.mul(h, &self.pow(&zinv, l));
            let t = self.pow(&cur, rr / r.pow(k + 1));
            let mut acc = self.one();
            let mut digit = None;
            for d in 0..r {
                if acc == t {
                    digit = Some(d);
                    break;
                }
                acc = self.mul(&acc, &base);
            }
            l += digit.expect("element lies in the Sylow subgroup") * rk;
            rk *= r;
        }
        l
    }

    // ---------- serialisation ----------

    pub fn to_json(&self, a: &FieldElem) -> ElemJson {
        ElemJson {
            p: self.p,
            two_m: self.two_m as u32,
            coeffs: a.c[..self.two_m].iter().map(|&c| c as u32).collect(),
        }
    }

    pub fn from_json(&self, j: &ElemJson) -> Result<FieldElem, FieldError> {
        if j.p != self.p || j.two_m as usize != self.two_m {
            return Err(FieldError::ContextMismatch);
        }
        self.from_coeffs(&j.coeffs)
    }

    /// Parses `{"p":…,"two_m":…,"coeffs":[…]}`, `gen^k`, `gen`, or an integer.
    pub fn parse_elem(&self, s: &str) -> Result<FieldElem, FieldError> {
        let s = s.trim();
        if s.starts_with('{') {
            let j: ElemJson = serde_json::from_str(s).map_err(|e| FieldError::Parse(e.to_string()))?;
            return self.from_json(&j);
        }
        self.parse_value(&serde_json::Value::String(s.to_string()))
    }

    pub fn parse_value(&self, v: &serde_json::Value) -> Result<FieldElem, FieldError> {
        match v {
            serde_json::Value::Object(_) => {
                let j: ElemJson =
                    serde_json::from_value(v.clone()).map_err(|e| FieldError::Parse(e.to_string()))?;
                self.from_json(&j)
            }
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(|k| self.from_int(k))
                .ok_or_else(|| FieldError::Parse(n.to_string())),
            serde_json::Value::String(s) => {
                let s = s.trim();
                if s == "gen" {
                    return Ok(self.primitive);
                }
                if let Some(k) = s.strip_prefix("gen^") {
                    let k: u128 = k.trim().parse().map_err(|_| FieldError::Parse(s.to_string()))?;
                    return Ok(self.pow(&self.primitive, k % (self.order - 1)));
                }
                if s.starts_with('{') {
                    return self.parse_elem(s);
                }
                s.parse::<i64>()
                    .map(|k| self.from_int(k))
                    .map_err(|_| FieldError::Parse(s.to_string()))
            }
            other => Err(FieldError::Parse(other.to_string())),
        }
    }
}

/// Wire format of a field element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElemJson {
    pub p: u32,
    pub two_m: u32,
    pub coeffs: Vec<u32>,
}

/// Inverse of a square matrix over `F_p`.
pub fn invert_mod_p(mat: &[Vec<u32>], p: u32) -> Option<Vec<Vec<u32>>> {
    let n = mat.len();
    let mut a: Vec<Vec<u32>> = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        let inv = pow_u32(a[col][col], p - 2, p);
        for x in a[col].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..2 * n {
                    a[r][c] = (a[r][c] + p - f * a[col][c] % p) % p;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields() {
        let f4 = make_field(2, 1).unwrap();
        assert_eq!(f4.order(), 4);
        assert_eq!(f4.multiplicative_order(&f4.primitive_element()), 3);
        let f9 = make_field(3, 1).unwrap();
        assert_eq!(f9.multiplicative_order(&f9.primitive_element()), 8);
        let f = make_field(3, 3).unwrap();
        assert_eq!(f.order(), 729);
    }

    #[test]
    fn errors() {
        assert_eq!(make_field(4, 1).unwrap_err(), FieldError::CompositeP(4));
        assert!(matches!(make_field(2, 13), Err(FieldError::DegreeOverflow { .. })));
        let a = make_field(2, 1).unwrap();
        let b = make_field(2, 2).unwrap();
        assert_eq!(a.frobenius(&b.one(), 1), Err(FieldError::ContextMismatch));
    }

    #[test]
    fn moduli_are_smallest() {
        assert_eq!(smallest_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(smallest_irreducible(3, 2), vec![1, 0, 1]);
        // every lexicographically smaller monic sextic over F_2 is reducible
        let f = smallest_irreducible(2, 6);
        let key = |c: &[u32]| c.iter().fold(0u64, |acc, &d| acc * 2 + d as u64);
        for k in 0..key(&f[..6]) {
            let mut c: Vec<u32> = (0..6).rev().map(|i| ((k >> i) & 1) as u32).collect();
            c.push(1);
            assert!(!is_irreducible(&c, 2));
        }
    }

    #[test]
    fn frobenius_by_squaring() {
        let f = make_field(2, 3).unwrap();
        let g = f.primitive_element();
        assert_eq!(f.frob(&g, 2), f.pow(&g, 4));
        assert_eq!(f.frob(&f.frob(&g, -1), 1), g);
        assert_eq!(f.frob(&g, 0), g);
    }

    #[test]
    fn cube_roots_of_omega() {
        let f4 = make_field(2, 1).unwrap();
        let w = f4.primitive_element();
        assert!(f4.nth_roots(&w, 3).unwrap().is_empty());
        let f64_ = make_field(2, 3).unwrap();
        let w = f64_.embed(Fp2 { a: 0, b: 1 });
        let roots = f64_.nth_roots(&w, 3).unwrap();
        assert_eq!(roots.len(), 3);
        // exhaustive scan agrees
        let scan: Vec<_> = f64_.elements().filter(|x| f64_.pow(x, 3) == w).collect();
        let mut sorted = scan;
        sorted.sort();
        assert_eq!(sorted, roots);
    }

    #[test]
    fn degrees() {
        let f = make_field(2, 3).unwrap();
        assert_eq!(f.element_degree(&f.primitive_element()), 3);
        assert_eq!(f.element_degree(&f.embed(Fp2 { a: 1, b: 1 })), 1);
        let f = make_field(3, 4).unwrap();
        assert_eq!(f.element_degree(&f.primitive_element()), 4);
    }

    #[test]
    fn primitive_order_check() {
        let f = make_field(2, 3).unwrap();
        let g = f.primitive_element();
        for d in [1u128, 3, 7, 9, 21] {
            assert_ne!(f.pow(&g, d), f.one());
        }
        assert_eq!(f.pow(&g, 63), f.one());
        // smallest in canonical order
        for i in 1..f.index_of(&g) {
            let a = f.elem_from_index(i);
            assert!(f.multiplicative_order(&a) < 63);
        }
    }

    #[test]
    fn subfield_coordinates() {
        let f = make_field(3, 3).unwrap();
        let k = f.fp2();
        for x in k.elements() {
            let e = f.embed(x);
            assert!(f.in_fp2(&e));
            assert_eq!(f.to_fp2(&e), Some(x));
            for y in k.elements() {
                assert_eq!(f.mul(&e, &f.embed(y)), f.embed(k.mul(x, y)));
            }
            assert_eq!(f.frob(&e, 1), f.embed(k.conj(x)));
        }
    }

    #[test]
    fn parse_forms() {
        let f = make_field(2, 3).unwrap();
        let g = f.primitive_element();
        assert_eq!(f.parse_elem("gen^2").unwrap(), f.mul(&g, &g));
        let j = serde_json::to_string(&f.to_json(&g)).unwrap();
        assert_eq!(f.parse_elem(&j).unwrap(), g);
        assert_eq!(f.parse_elem("1").unwrap(), f.one());
    }
}
