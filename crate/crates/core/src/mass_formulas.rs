//! Closed-form masses, local indices, group orders and class numbers, all in
//! exact rational arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::nt;
use crate::strata::{A1Case, StratumLabel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MassError {
    #[error("c = {c} is outside 0..=floor(g/2) for g = {g}")]
    BadC { g: u32, c: u32 },
    #[error("label {label} does not occur at p = {p}")]
    IllegalLabel { p: u32, label: String },
    #[error("outside the hypotheses of the closed form: {0}")]
    OutOfHypotheses(String),
    #[error("expected an integer, got {0}")]
    NonIntegral(String),
}

/// An exact positive rational, always in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MassValue(pub BigRational);

impl MassValue {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        MassValue(BigRational::new(num, den))
    }

    pub fn from_int(n: i64) -> Self {
        MassValue(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }
}

impl fmt::Display for MassValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MassRepr {
    num: String,
    den: String,
}

impl Serialize for MassValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MassRepr { num: self.numer().to_string(), den: self.denom().to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MassValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MassRepr::deserialize(d)?;
        let num: BigInt = r.num.parse().map_err(serde::de::Error::custom)?;
        let den: BigInt = r.den.parse().map_err(serde::de::Error::custom)?;
        if den.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(MassValue::new(num, den))
    }
}

/// Serde adapter writing big integers as decimal strings.
pub mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

fn pw(p: u32, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// `p^e ± 1` style factors.
fn pe(p: u32, e: u32, s: i64) -> BigInt {
    pw(p, e) + int(s)
}

/// `e(p)`: 0 at `p = 2`, 1 otherwise.
pub fn e_p(p: u32) -> u32 {
    u32::from(p != 2)
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * int((n - i) as i64) / int((i + 1) as i64);
    }
    r
}

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b = vec![BigRational::one()];
    for m in 1..=n {
        let mut s = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += rat(binomial(m + 1, k)) * bk;
        }
        b.push(-s / rat(int(m as i64 + 1)));
    }
    b
}

/// `ζ(1 - 2i) = -B_{2i} / (2i)`.
pub fn zeta_neg_odd(i: u32) -> BigRational {
    assert!(i >= 1);
    let b = bernoulli_numbers(2 * i as usize);
    -b[2 * i as usize].clone() / rat(int(2 * i as i64))
}

/// Mass of the superspecial genus `Λ_{g,p^c}`.
pub fn mass_superspecial(g: u32, c: u32, p: u32) -> Result<MassValue, MassError> {
    if c > g / 2 {
        return Err(MassError::BadC { g, c });
    }
    let sign = if (g * (g + 1) / 2) % 2 == 0 { 1 } else { -1 };
    let mut m = rat(int(sign)) / rat(pw(2, g));
    for i in 1..=g {
        m *= zeta_neg_odd(i);
    }
    for i in 1..=(g - 2 * c) {
        m *= rat(pe(p, i, if i % 2 == 0 { 1 } else { -1 }));
    }
    for i in 1..=c {
        m *= rat(pe(p, 4 * i - 2, -1));
    }
    let prod = |n: u32| (1..=n).fold(BigInt::one(), |acc, i| acc * pe(p, 2 * i, -1));
    m = m * rat(prod(g)) / rat(prod(2 * c) * prod(g - 2 * c));
    Ok(MassValue(m))
}

/// `2^{10}·3^4·5·7`, the common denominator of the threefold masses.
pub fn g3_denominator() -> BigInt {
    int(2903040)
}

/// `L_p`: the numerator over [`g3_denominator`] of a stratum mass.
pub fn l_p(p: u32, label: &StratumLabel) -> Result<BigRational, MassError> {
    check_label(p, label)?;
    let half = |x: BigInt| rat(x) / rat(pw(2, e_p(p)));
    let l = match *label {
        StratumLabel::A3 => rat(pe(p, 1, -1) * pe(p, 2, 1) * pe(p, 3, -1)),
        StratumLabel::A2F4MinusF2 => rat(pe(p, 1, -1) * pe(p, 3, 1) * pe(p, 3, -1) * (pw(p, 4) - pw(p, 2))),
        StratumLabel::A2Generic => half(pe(p, 1, -1) * pe(p, 3, 1) * pe(p, 3, -1) * pw(p, 2) * pe(p, 4, -1)),
        StratumLabel::A1 { d, case } => {
            let body = match case {
                A1Case::NotInD => half(pw(p, 2 * d) * pe(p, 2, -1) * pe(p, 4, -1) * pe(p, 6, -1)),
                A1Case::InDNotF6 => rat(pw(p, 2 * d) * pe(p, 1, -1) * pe(p, 4, -1) * pe(p, 6, -1)),
                A1Case::InDF6 => rat(pw(p, 6) * pe(p, 2, -1) * pe(p, 3, -1) * pe(p, 4, -1)),
            };
            body * rat(pw(p, 3))
        }
    };
    Ok(l)
}

fn check_label(p: u32, label: &StratumLabel) -> Result<(), MassError> {
    if label.is_legal(p) {
        Ok(())
    } else {
        Err(MassError::IllegalLabel { p, label: label.to_string() })
    }
}

/// Mass of the stratum containing a point with the given label.
pub fn mass_stratum_g3(p: u32, label: &StratumLabel) -> Result<MassValue, MassError> {
    Ok(MassValue(l_p(p, label)? / rat(g3_denominator())))
}

/// The genus a stratum mass is measured against: principal for a = 1 and 3,
/// non-principal for a = 2.
pub fn base_mass(p: u32, label: &StratumLabel) -> MassValue {
    let c = u32::from(label.a_number() == 2);
    mass_superspecial(3, c, p).expect("c <= 1")
}

/// Index `[Aut(base) : Aut(x)]` of a stratum over its base genus.
pub fn local_index_g3(p: u32, label: &StratumLabel) -> Result<BigInt, MassError> {
    check_label(p, label)?;
    let idx = match *label {
        StratumLabel::A3 => BigInt::one(),
        StratumLabel::A2F4MinusF2 => pw(p, 2) * pe(p, 2, -1),
        StratumLabel::A2Generic => pw(p, 2) * pe(p, 4, -1) / pw(2, e_p(p)),
        StratumLabel::A1 { d, case } => match case {
            A1Case::NotInD => {
                pw(p, 3 + 2 * d) * pe(p, 1, 1) * pe(p, 2, -1) * pe(p, 3, 1) / pw(2, e_p(p))
            }
            A1Case::InDNotF6 => pw(p, 3 + 2 * d) * pe(p, 2, -1) * pe(p, 3, 1),
            A1Case::InDF6 => pw(p, 9) * pe(p, 1, 1) * pe(p, 2, -1),
        },
    };
    Ok(idx)
}

/// Closed-form orders of the reduction groups for an a-number one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupOrders {
    #[serde(with = "bigint_string")]
    pub g_m2: BigInt,
    #[serde(with = "bigint_string")]
    pub g_m: BigInt,
    #[serde(with = "bigint_string")]
    pub ker_psi: BigInt,
}

pub fn g_m2_order(p: u32) -> BigInt {
    pw(p, 15) * pe(p, 1, 1) * pe(p, 2, -1) * pe(p, 3, 1)
}

pub fn formula_group_orders(p: u32, d: u32, case: A1Case) -> GroupOrders {
    let ker = pw(p, 2 * (6 - d));
    let g_m = match case {
        A1Case::NotInD => pw(2, e_p(p)) * &ker,
        A1Case::InDNotF6 => pe(p, 1, 1) * &ker,
        A1Case::InDF6 => pe(p, 3, 1) * pw(p, 6),
    };
    GroupOrders { g_m2: g_m2_order(p), g_m, ker_psi: ker }
}

/// `|U₃(F_p)| = p³(p+1)(p²−1)(p³+1)`.
pub fn unitary_order(p: u32) -> BigInt {
    pw(p, 3) * pe(p, 1, 1) * pe(p, 2, -1) * pe(p, 3, 1)
}

/// Class number of `B_{p,∞}` and, for `p ≥ 5`, the numbers of ideal classes
/// whose left orders have unit group `C₄` or `C₆`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNumbers {
    pub p: u32,
    pub h: i64,
    pub h_c4: Option<i64>,
    pub h_c6: Option<i64>,
}

pub fn quaternion_class_numbers(p: u32) -> Result<ClassNumbers, MassError> {
    let k3 = nt::kronecker(-3, p as u64) as i64;
    let k4 = nt::kronecker(-4, p as u64) as i64;
    let h = BigRational::new(int(p as i64 - 1), int(12))
        + BigRational::new(int(1 - k3), int(3))
        + BigRational::new(int(1 - k4), int(4));
    if !h.is_integer() {
        return Err(MassError::NonIntegral(h.to_string()));
    }
    let h = h.to_integer().try_into().expect("small");
    let (h_c4, h_c6) = if p >= 5 { (Some((1 - k4) / 2), Some((1 - k3) / 2)) } else { (None, None) };
    Ok(ClassNumbers { p, h, h_c4, h_c6 })
}

/// `|Λ_x|` on the generic stratum.
pub fn lambda_x_size(p: u32, d: u32) -> Result<BigInt, MassError> {
    let aut = match (p, d) {
        (2, 3) => 8,
        (2, _) => return Err(MassError::OutOfHypotheses("p = 2 forces d = 3".into())),
        (3, 6) => 2,
        (3, _) => return Err(MassError::OutOfHypotheses("p = 3 requires d = 6".into())),
        (_, 3..=6) => 2,
        _ => return Err(MassError::OutOfHypotheses(format!("d = {d} is outside 3..=6"))),
    };
    // |Λ_x| = |Aut| · Mass(Λ_x) with the mass of the generic stratum.
    let v = BigRational::new(
        int(aut) * pw(p, 3 + 2 * d) * pe(p, 2, -1) * pe(p, 4, -1) * pe(p, 6, -1),
        pw(2, e_p(p)) * g3_denominator(),
    );
    if !v.is_integer() {
        return Err(MassError::NonIntegral(v.to_string()));
    }
    Ok(v.to_integer())
}

/// `Σ 1/|Aut|` over a list of automorphism group orders.
pub fn mass_from_aut_orders(orders: &[u64]) -> MassValue {
    let s = orders.iter().fold(BigRational::zero(), |acc, &n| acc + BigRational::new(int(1), BigInt::from(n)));
    MassValue(s)
}

/// One row of the mass table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MassRow {
    pub label: StratumLabel,
    pub d: Option<u32>,
    pub in_d: Option<bool>,
    pub l_p: MassValue,
    pub mass: MassValue,
    #[serde(with = "bigint_string")]
    pub index: BigInt,
}

pub fn mass_table(p: u32) -> Vec<MassRow> {
    StratumLabel::legal(p)
        .into_iter()
        .map(|label| MassRow {
            d: label.d(),
            in_d: label.in_d(),
            l_p: MassValue(l_p(p, &label).expect("legal")),
            mass: mass_stratum_g3(p, &label).expect("legal"),
            index: local_index_g3(p, &label).expect("legal"),
            label,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> MassValue {
        MassValue::new(int(n), int(d))
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_neg_odd(1), BigRational::new(int(-1), int(12)));
        assert_eq!(zeta_neg_odd(2), BigRational::new(int(1), int(120)));
        assert_eq!(zeta_neg_odd(3), BigRational::new(int(-1), int(252)));
    }

    #[test]
    fn superspecial() {
        assert_eq!(mass_superspecial(3, 0, 2).unwrap(), q(1, 82944));
        assert_eq!(mass_superspecial(3, 1, 2).unwrap(), q(1, 46080));
        assert_eq!(mass_superspecial(3, 0, 3).unwrap(), q(13, 72576));
        assert!(matches!(mass_superspecial(3, 2, 2), Err(MassError::BadC { .. })));
        assert_eq!(mass_superspecial(1, 0, 5).unwrap(), q(1, 6));
    }

    #[test]
    fn strata_masses() {
        let generic2 = StratumLabel::A1 { d: 3, case: A1Case::NotInD };
        assert_eq!(mass_stratum_g3(2, &generic2).unwrap(), q(1, 2));
        assert_eq!(mass_stratum_g3(2, &StratumLabel::A3).unwrap(), q(1, 82944));
        assert_eq!(local_index_g3(2, &generic2).unwrap(), int(41472));
        let generic3 = StratumLabel::A1 { d: 6, case: A1Case::NotInD };
        assert_eq!(mass_stratum_g3(3, &generic3).unwrap(), q(3i64.pow(11) * 13, 2));
        assert_eq!(
            local_index_g3(2, &StratumLabel::A1 { d: 3, case: A1Case::InDF6 }).unwrap(),
            int(512 * 9)
        );
        assert!(mass_stratum_g3(2, &StratumLabel::A1 { d: 5, case: A1Case::NotInD }).is_err());
    }

    #[test]
    fn orders_and_classes() {
        assert_eq!(g_m2_order(2), int(2_654_208));
        assert_eq!(formula_group_orders(2, 3, A1Case::NotInD).g_m, int(64));
        assert_eq!(formula_group_orders(3, 6, A1Case::NotInD).ker_psi, int(1));
        assert_eq!(quaternion_class_numbers(11).unwrap().h, 2);
        let c13 = quaternion_class_numbers(13).unwrap();
        assert_eq!((c13.h, c13.h_c4, c13.h_c6), (1, Some(0), Some(0)));
        assert_eq!(lambda_x_size(2, 3).unwrap(), int(4));
        assert_eq!(lambda_x_size(3, 6).unwrap(), int(3i64.pow(11) * 13));
        assert!(lambda_x_size(5, 3).is_ok());
        assert!(lambda_x_size(3, 4).is_err());
    }

    #[test]
    fn serde_roundtrip() {
        let m = q(13, 72576);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"num":"13","den":"72576"}"#);
        assert_eq!(serde_json::from_str::<MassValue>(&s).unwrap(), m);
    }
}
