//! Fiber-preserving map data on a torus bundle M(A): validation, the case
//! table of normal forms, conjugation, MF and routing to a cellular model.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ClassifyError;
use crate::lattice::{kernel_basis, vec2, IntMatrix2, IntVec2};
use crate::oracle::ModelHomotopyParams;
use crate::ring::Endo;

/// Gluing matrix A, fiber matrix B and the translation (c1, c2) of
/// f(c) = a^c1 b^c2 c.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BundleMapData {
    pub a: IntMatrix2,
    pub b: IntMatrix2,
    #[serde(with = "crate::serde_util::bigint")]
    pub c1: BigInt,
    #[serde(with = "crate::serde_util::bigint")]
    pub c2: BigInt,
}

impl BundleMapData {
    pub fn new(a: IntMatrix2, b: IntMatrix2, c1: impl Into<BigInt>, c2: impl Into<BigInt>) -> Self {
        BundleMapData { a, b, c1: c1.into(), c2: c2.into() }
    }

    pub fn c(&self) -> IntVec2 {
        [self.c1.clone(), self.c2.clone()]
    }

    /// c1 (b4 - 1) - c2 b3, read off the entries as given.
    pub fn vanishing_form(&self) -> BigInt {
        &self.c1 * (&self.b.a22 - 1) - &self.c2 * &self.b.a12
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotInvertible {
        #[serde(with = "crate::serde_util::bigint")]
        det: BigInt,
    },
    NotCommuting,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotInvertible { det } => write!(f, "det A = {det}, expected 1 or -1"),
            Violation::NotCommuting => write!(f, "A and B do not commute"),
        }
    }
}

pub fn validate(d: &BundleMapData) -> Vec<Violation> {
    let mut out = Vec::new();
    if !d.a.is_unimodular() {
        out.push(Violation::NotInvertible { det: d.a.det() });
    }
    if d.a.mul(&d.b) != d.b.mul(&d.a) {
        out.push(Violation::NotCommuting);
    }
    out
}

pub fn fiber_deformable(b: &IntMatrix2) -> bool {
    b.minus_identity().det().is_zero()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
    V,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
            Case::V => "V",
        };
        f.write_str(s)
    }
}

/// A case of the table together with a unimodular P putting (A, B) into
/// the case's normal form (P A P^-1, P B P^-1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseLabel {
    pub case: Case,
    pub normalizer: IntMatrix2,
}

/// (P A P^-1, P B P^-1, P c).
pub fn conjugate_data(d: &BundleMapData, p: &IntMatrix2) -> Result<BundleMapData, ClassifyError> {
    let inv = p.inverse().filter(|_| p.is_unimodular()).ok_or_else(|| ClassifyError::NotUnimodular(p.to_string()))?;
    let [c1, c2] = p.mul_vec(&d.c());
    Ok(BundleMapData { a: p.mul(&d.a).mul(&inv), b: p.mul(&d.b).mul(&inv), c1, c2 })
}

fn in_normal_form(d: &BundleMapData) -> bool {
    d.b.a11.is_one() && d.b.a21.is_zero() && d.a.a21.is_zero()
}

/// P with P v = e1 for a primitive v.
fn basis_change(v: &IntVec2) -> IntMatrix2 {
    let g = v[0].extended_gcd(&v[1]);
    // v[0] x + v[1] y = 1, so (v | (-y, x)) has determinant 1
    let (x, y) = if g.gcd.is_negative() { (-g.x, -g.y) } else { (g.x, g.y) };
    let q = IntMatrix2::from_columns(v, &vec2(-y, x));
    q.inverse().expect("determinant one")
}

pub fn classify(d: &BundleMapData) -> Result<CaseLabel, ClassifyError> {
    let violations = validate(d);
    if !violations.is_empty() {
        let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(ClassifyError::Invalid(msg.join("; ")));
    }
    if d.b.is_identity() {
        return Ok(CaseLabel { case: Case::I, normalizer: IntMatrix2::identity() });
    }
    if !fiber_deformable(&d.b) {
        return Err(ClassifyError::NoMatch(format!("det(B - I) = {} is nonzero", d.b.minus_identity().det())));
    }
    let p = if in_normal_form(d) {
        IntMatrix2::identity()
    } else {
        // B != I with det(B - I) = 0: the eigenvalue-1 eigenspace is a line,
        // and A maps it to itself since A commutes with B.
        let kernel = kernel_basis(&Endo::from_matrix(&d.b));
        basis_change(&kernel.basis[0])
    };
    let n = conjugate_data(d, &p)?;
    debug_assert!(in_normal_form(&n));
    let one = BigInt::one();
    let case = match (n.a.a11 == one, n.a.a22 == one) {
        (true, true) => Case::II,
        (true, false) => Case::III,
        (false, false) => Case::IV,
        (false, true) => Case::V,
    };
    Ok(CaseLabel { case, normalizer: p })
}

/// How far the closed form for MF is backed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    /// Case I, where MF = 0.
    CaseOne,
    /// Normal form conjugate to one of the families with a computed MF.
    ListedFamily,
    /// Case II/III outside the listed families, but c1(b4-1) - c2 b3 = 0,
    /// which is exactly the fixed point free criterion.
    Vanishing,
    /// Case II/III outside the listed families; no value.
    FamilyNotListed,
    /// Cases IV and V.
    NotCovered,
}

impl Coverage {
    pub fn describe(&self) -> &'static str {
        match self {
            Coverage::CaseOne => "case I",
            Coverage::ListedFamily => "formula per listed families",
            Coverage::Vanishing => "case matched, family not listed; vanishing criterion holds",
            Coverage::FamilyNotListed => "case matched, family not listed",
            Coverage::NotCovered => "not covered",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MfEvaluation {
    pub label: CaseLabel,
    pub normalized: BundleMapData,
    #[serde(with = "crate::serde_util::bigint")]
    pub vanishing_form: BigInt,
    #[serde(with = "option_bigint")]
    pub mf: Option<BigInt>,
    pub coverage: Coverage,
}

mod option_bigint {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "crate::serde_util::bigint")] BigInt);

    pub fn serialize<S: Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        x.clone().map(W).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

/// Whether normalized case II/III data is conjugate, by some (1 m; 0 1), to a
/// listed family. Those conjugations move b3 by multiples of b4 - 1 and a3 by
/// multiples of 2.
fn listed(case: Case, n: &BundleMapData) -> bool {
    let b3 = &n.b.a12;
    let b4m1: BigInt = &n.b.a22 - 1;
    let minus_one = n.b.a22 == BigInt::from(-1);
    match case {
        Case::II => minus_one || (!b4m1.is_zero() && b3.is_multiple_of(&b4m1)),
        Case::III => minus_one || n.a.a12.is_even(),
        _ => false,
    }
}

pub fn evaluate_mf(d: &BundleMapData) -> Result<MfEvaluation, ClassifyError> {
    let label = classify(d)?;
    let normalized = conjugate_data(d, &label.normalizer)?;
    let form = normalized.vanishing_form();
    let (mf, coverage) = match label.case {
        Case::I => (Some(BigInt::zero()), Coverage::CaseOne),
        Case::II | Case::III if listed(label.case, &normalized) => (Some(form.abs()), Coverage::ListedFamily),
        Case::II | Case::III if form.is_zero() => (Some(BigInt::zero()), Coverage::Vanishing),
        Case::II | Case::III => (None, Coverage::FamilyNotListed),
        Case::IV | Case::V => (None, Coverage::NotCovered),
    };
    Ok(MfEvaluation { label, normalized, vanishing_form: form, mf, coverage })
}

/// MF_{S^1}[f] where the closed form applies; None for cases IV/V, for
/// unlisted families with a nonzero form, and for invalid data.
pub fn mf_number(d: &BundleMapData) -> Option<BigInt> {
    evaluate_mf(d).ok().and_then(|e| e.mf)
}

/// Conjugation from the input data to a model homotopy's normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Routing {
    /// Total conjugator, normalizer included.
    pub conjugator: IntMatrix2,
    pub data: BundleMapData,
    pub params: ModelHomotopyParams,
}

/// Square model for B = (1 0; 0 b4) with b4 != 1, triangulated model for
/// B = (1 1; 0 -1). Returns None for case I, IV, V and unlisted families.
pub fn route_model(d: &BundleMapData) -> Result<Option<Routing>, ClassifyError> {
    let eval = evaluate_mf(d)?;
    if eval.coverage != Coverage::ListedFamily {
        return Ok(None);
    }
    let n = &eval.normalized;
    let b3 = &n.b.a12;
    let b4 = &n.b.a22;
    let b4m1 = b4 - 1;
    let (shift, square) = if b3.is_multiple_of(&b4m1) {
        (-(b3 / &b4m1), true)
    } else {
        // b4 = -1 and b3 = 2k + 1
        ((b3 - 1) / 2, false)
    };
    let p = IntMatrix2::new(1, shift, 0, 1);
    let data = conjugate_data(n, &p)?;
    let params = if square {
        ModelHomotopyParams::square(data.c1.clone(), data.c2.clone(), b4.clone())
    } else {
        ModelHomotopyParams::triangulated(data.c1.clone(), data.c2.clone())
    };
    debug_assert_eq!(data.b, params.fiber_matrix());
    Ok(Some(Routing { conjugator: p.mul(&eval.label.normalizer), data, params }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    A,
    B,
    C,
}

/// lhs = a^a_exp b^b_exp in pi_1(M(A)); lhs is [a,b] or c g c^-1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub conjugated: Option<Generator>,
    #[serde(with = "crate::serde_util::bigint")]
    pub a_exp: BigInt,
    #[serde(with = "crate::serde_util::bigint")]
    pub b_exp: BigInt,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = match self.conjugated {
            None => return write!(f, "[a,b] = 1"),
            Some(Generator::A) => "a",
            Some(Generator::B) => "b",
            Some(Generator::C) => "c",
        };
        write!(f, "c{g}c^-1 = {}", word(&self.a_exp, &self.b_exp))
    }
}

fn word(a: &BigInt, b: &BigInt) -> String {
    let pow = |g: &str, e: &BigInt| {
        if e.is_one() {
            g.to_string()
        } else {
            format!("{g}^{e}")
        }
    };
    match (a.is_zero(), b.is_zero()) {
        (true, true) => "1".into(),
        (false, true) => pow("a", a),
        (true, false) => pow("b", b),
        (false, false) => format!("{}{}", pow("a", a), pow("b", b)),
    }
}

pub fn pi1_relations(a: &IntMatrix2) -> Vec<Relation> {
    vec![
        Relation { conjugated: None, a_exp: BigInt::zero(), b_exp: BigInt::zero() },
        Relation { conjugated: Some(Generator::A), a_exp: a.a11.clone(), b_exp: a.a21.clone() },
        Relation { conjugated: Some(Generator::B), a_exp: a.a12.clone(), b_exp: a.a22.clone() },
    ]
}

/// Whether f(a) = a^b1 b^b2, f(b) = a^b3 b^b4, f(c) = a^c1 b^c2 c respects
/// the relations. The fiber group is abelian and conjugation by f(c) acts on
/// it like conjugation by c, so f(c g c^-1) has exponents A B e_g while
/// f(a^i b^j) has B (i, j).
pub fn respects_relations(d: &BundleMapData) -> bool {
    pi1_relations(&d.a).iter().all(|r| {
        let g = match r.conjugated {
            None => return true,
            Some(Generator::A) => vec2(1, 0),
            Some(Generator::B) => vec2(0, 1),
            Some(Generator::C) => return true,
        };
        d.a.mul_vec(&d.b.mul_vec(&g)) == d.b.mul_vec(&[r.a_exp.clone(), r.b_exp.clone()])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> IntMatrix2 {
        IntMatrix2::new(a, b, c, d)
    }

    #[test]
    fn validation_examples() {
        assert!(validate(&BundleMapData::new(m(1, 0, 0, 1), m(1, 0, 0, 3), 0, 0)).is_empty());
        assert_eq!(validate(&BundleMapData::new(m(1, 1, 0, 1), m(0, 1, 1, 0), 0, 0)), vec![Violation::NotCommuting]);
        assert_eq!(
            validate(&BundleMapData::new(m(2, 0, 0, 1), m(1, 0, 0, 1), 0, 0)),
            vec![Violation::NotInvertible { det: BigInt::from(2) }]
        );
    }

    #[test]
    fn deformable_fibers() {
        assert!(fiber_deformable(&m(1, 5, 0, 3)));
        assert!(fiber_deformable(&IntMatrix2::identity()));
        assert!(!fiber_deformable(&m(2, 0, 0, 2)));
    }

    #[test]
    fn table_examples() {
        let l = classify(&BundleMapData::new(m(1, 0, 0, 1), m(1, 0, 0, 3), 0, 0)).unwrap();
        assert_eq!(l, CaseLabel { case: Case::II, normalizer: IntMatrix2::identity() });
        // 2 (b4 - 1) = -2 b3
        let l = classify(&BundleMapData::new(m(1, 2, 0, -1), m(1, -2, 0, 3), 0, 0)).unwrap();
        assert_eq!(l.case, Case::III);
        let l = classify(&BundleMapData::new(m(1, 1, 0, 1), IntMatrix2::identity(), 0, 0)).unwrap();
        assert_eq!(l.case, Case::I);
        let l = classify(&BundleMapData::new(m(-1, 0, 0, -1), m(1, 0, 0, 2), 0, 0)).unwrap();
        assert_eq!(l.case, Case::IV);
        let l = classify(&BundleMapData::new(m(-1, 0, 0, 1), m(1, 0, 0, 2), 0, 0)).unwrap();
        assert_eq!(l.case, Case::V);
    }

    #[test]
    fn classify_errors() {
        let bad = BundleMapData::new(m(1, 1, 0, 1), m(0, 1, 1, 0), 0, 0);
        assert!(matches!(classify(&bad), Err(ClassifyError::Invalid(_))));
        let hyperbolic = BundleMapData::new(m(1, 0, 0, 1), m(2, 1, 1, 1), 0, 0);
        assert!(matches!(classify(&hyperbolic), Err(ClassifyError::NoMatch(_))));
    }

    #[test]
    fn normalizer_from_lower_triangular_data() {
        // B = (3 0; 5 1) fixes e2
        let d = BundleMapData::new(m(1, 0, 0, 1), m(3, 0, 5, 1), 1, 1);
        let l = classify(&d).unwrap();
        let n = conjugate_data(&d, &l.normalizer).unwrap();
        assert!(l.normalizer.is_unimodular());
        assert!(in_normal_form(&n));
        assert_eq!(n.b.a22, BigInt::from(3));
    }

    #[test]
    fn conjugation_examples() {
        let d = BundleMapData::new(m(1, 0, 0, 1), m(1, 6, 0, 4), 5, 2);
        assert_eq!(conjugate_data(&d, &IntMatrix2::identity()).unwrap(), d);
        // b3 = n (b4 - 1) with n = 2
        let e = conjugate_data(&d, &m(1, -2, 0, 1)).unwrap();
        assert_eq!(e.b, m(1, 0, 0, 4));
        assert_eq!(e.c1, BigInt::from(5 - 2 * 2));
        // b3 = 2k + 1 with k = 2
        let d = BundleMapData::new(m(1, 5, 0, -1), m(1, 5, 0, -1), 1, 1);
        let e = conjugate_data(&d, &m(1, 2, 0, 1)).unwrap();
        assert_eq!(e.b, m(1, 1, 0, -1));
        assert!(matches!(conjugate_data(&d, &m(2, 0, 0, 1)), Err(ClassifyError::NotUnimodular(_))));
    }

    #[test]
    fn mf_examples() {
        let d = BundleMapData::new(m(1, 0, 0, 1), m(1, 0, 0, 2), 3, 7);
        assert_eq!(mf_number(&d), Some(BigInt::from(3)));
        let d = BundleMapData::new(m(1, 1, 0, 1), IntMatrix2::identity(), 3, 7);
        assert_eq!(mf_number(&d), Some(BigInt::zero()));
        let d = BundleMapData::new(m(1, 1, 0, -1), m(1, 1, 0, -1), 1, 1);
        let e = evaluate_mf(&d).unwrap();
        assert_eq!((e.label.case, e.mf), (Case::III, Some(BigInt::from(3))));
        let d = BundleMapData::new(m(-1, 0, 0, -1), m(1, 0, 0, 2), 1, 0);
        assert_eq!(evaluate_mf(&d).unwrap().coverage, Coverage::NotCovered);
        assert_eq!(mf_number(&d), None);
    }

    #[test]
    fn unlisted_family() {
        // case II with b4 = 1, b3 = 2: no listed family
        let d = BundleMapData::new(m(1, 0, 0, 1), m(1, 2, 0, 1), 1, 1);
        let e = evaluate_mf(&d).unwrap();
        assert_eq!((e.label.case, e.coverage, e.mf), (Case::II, Coverage::FamilyNotListed, None));
        let d = BundleMapData::new(m(1, 0, 0, 1), m(1, 2, 0, 1), 1, 0);
        assert_eq!(evaluate_mf(&d).unwrap().coverage, Coverage::Vanishing);
        // case III with a3 odd, b4 = 3: b3 = -a3 (b4 - 1) / 2 = -1
        let d = BundleMapData::new(m(1, 1, 0, -1), m(1, -1, 0, 3), 1, 1);
        assert_eq!(evaluate_mf(&d).unwrap().coverage, Coverage::FamilyNotListed);
    }

    #[test]
    fn routing() {
        let d = BundleMapData::new(m(1, 0, 0, 1), m(1, 6, 0, 4), 5, 2);
        let r = route_model(&d).unwrap().unwrap();
        assert_eq!(r.params, ModelHomotopyParams::square(1, 2, 4));
        let d = BundleMapData::new(m(1, 5, 0, -1), m(1, 5, 0, -1), 1, 1);
        let r = route_model(&d).unwrap().unwrap();
        assert_eq!(r.params, ModelHomotopyParams::triangulated(3, 1));
        assert_eq!(conjugate_data(&d, &r.conjugator).unwrap(), r.data);
        let d = BundleMapData::new(m(1, 0, 0, 1), m(1, 2, 0, 1), 1, 1);
        assert_eq!(route_model(&d).unwrap(), None);
    }

    #[test]
    fn relations() {
        let r = pi1_relations(&IntMatrix2::identity());
        let s: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["[a,b] = 1", "cac^-1 = a", "cbc^-1 = b"]);
        assert_eq!(pi1_relations(&m(1, 2, 0, -1))[2].to_string(), "cbc^-1 = a^2b^-1");
        assert!(respects_relations(&BundleMapData::new(IntMatrix2::identity(), m(1, 0, 0, 3), 4, -9)));
        assert!(!respects_relations(&BundleMapData::new(m(1, 1, 0, 1), m(0, 1, 1, 0), 0, 0)));
    }
}
