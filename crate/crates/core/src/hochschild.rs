//! Twisted Hochschild chains of ZG with coefficients in (ZG)^phi, where the
//! right action is m.g = m phi(g).
//!
//! * d1(g ⊗ m) = m phi(g) - g m
//! * d2(a ⊗ b ⊗ m) = b ⊗ m phi(a) - ab ⊗ m + a ⊗ bm
//!
//! The marker of g ⊗ m is gm (of a ⊗ b ⊗ m it is abm); both differentials
//! preserve semiconjugacy classes of markers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{HochschildError, ParseError};
use crate::lattice::{kernel_basis, same_class, vec2, SemiClass};
use crate::matrix::RingMatrix;
use crate::ring::{add_to_map, split_coefficient, split_signed_terms, write_signed_term, Endo, Monomial, RingElt};

/// Integer combination of pairs g ⊗ m.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain1 {
    terms: BTreeMap<(Monomial, Monomial), BigInt>,
}

/// Integer combination of triples g1 ⊗ g2 ⊗ m.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain2 {
    terms: BTreeMap<(Monomial, Monomial, Monomial), BigInt>,
}

impl Chain1 {
    pub fn zero() -> Self {
        Chain1::default()
    }

    pub fn term(c: impl Into<BigInt>, g: Monomial, m: Monomial) -> Self {
        let mut ch = Chain1::zero();
        ch.add_term(g, m, c.into());
        ch
    }

    /// Bilinear expansion of r ⊗ m.
    pub fn tensor(r: &RingElt, m: &RingElt) -> Self {
        let mut ch = Chain1::zero();
        for (g, a) in r.terms() {
            for (n, b) in m.terms() {
                ch.add_term(g.clone(), n.clone(), a * b);
            }
        }
        ch
    }

    pub fn add_term(&mut self, g: Monomial, m: Monomial, c: BigInt) {
        add_to_map(&mut self.terms, (g, m), c);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &Monomial, m: &Monomial) -> BigInt {
        self.terms.get(&(g.clone(), m.clone())).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &Chain1) -> Chain1 {
        let mut r = self.clone();
        r.add_assign(o, &BigInt::one());
        r
    }

    pub fn sub(&self, o: &Chain1) -> Chain1 {
        let mut r = self.clone();
        r.add_assign(o, &-BigInt::one());
        r
    }

    /// self += s * o
    pub fn add_assign(&mut self, o: &Chain1, s: &BigInt) {
        for ((g, m), c) in &o.terms {
            self.add_term(g.clone(), m.clone(), c * s);
        }
    }

    pub fn scale(&self, s: &BigInt) -> Chain1 {
        let mut r = Chain1::zero();
        r.add_assign(self, s);
        r
    }
}

impl Chain2 {
    pub fn zero() -> Self {
        Chain2::default()
    }

    pub fn term(c: impl Into<BigInt>, a: Monomial, b: Monomial, m: Monomial) -> Self {
        let mut ch = Chain2::zero();
        ch.add_term(a, b, m, c.into());
        ch
    }

    pub fn add_term(&mut self, a: Monomial, b: Monomial, m: Monomial, c: BigInt) {
        add_to_map(&mut self.terms, (a, b, m), c);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial, Monomial), &BigInt)> {
        self.terms.iter()
    }

    pub fn add_assign(&mut self, o: &Chain2, s: &BigInt) {
        for ((a, b, m), c) in &o.terms {
            self.add_term(a.clone(), b.clone(), m.clone(), c * s);
        }
    }
}

impl fmt::Display for Chain1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((g, m), c)) in self.terms.iter().enumerate() {
            let body = if c.abs().is_one() { format!("{g} ⊗ {m}") } else { format!("({g} ⊗ {m})") };
            write_signed_term(f, i == 0, c, &body, false)?;
        }
        Ok(())
    }
}

impl fmt::Display for Chain2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, b, m), c)) in self.terms.iter().enumerate() {
            let body = if c.abs().is_one() { format!("{a} ⊗ {b} ⊗ {m}") } else { format!("({a} ⊗ {b} ⊗ {m})") };
            write_signed_term(f, i == 0, c, &body, false)?;
        }
        Ok(())
    }
}

fn parse_tensor_terms(s: &str, arity: usize) -> Result<Vec<(BigInt, Vec<Monomial>)>, ParseError> {
    let s = s.trim();
    if s == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (negative, t) in split_signed_terms(s)? {
        // coefficients other than 1 are written "c (g ⊗ m)"
        let (c, inner) = match t.find('(') {
            Some(open) => {
                let inner = t[open + 1..].strip_suffix(')').ok_or_else(|| ParseError::new(&t, "unclosed bracket"))?;
                let head = t[..open].trim();
                let c = if head.is_empty() { BigInt::one() } else { split_coefficient(head)?.0 };
                (c, inner)
            }
            None => (BigInt::one(), t.as_str()),
        };
        let factors: Vec<&str> = inner.split('⊗').collect();
        if factors.len() != arity {
            return Err(ParseError::new(&t, format!("expected {arity} tensor factors")));
        }
        let monos = factors.iter().map(|f| f.parse::<Monomial>()).collect::<Result<Vec<_>, _>>()?;
        out.push((if negative { -c } else { c }, monos));
    }
    Ok(out)
}

impl FromStr for Chain1 {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut ch = Chain1::zero();
        for (c, mut ms) in parse_tensor_terms(s, 2)? {
            let m = ms.pop().unwrap();
            let g = ms.pop().unwrap();
            ch.add_term(g, m, c);
        }
        Ok(ch)
    }
}

impl FromStr for Chain2 {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut ch = Chain2::zero();
        for (c, mut ms) in parse_tensor_terms(s, 3)? {
            let m = ms.pop().unwrap();
            let b = ms.pop().unwrap();
            let a = ms.pop().unwrap();
            ch.add_term(a, b, m, c);
        }
        Ok(ch)
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Chain1);
string_serde!(Chain2);

pub fn d1(c: &Chain1, phi: &Endo) -> RingElt {
    let mut r = RingElt::zero();
    for ((g, m), a) in c.terms() {
        r.add_term(m.mul(&phi.apply_monomial(g)), a.clone());
        r.add_term(g.mul(m), -a);
    }
    r
}

pub fn d2(w: &Chain2, phi: &Endo) -> Chain1 {
    let mut r = Chain1::zero();
    for ((a, b, m), c) in w.terms() {
        r.add_term(b.clone(), m.mul(&phi.apply_monomial(a)), c.clone());
        r.add_term(a.mul(b), m.clone(), -c);
        r.add_term(a.clone(), b.mul(m), c.clone());
    }
    r
}

pub fn is_cycle(c: &Chain1, phi: &Endo) -> bool {
    d1(c, phi).is_zero()
}

/// Marker gm of g ⊗ m.
pub fn marker(g: &Monomial, m: &Monomial) -> Monomial {
    g.mul(m)
}

pub fn split_by_class(c: &Chain1, phi: &Endo) -> BTreeMap<SemiClass, Chain1> {
    let mut out: BTreeMap<SemiClass, Chain1> = BTreeMap::new();
    for ((g, m), a) in c.terms() {
        out.entry(SemiClass::of(&marker(g, m), phi)).or_default().add_term(g.clone(), m.clone(), a.clone());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorTrace {
    pub chain: Chain1,
    /// trace(AB) = trace(B phi(A))
    pub criterion_holds: bool,
}

/// sum_i sum_k A_ik ⊗ B_ki for A (m x n) and B (n x m).
pub fn tensor_trace(a: &RingMatrix, b: &RingMatrix, phi: &Endo) -> Result<TensorTrace, HochschildError> {
    if a.cols() != b.rows() || a.rows() != b.cols() {
        return Err(HochschildError::DimensionMismatch(format!(
            "{}x{} against {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut chain = Chain1::zero();
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            let (x, y) = (a.get(i, k), b.get(k, i));
            if !x.is_zero() && !y.is_zero() {
                chain.add_assign(&Chain1::tensor(x, y), &BigInt::one());
            }
        }
    }
    let trace = |m: &RingMatrix| (0..m.rows()).fold(RingElt::zero(), |acc, i| &acc + m.get(i, i));
    let ab = a.mul(b).expect("dimensions checked");
    let bpa = b.mul(&a.apply_endo(phi)).expect("dimensions checked");
    Ok(TensorTrace { chain, criterion_holds: trace(&ab) == trace(&bpa) })
}

/// Whether the coefficient-weighted sum of left-factor exponent vectors lies
/// in ker([phi] - I). Every cycle passes when b1 = 1 and b2 = 0.
pub fn marker_exponent_sum(c: &Chain1, phi: &Endo) -> bool {
    let mut s = vec2(0, 0);
    for ((g, _), a) in c.terms() {
        s[0] += a * &g.exp_u;
        s[1] += a * &g.exp_v;
    }
    phi.matrix().minus_identity().mul_vec(&s) == vec2(0, 0)
}

/// Whether phi is in the regime where 1-cycles reduce to the generators
/// u^-1 ⊗ u^m v^n: b1 = 1, b2 = 0 and ker([phi] - I) = <(1,0)>.
pub fn supports_reduction(phi: &Endo) -> bool {
    phi.b1.is_one() && phi.b2.is_zero() && kernel_basis(phi).basis == vec![vec2(1, 0)]
}

/// The generator of the C-component of HH_1: u^-1 ⊗ u g_C, whose marker is g_C.
pub fn class_generator(class: &SemiClass) -> (Monomial, Monomial) {
    (Monomial::u(-1), Monomial::u(1).mul(&class.rep))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub index: BigInt,
    pub generator: (Monomial, Monomial),
    /// c - index * generator = d2(certificate)
    pub certificate: Chain2,
}

struct Reducer<'a> {
    phi: &'a Endo,
    current: Chain1,
    cert: Chain2,
}

impl Reducer<'_> {
    /// current -= d2(s * w); certificate += s * w.
    fn apply(&mut self, s: &BigInt, w: Chain2) {
        self.current.add_assign(&d2(&w, self.phi), &-s);
        self.cert.add_assign(&w, s);
    }

    fn first_term(&self, pred: impl Fn(&Monomial) -> bool) -> Option<(Monomial, Monomial, BigInt)> {
        self.first_term_where(|g, _| pred(g))
    }

    fn first_term_where(&self, pred: impl Fn(&Monomial, &Monomial) -> bool) -> Option<(Monomial, Monomial, BigInt)> {
        self.current.terms().find(|((g, m), _)| pred(g, m)).map(|((g, m), a)| (g.clone(), m.clone(), a.clone()))
    }

    fn run_phase(&mut self, pred: impl Fn(&Monomial) -> bool, step: impl Fn(&mut Self, Monomial, Monomial, BigInt)) {
        while let Some((g, m, a)) = self.first_term(&pred) {
            step(self, g, m, a);
        }
    }
}

/// Writes a cycle whose markers all lie in `class` as index * generator plus
/// a boundary, returning the boundary's 2-chain as a certificate.
///
/// Moves, each the boundary of an explicit 2-chain:
/// 1. u^k v^l ⊗ m ~ v^l ⊗ m phi(u^k) + u^k ⊗ v^l m
/// 2. v^l ⊗ m ~ v^{l-1} ⊗ m phi(v) + v ⊗ v^{l-1} m (and the mirror for l <= -2);
///    v^-1 ⊗ m ~ 1 ⊗ m' - v ⊗ v^-1 m' with m' = m phi(v)^-1
/// 3. the same collapse for u-powers, then u ⊗ m ~ -u^-1 ⊗ u m phi(u) + 1 ⊗ um
/// 4. 1 ⊗ m ~ 0
/// 5. u^-1 ⊗ m ~ u^-1 ⊗ g m phi(g)^-1, with g taking the marker to g_C.
///
/// After 4 the v ⊗ m part of a cycle is zero, since ZG has no zero divisors
/// and phi(v) != v.
pub fn reduce_cycle(c: &Chain1, class: &SemiClass, phi: &Endo) -> Result<Reduction, HochschildError> {
    if !supports_reduction(phi) {
        return Err(HochschildError::UnsupportedEndo(phi.to_string()));
    }
    let boundary = d1(c, phi);
    if !boundary.is_zero() {
        return Err(HochschildError::NotACycle(boundary.to_string()));
    }
    for ((g, m), _) in c.terms() {
        if !class.contains(&marker(g, m)) {
            return Err(HochschildError::WrongClass(format!("{g} ⊗ {m}")));
        }
    }

    let one = BigInt::one();
    let u = Monomial::u(1);
    let u_inv = Monomial::u(-1);
    let v = Monomial::v(1);
    let v_inv = Monomial::v(-1);
    let mut r = Reducer { phi, current: c.clone(), cert: Chain2::zero() };

    r.run_phase(
        |g| !g.exp_u.is_zero() && !g.exp_v.is_zero(),
        |r, g, m, a| {
            let (gu, gv) = (Monomial::u(g.exp_u.clone()), Monomial::v(g.exp_v.clone()));
            r.apply(&-a, Chain2::term(1, gu, gv, m));
        },
    );

    r.run_phase(
        |g| g.exp_u.is_zero() && !g.exp_v.is_zero() && !g.exp_v.is_one(),
        |r, g, m, a| {
            let l = &g.exp_v;
            if l > &one {
                r.apply(&-a, Chain2::term(1, v.clone(), Monomial::v(l - 1), m));
            } else if l < &-&one {
                r.apply(&-a, Chain2::term(1, v_inv.clone(), Monomial::v(l + 1), m));
            } else {
                let m2 = m.div(&phi.apply_monomial(&v));
                r.apply(&a, Chain2::term(1, v.clone(), v_inv.clone(), m2));
            }
        },
    );

    r.run_phase(
        |g| g.exp_v.is_zero() && !g.exp_u.is_zero() && *g != u_inv,
        |r, g, m, a| {
            let k = &g.exp_u;
            if k > &one {
                r.apply(&-a, Chain2::term(1, u.clone(), Monomial::u(k - 1), m));
            } else if k < &-&one {
                r.apply(&-a, Chain2::term(1, u_inv.clone(), Monomial::u(k + 1), m));
            } else {
                r.apply(&a, Chain2::term(1, u.clone(), u_inv.clone(), u.mul(&m)));
            }
        },
    );

    r.run_phase(Monomial::is_one, |r, _, m, a| {
        r.apply(&a, Chain2::term(1, Monomial::one(), Monomial::one(), m));
    });

    if let Some((g, m, a)) = r.first_term(|g| *g != u_inv) {
        return Err(HochschildError::Internal(format!("leftover term {a} ({g} ⊗ {m})")));
    }

    let (gen_g, gen_m) = class_generator(class);
    while let Some((_, m, a)) = r.first_term_where(|_, m| *m != gen_m) {
        let w = same_class(&class.rep, &u_inv.mul(&m), phi).expect("marker lies in the class");
        let m2 = m.div(&phi.apply_monomial(&w));
        let mut x = Chain2::term(1, w.clone(), u_inv.clone(), m2.clone());
        x.add_term(u_inv.clone(), w, m2, -BigInt::one());
        r.apply(&a, x);
    }

    let index = r.current.coeff(&gen_g, &gen_m);
    let generator = Chain1::term(1, gen_g.clone(), gen_m.clone());
    if r.current != generator.scale(&index) {
        return Err(HochschildError::Internal(format!("unexpected remainder {}", r.current)));
    }
    let lhs = c.sub(&generator.scale(&index));
    if lhs != d2(&r.cert, phi) {
        return Err(HochschildError::Internal("certificate does not verify".into()));
    }
    Ok(Reduction { index, generator: (gen_g, gen_m), certificate: r.cert })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c1(s: &str) -> Chain1 {
        s.parse().unwrap()
    }

    #[test]
    fn d1_examples() {
        let phi = Endo::new(1, 0, 0, 3);
        assert!(d1(&c1("u ⊗ 1"), &phi).is_zero());
        assert_eq!(d1(&c1("v ⊗ 1"), &phi), "v^3 - v".parse().unwrap());
        assert!(d1(&c1("1 ⊗ u^4 v^-2"), &Endo::new(3, 1, -2, 5)).is_zero());
    }

    #[test]
    fn d2_examples() {
        let phi = Endo::new(2, 1, 1, 7);
        let m = Monomial::new(3, -1);
        let w = Chain2::term(1, Monomial::one(), Monomial::one(), m.clone());
        assert_eq!(d2(&w, &phi), Chain1::term(1, Monomial::one(), m));
        assert!(d2(&Chain2::zero(), &phi).is_zero());
        let phi = Endo::new(1, 0, 0, 3);
        let w = Chain2::term(1, Monomial::u(1), Monomial::u(1), Monomial::one());
        assert_eq!(d2(&w, &phi), c1("2 (u ⊗ u) - u^2 ⊗ 1"));
    }

    #[test]
    fn cycle_examples() {
        let phi = Endo::new(1, 0, 0, 3);
        assert!(is_cycle(&c1("u^-1 ⊗ u v"), &phi));
        assert!(!is_cycle(&c1("v ⊗ 1"), &phi));
        assert!(is_cycle(&Chain1::zero(), &phi));
    }

    #[test]
    fn split_examples() {
        let phi = Endo::new(1, 0, 0, 3);
        // markers v and v^4: 4 - 1 = 3 is odd, so different classes
        let parts = split_by_class(&c1("u^-1 ⊗ u v + u^-1 ⊗ u v^4"), &phi);
        assert_eq!(parts.len(), 2);
        let parts = split_by_class(&c1("u^-1 ⊗ u v + u^-1 ⊗ u v^3"), &phi);
        assert_eq!(parts.len(), 1);
        let single = c1("u^2 ⊗ v");
        let parts = split_by_class(&single, &phi);
        assert_eq!(parts.values().next(), Some(&single));
        assert!(split_by_class(&Chain1::zero(), &phi).is_empty());
    }

    #[test]
    fn reduce_examples() {
        let phi = Endo::new(1, 0, 0, 3);
        let c = c1("u^2 ⊗ 1");
        let class = SemiClass::of(&Monomial::u(2), &phi);
        let red = reduce_cycle(&c, &class, &phi).unwrap();
        assert_eq!(red.index.abs(), BigInt::from(2));
        // with generator u^-1 ⊗ u^3: u^2 ⊗ 1 ~ 2 (u ⊗ u) ~ -2 (u^-1 ⊗ u^3)
        assert_eq!(red.index, BigInt::from(-2));
        assert_eq!(red.generator, (Monomial::u(-1), Monomial::u(3)));

        let m = Monomial::new(2, 5);
        let class = SemiClass::of(&m, &phi);
        let red = reduce_cycle(&Chain1::term(1, Monomial::one(), m), &class, &phi).unwrap();
        assert!(red.index.is_zero());

        let class = SemiClass::of(&Monomial::new(1, 1), &phi);
        let (g, m) = class_generator(&class);
        let red = reduce_cycle(&Chain1::term(1, g, m), &class, &phi).unwrap();
        assert_eq!(red.index, BigInt::one());
        assert!(red.certificate.is_zero());
    }

    #[test]
    fn reduce_rejects_bad_input() {
        let class = SemiClass::of(&Monomial::one(), &Endo::identity());
        assert!(matches!(
            reduce_cycle(&Chain1::zero(), &class, &Endo::identity()),
            Err(HochschildError::UnsupportedEndo(_))
        ));
        let phi = Endo::new(1, 0, 0, 3);
        let class = SemiClass::of(&Monomial::v(1), &phi);
        assert!(matches!(reduce_cycle(&c1("v ⊗ 1"), &class, &phi), Err(HochschildError::NotACycle(_))));
        let class = SemiClass::of(&Monomial::one(), &phi);
        assert!(matches!(reduce_cycle(&c1("u ⊗ v"), &class, &phi), Err(HochschildError::WrongClass(_))));
    }

    #[test]
    fn tensor_trace_examples() {
        let phi = Endo::new(1, 0, 0, 3);
        let m: RingElt = "u v^2 - 3".parse().unwrap();
        let t = tensor_trace(
            &RingMatrix::from_rows(vec![vec![RingElt::one()]]),
            &RingMatrix::from_rows(vec![vec![m.clone()]]),
            &phi,
        )
        .unwrap();
        assert_eq!(t.chain, Chain1::tensor(&RingElt::one(), &m));
        assert!(t.criterion_holds);
        let t = tensor_trace(
            &RingMatrix::from_rows(vec![vec![Monomial::u(1).into()]]),
            &RingMatrix::from_rows(vec![vec![Monomial::v(1).into()]]),
            &phi,
        )
        .unwrap();
        assert_eq!(t.chain, c1("u ⊗ v"));
        assert!(t.criterion_holds && is_cycle(&t.chain, &phi));
        let bad = tensor_trace(&RingMatrix::zeros(2, 3), &RingMatrix::zeros(2, 3), &phi);
        assert!(matches!(bad, Err(HochschildError::DimensionMismatch(_))));
    }

    #[test]
    fn marker_sum_examples() {
        let phi = Endo::new(1, 0, 0, 3);
        assert!(!marker_exponent_sum(&c1("v ⊗ 1"), &phi));
        assert!(marker_exponent_sum(&Chain1::zero(), &phi));
        assert!(marker_exponent_sum(&c1("u^2 ⊗ v - v ⊗ u + v ⊗ 1"), &phi));
    }

    #[test]
    fn chain_text_round_trip() {
        let c = c1("u^-1 ⊗ u - 2 (1 ⊗ 1) + 1 ⊗ u v^-1");
        assert_eq!(c.to_string(), "u^-1 ⊗ u - 2 (1 ⊗ 1) + 1 ⊗ u v^-1");
        assert_eq!(c.to_string().parse::<Chain1>().unwrap(), c);
        let w: Chain2 = "3 (u ⊗ v^-1 ⊗ 1) - 1 ⊗ 1 ⊗ u".parse().unwrap();
        assert_eq!(w.to_string().parse::<Chain2>().unwrap(), w);
    }
}
