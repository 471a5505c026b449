//! The integral group ring of G = Z^2 = <u, v>, its endomorphisms, and the
//! helper sums used by the cellular models.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// The group element u^exp_u v^exp_v.
///
/// Ordering is lexicographic by (exp_u, exp_v), which is also the term order
/// used when printing ring elements and chains.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub exp_u: BigInt,
    pub exp_v: BigInt,
}

impl Monomial {
    pub fn new(exp_u: impl Into<BigInt>, exp_v: impl Into<BigInt>) -> Self {
        Monomial { exp_u: exp_u.into(), exp_v: exp_v.into() }
    }

    pub fn one() -> Self {
        Monomial::new(0, 0)
    }

    pub fn u(k: impl Into<BigInt>) -> Self {
        Monomial::new(k, 0)
    }

    pub fn v(k: impl Into<BigInt>) -> Self {
        Monomial::new(0, k)
    }

    pub fn from_vec(e: &[BigInt; 2]) -> Self {
        Monomial { exp_u: e[0].clone(), exp_v: e[1].clone() }
    }

    /// Exponent vector, i.e. the image in Z^2.
    pub fn exponents(&self) -> [BigInt; 2] {
        [self.exp_u.clone(), self.exp_v.clone()]
    }

    pub fn is_one(&self) -> bool {
        self.exp_u.is_zero() && self.exp_v.is_zero()
    }

    pub fn inv(&self) -> Self {
        Monomial { exp_u: -&self.exp_u, exp_v: -&self.exp_v }
    }

    pub fn mul(&self, other: &Monomial) -> Self {
        Monomial { exp_u: &self.exp_u + &other.exp_u, exp_v: &self.exp_v + &other.exp_v }
    }

    pub fn div(&self, other: &Monomial) -> Self {
        Monomial { exp_u: &self.exp_u - &other.exp_u, exp_v: &self.exp_v - &other.exp_v }
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, var: char, e: &BigInt) -> fmt::Result {
    if e.is_one() {
        write!(f, "{var}")
    } else {
        write!(f, "{var}^{e}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.exp_u.is_zero(), self.exp_v.is_zero()) {
            (true, true) => write!(f, "1"),
            (false, true) => write_power(f, 'u', &self.exp_u),
            (true, false) => write_power(f, 'v', &self.exp_v),
            (false, false) => {
                write_power(f, 'u', &self.exp_u)?;
                write!(f, " ")?;
                write_power(f, 'v', &self.exp_v)
            }
        }
    }
}

impl FromStr for Monomial {
    type Err = ParseError;

    /// Accepts "1", "u", "v^3", "u^-1 v^2", and also "u^2*v" or "uv".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "1" {
            return Ok(Monomial::one());
        }
        let mut exp_u = BigInt::zero();
        let mut exp_v = BigInt::zero();
        let chars: Vec<char> = s.chars().collect();
        let mut i = 0;
        let mut seen_factor = false;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '*' || c == '·' {
                i += 1;
                continue;
            }
            let target = match c {
                'u' => &mut exp_u,
                'v' => &mut exp_v,
                _ => return Err(ParseError::new(s, format!("unexpected character {c:?}"))),
            };
            i += 1;
            let mut e = BigInt::one();
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                e = digits.parse().map_err(|_| ParseError::new(s, format!("bad exponent {digits:?}")))?;
            }
            *target += e;
            seen_factor = true;
        }
        if !seen_factor {
            return Err(ParseError::new(s, "empty monomial"));
        }
        Ok(Monomial { exp_u, exp_v })
    }
}

/// Finite integer combination of monomials. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElt {
    terms: BTreeMap<Monomial, BigInt>,
}

impl RingElt {
    pub fn zero() -> Self {
        RingElt::default()
    }

    pub fn one() -> Self {
        RingElt::from(Monomial::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        RingElt::term(c, Monomial::one())
    }

    pub fn term(c: impl Into<BigInt>, m: Monomial) -> Self {
        let mut r = RingElt::zero();
        r.add_term(m, c.into());
        r
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        add_to_map(&mut self.terms, m, c);
    }

    pub fn scale(&self, c: &BigInt) -> RingElt {
        if c.is_zero() {
            return RingElt::zero();
        }
        RingElt { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    /// Multiply every term by a monomial.
    pub fn shift(&self, g: &Monomial) -> RingElt {
        RingElt { terms: self.terms.iter().map(|(m, a)| (m.mul(g), a.clone())).collect() }
    }

    pub fn ring_add(&self, other: &RingElt) -> RingElt {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn ring_sub(&self, other: &RingElt) -> RingElt {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), -c);
        }
        r
    }

    pub fn ring_mul(&self, other: &RingElt) -> RingElt {
        let mut r = RingElt::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }
}

impl From<Monomial> for RingElt {
    fn from(m: Monomial) -> Self {
        RingElt::term(1, m)
    }
}

impl Add for &RingElt {
    type Output = RingElt;
    fn add(self, rhs: &RingElt) -> RingElt {
        self.ring_add(rhs)
    }
}

impl Add for RingElt {
    type Output = RingElt;
    fn add(self, rhs: RingElt) -> RingElt {
        self.ring_add(&rhs)
    }
}

impl Sub for &RingElt {
    type Output = RingElt;
    fn sub(self, rhs: &RingElt) -> RingElt {
        self.ring_sub(rhs)
    }
}

impl Sub for RingElt {
    type Output = RingElt;
    fn sub(self, rhs: RingElt) -> RingElt {
        self.ring_sub(&rhs)
    }
}

impl Mul for &RingElt {
    type Output = RingElt;
    fn mul(self, rhs: &RingElt) -> RingElt {
        self.ring_mul(rhs)
    }
}

impl Mul for RingElt {
    type Output = RingElt;
    fn mul(self, rhs: RingElt) -> RingElt {
        self.ring_mul(&rhs)
    }
}

impl Neg for &RingElt {
    type Output = RingElt;
    fn neg(self) -> RingElt {
        RingElt { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for RingElt {
    type Output = RingElt;
    fn neg(self) -> RingElt {
        -&self
    }
}

/// Writes `c·x` in a signed term list. `first` controls whether a leading
/// "+" is suppressed. Shared by ring elements and chains.
pub(crate) fn write_signed_term(
    f: &mut fmt::Formatter<'_>,
    first: bool,
    c: &BigInt,
    body: &str,
    body_is_one: bool,
) -> fmt::Result {
    let neg = c.is_negative();
    let mag = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    if body_is_one {
        write!(f, "{mag}")
    } else if mag.is_one() {
        write!(f, "{body}")
    } else {
        write!(f, "{mag} {body}")
    }
}

impl fmt::Display for RingElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            write_signed_term(f, i == 0, c, &m.to_string(), m.is_one())?;
        }
        Ok(())
    }
}

/// Adds `c` at `key`, dropping the entry if it cancels.
pub(crate) fn add_to_map<K: Ord>(map: &mut BTreeMap<K, BigInt>, key: K, c: BigInt) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

/// Splits a signed term list into (negative, term text) pieces. A '-' or '+'
/// is a separator only outside brackets and not right after '^'.
pub(crate) fn split_signed_terms(s: &str) -> Result<Vec<(bool, String)>, ParseError> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut negative = false;
    let mut signed = false;
    let mut depth = 0i32;
    let mut prev_caret = false;
    for ch in s.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(ParseError::new(s, "unbalanced brackets"));
        }
        if (ch == '+' || ch == '-') && depth == 0 && !prev_caret {
            if !cur.trim().is_empty() {
                out.push((negative, cur.trim().to_string()));
                cur.clear();
            } else if signed {
                return Err(ParseError::new(s, "doubled sign"));
            }
            negative = ch == '-';
            signed = true;
        } else {
            cur.push(ch);
        }
        if !ch.is_whitespace() {
            prev_caret = ch == '^';
        }
    }
    if depth != 0 {
        return Err(ParseError::new(s, "unbalanced brackets"));
    }
    if cur.trim().is_empty() {
        return Err(ParseError::new(s, "dangling sign or empty input"));
    }
    out.push((negative, cur.trim().to_string()));
    Ok(out)
}

/// Splits "12 u^-1 v" into (12, "u^-1 v"); a bare integer gives (n, "").
pub(crate) fn split_coefficient(t: &str) -> Result<(BigInt, &str), ParseError> {
    let t = t.trim();
    let end = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
    if end == 0 {
        return Ok((BigInt::one(), t));
    }
    let c: BigInt = t[..end].parse().map_err(|_| ParseError::new(t, "bad coefficient"))?;
    Ok((c, t[end..].trim_start_matches([' ', '*', '·']).trim()))
}

impl FromStr for RingElt {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(RingElt::zero());
        }
        let mut r = RingElt::zero();
        for (negative, t) in split_signed_terms(s)? {
            let (c, rest) = split_coefficient(&t)?;
            let m = if rest.is_empty() { Monomial::one() } else { rest.parse()? };
            r.add_term(m, if negative { -c } else { c });
        }
        Ok(r)
    }
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for RingElt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RingElt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Endomorphism of G given by phi(u) = u^b1 v^b2, phi(v) = u^b3 v^b4, so that
/// its matrix is [phi] = (b1 b3; b2 b4).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Endo {
    #[serde(with = "crate::serde_util::bigint")]
    pub b1: BigInt,
    #[serde(with = "crate::serde_util::bigint")]
    pub b2: BigInt,
    #[serde(with = "crate::serde_util::bigint")]
    pub b3: BigInt,
    #[serde(with = "crate::serde_util::bigint")]
    pub b4: BigInt,
}

impl Endo {
    pub fn new(b1: impl Into<BigInt>, b2: impl Into<BigInt>, b3: impl Into<BigInt>, b4: impl Into<BigInt>) -> Self {
        Endo { b1: b1.into(), b2: b2.into(), b3: b3.into(), b4: b4.into() }
    }

    pub fn identity() -> Self {
        Endo::new(1, 0, 0, 1)
    }

    /// u^m v^n -> u^{m b1 + n b3} v^{m b2 + n b4}
    pub fn apply_monomial(&self, g: &Monomial) -> Monomial {
        let (m, n) = (&g.exp_u, &g.exp_v);
        Monomial { exp_u: m * &self.b1 + n * &self.b3, exp_v: m * &self.b2 + n * &self.b4 }
    }

    pub fn apply(&self, a: &RingElt) -> RingElt {
        let mut r = RingElt::zero();
        for (m, c) in a.terms() {
            r.add_term(self.apply_monomial(m), c.clone());
        }
        r
    }
}

impl fmt::Display for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.b1, self.b2, self.b3, self.b4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HelperKind {
    X,
    Y,
    W,
}

/// The piecewise sums of the cellular models:
///
/// * X(m) = sum_{j=1..m} u^{1-j}, or sum_{j=1..-m} -u^j for m < 0
/// * Y(m) = sum_{j=1..m} u^{2-j}, or sum_{j=1..-m} -u^{j+2} for m < 0
/// * W(m) = sum_{j=1..m} v^{1-j}, or sum_{j=1..-m} -v^j for m < 0
///
/// and 0 for m = 0. The negative branch of Y is not the shift of X's; it is
/// kept as is because the trace cycle condition holds with it.
pub fn helper_sum(kind: HelperKind, m: &BigInt) -> RingElt {
    let mut r = RingElt::zero();
    let count = m.abs();
    let mut j = BigInt::one();
    while j <= count {
        let (e, c) = if m.is_positive() {
            let base = match kind {
                HelperKind::X | HelperKind::W => BigInt::one(),
                HelperKind::Y => BigInt::from(2),
            };
            (base - &j, BigInt::one())
        } else {
            let e = match kind {
                HelperKind::X | HelperKind::W => j.clone(),
                HelperKind::Y => &j + 2,
            };
            (e, -BigInt::one())
        };
        let mono = match kind {
            HelperKind::X | HelperKind::Y => Monomial::u(e),
            HelperKind::W => Monomial::v(e),
        };
        r.add_term(mono, c);
        j += 1;
    }
    r
}
