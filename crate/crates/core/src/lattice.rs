//! Integer 2x2 linear algebra and semiconjugacy classes in Z^2.
//!
//! Two elements are semiconjugate under phi iff ([phi] - I) z = e2 - e1 has an
//! integer solution z, where e1, e2 are the exponent vectors. Class markers are
//! exponent vectors reduced modulo the column lattice of [phi] - I.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::ring::{Endo, Monomial};

pub type IntVec2 = [BigInt; 2];

pub fn vec2(a: impl Into<BigInt>, b: impl Into<BigInt>) -> IntVec2 {
    [a.into(), b.into()]
}

/// Row-major 2x2 integer matrix (a11 a12; a21 a22).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix2 {
    pub a11: BigInt,
    pub a12: BigInt,
    pub a21: BigInt,
    pub a22: BigInt,
}

impl IntMatrix2 {
    pub fn new(a11: impl Into<BigInt>, a12: impl Into<BigInt>, a21: impl Into<BigInt>, a22: impl Into<BigInt>) -> Self {
        IntMatrix2 { a11: a11.into(), a12: a12.into(), a21: a21.into(), a22: a22.into() }
    }

    pub fn identity() -> Self {
        IntMatrix2::new(1, 0, 0, 1)
    }

    pub fn zero() -> Self {
        IntMatrix2::new(0, 0, 0, 0)
    }

    pub fn det(&self) -> BigInt {
        &self.a11 * &self.a22 - &self.a12 * &self.a21
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix2::identity()
    }

    pub fn mul(&self, o: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2 {
            a11: &self.a11 * &o.a11 + &self.a12 * &o.a21,
            a12: &self.a11 * &o.a12 + &self.a12 * &o.a22,
            a21: &self.a21 * &o.a11 + &self.a22 * &o.a21,
            a22: &self.a21 * &o.a12 + &self.a22 * &o.a22,
        }
    }

    pub fn mul_vec(&self, v: &IntVec2) -> IntVec2 {
        [&self.a11 * &v[0] + &self.a12 * &v[1], &self.a21 * &v[0] + &self.a22 * &v[1]]
    }

    pub fn sub(&self, o: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2 {
            a11: &self.a11 - &o.a11,
            a12: &self.a12 - &o.a12,
            a21: &self.a21 - &o.a21,
            a22: &self.a22 - &o.a22,
        }
    }

    pub fn minus_identity(&self) -> IntMatrix2 {
        self.sub(&IntMatrix2::identity())
    }

    pub fn transpose(&self) -> IntMatrix2 {
        IntMatrix2::new(self.a11.clone(), self.a21.clone(), self.a12.clone(), self.a22.clone())
    }

    /// Inverse of a unimodular matrix, `None` otherwise.
    pub fn inverse(&self) -> Option<IntMatrix2> {
        let d = self.det();
        if !d.abs().is_one() {
            return None;
        }
        Some(IntMatrix2 { a11: &self.a22 * &d, a12: -&self.a12 * &d, a21: -&self.a21 * &d, a22: &self.a11 * &d })
    }

    pub fn column(&self, j: usize) -> IntVec2 {
        match j {
            0 => [self.a11.clone(), self.a21.clone()],
            _ => [self.a12.clone(), self.a22.clone()],
        }
    }

    pub fn from_columns(c0: &IntVec2, c1: &IntVec2) -> IntMatrix2 {
        IntMatrix2::new(c0[0].clone(), c1[0].clone(), c0[1].clone(), c1[1].clone())
    }

    fn to_array(&self) -> [[BigInt; 2]; 2] {
        [[self.a11.clone(), self.a12.clone()], [self.a21.clone(), self.a22.clone()]]
    }

    fn from_array(a: [[BigInt; 2]; 2]) -> IntMatrix2 {
        let [[a11, a12], [a21, a22]] = a;
        IntMatrix2 { a11, a12, a21, a22 }
    }
}

impl Endo {
    /// [phi] = (b1 b3; b2 b4); columns are the exponent vectors of phi(u), phi(v).
    pub fn matrix(&self) -> IntMatrix2 {
        IntMatrix2::new(self.b1.clone(), self.b3.clone(), self.b2.clone(), self.b4.clone())
    }

    pub fn from_matrix(m: &IntMatrix2) -> Endo {
        Endo::new(m.a11.clone(), m.a21.clone(), m.a12.clone(), m.a22.clone())
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a11, self.a12, self.a21, self.a22)
    }
}

impl FromStr for IntMatrix2 {
    type Err = ParseError;

    /// Row-major "a11,a12,a21,a22".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(ParseError::new(s, "expected four comma-separated integers"));
        }
        let mut v = Vec::with_capacity(4);
        for p in parts {
            v.push(p.parse::<BigInt>().map_err(|_| ParseError::new(s, format!("bad integer {p:?}")))?);
        }
        let mut it = v.into_iter();
        Ok(IntMatrix2 {
            a11: it.next().unwrap(),
            a12: it.next().unwrap(),
            a21: it.next().unwrap(),
            a22: it.next().unwrap(),
        })
    }
}

impl Serialize for IntMatrix2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IntMatrix2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Generators of ker(M) over Z: 0, 1 or 2 independent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KernelLattice {
    pub basis: Vec<IntVec2>,
}

impl KernelLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// U M V = D with U, V unimodular and D diagonal (no divisibility condition
/// on the diagonal; the solver does not need it).
struct Diagonalization {
    u: [[BigInt; 2]; 2],
    d: [BigInt; 2],
    v: [[BigInt; 2]; 2],
}

fn diagonalize(m: &IntMatrix2) -> Diagonalization {
    let mut d = m.to_array();
    let mut u = IntMatrix2::identity().to_array();
    let mut v = IntMatrix2::identity().to_array();
    loop {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..2 {
            for j in 0..2 {
                if !d[i][j].is_zero() && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((i, j)) = best else { break };
        if i == 1 {
            d.swap(0, 1);
            u.swap(0, 1);
        }
        if j == 1 {
            for row in d.iter_mut().chain(v.iter_mut()) {
                row.swap(0, 1);
            }
        }
        let p = d[0][0].clone();
        if !d[1][0].is_zero() {
            let q = &d[1][0] / &p;
            for k in 0..2 {
                let t = &q * &d[0][k];
                d[1][k] -= t;
                let t = &q * &u[0][k];
                u[1][k] -= t;
            }
        }
        if !d[0][1].is_zero() {
            let q = &d[0][1] / &p;
            for row in d.iter_mut().chain(v.iter_mut()) {
                let t = &q * &row[0];
                row[1] -= t;
            }
        }
        if d[1][0].is_zero() && d[0][1].is_zero() {
            break;
        }
    }
    let [[d0, _], [_, d1]] = d;
    Diagonalization { u, d: [d0, d1], v }
}

fn sign_normalize(mut z: IntVec2) -> IntVec2 {
    let first_nonzero = if !z[0].is_zero() { &z[0] } else { &z[1] };
    if first_nonzero.is_negative() {
        z[0] = -&z[0];
        z[1] = -&z[1];
    }
    z
}

fn primitive(z: IntVec2) -> IntVec2 {
    let g = z[0].gcd(&z[1]);
    if g.is_zero() {
        return z;
    }
    [&z[0] / &g, &z[1] / &g]
}

/// Solves M z = b over Z. Returns a particular solution (reduced modulo the
/// kernel lattice so the answer is canonical) and a kernel basis, or `None`.
pub fn solve_integer_system(m: &IntMatrix2, b: &IntVec2) -> Option<(IntVec2, KernelLattice)> {
    let diag = diagonalize(m);
    let c = IntMatrix2::from_array(diag.u.clone()).mul_vec(b);
    let mut y: IntVec2 = [BigInt::zero(), BigInt::zero()];
    let vm = IntMatrix2::from_array(diag.v.clone());
    let mut kernel = Vec::new();
    for i in 0..2 {
        if diag.d[i].is_zero() {
            if !c[i].is_zero() {
                return None;
            }
            kernel.push(sign_normalize(primitive(vm.column(i))));
        } else {
            let (q, r) = c[i].div_rem(&diag.d[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    if kernel.len() == 2 {
        kernel = vec![vec2(1, 0), vec2(0, 1)];
    }
    let z = vm.mul_vec(&y);
    debug_assert_eq!(m.mul_vec(&z), *b);
    let z = Lattice::from_generators(&kernel).reduce(&z);
    Some((z, KernelLattice { basis: kernel }))
}

/// A sublattice of Z^2 in echelon form, used to reduce vectors into a fixed
/// fundamental domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Lattice {
    Zero,
    /// Spanned by one vector (p, q), first nonzero coordinate positive.
    RankOne(IntVec2),
    /// Spanned by (h11, h12) and (0, h22), h11 > 0, h22 > 0, 0 <= h12 < h22.
    Full {
        h11: BigInt,
        h12: BigInt,
        h22: BigInt,
    },
}

impl Lattice {
    pub fn from_generators(gens: &[IntVec2]) -> Lattice {
        let mut with_first: Vec<IntVec2> = gens.iter().filter(|g| !g[0].is_zero()).cloned().collect();
        let mut rest: Vec<BigInt> = gens.iter().filter(|g| g[0].is_zero()).map(|g| g[1].clone()).collect();
        // Euclid on first coordinates until one vector carries them all.
        while with_first.len() > 1 {
            with_first.sort_by(|a, b| a[0].abs().cmp(&b[0].abs()));
            let pivot = with_first[0].clone();
            let mut next = vec![pivot.clone()];
            for g in &with_first[1..] {
                let q = &g[0] / &pivot[0];
                let r = [&g[0] - &q * &pivot[0], &g[1] - &q * &pivot[1]];
                if r[0].is_zero() {
                    rest.push(r[1].clone());
                } else {
                    next.push(r);
                }
            }
            with_first = next;
        }
        let h = rest.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        match (with_first.pop(), h.is_zero()) {
            (None, true) => Lattice::Zero,
            (None, false) => Lattice::RankOne(vec2(0, h)),
            (Some(p), true) => Lattice::RankOne(sign_normalize(p)),
            (Some(p), false) => {
                let p = sign_normalize(p);
                Lattice::Full { h12: p[1].mod_floor(&h), h11: p[0].clone(), h22: h }
            }
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Lattice::Zero => 0,
            Lattice::RankOne(_) => 1,
            Lattice::Full { .. } => 2,
        }
    }

    /// Index in Z^2 for full-rank lattices.
    pub fn index(&self) -> Option<BigInt> {
        match self {
            Lattice::Full { h11, h22, .. } => Some(h11 * h22),
            _ => None,
        }
    }

    /// Least non-negative residues in the coordinates the lattice covers;
    /// other coordinates pass through.
    pub fn reduce(&self, z: &IntVec2) -> IntVec2 {
        match self {
            Lattice::Zero => z.clone(),
            Lattice::RankOne(b) => {
                if !b[0].is_zero() {
                    let k = z[0].div_floor(&b[0]);
                    [&z[0] - &k * &b[0], &z[1] - &k * &b[1]]
                } else {
                    [z[0].clone(), z[1].mod_floor(&b[1])]
                }
            }
            Lattice::Full { h11, h12, h22 } => {
                let k = z[0].div_floor(h11);
                let b = &z[1] - &k * h12;
                [&z[0] - &k * h11, b.mod_floor(h22)]
            }
        }
    }

    pub fn contains(&self, z: &IntVec2) -> bool {
        self.reduce(z).iter().all(Zero::is_zero)
    }

    /// Every point of the fundamental domain of a full-rank lattice.
    pub fn fundamental_domain(&self) -> Option<Vec<IntVec2>> {
        let Lattice::Full { h11, h22, .. } = self else { return None };
        let mut out = Vec::new();
        let mut a = BigInt::zero();
        while &a < h11 {
            let mut b = BigInt::zero();
            while &b < h22 {
                out.push([a.clone(), b.clone()]);
                b += 1;
            }
            a += 1;
        }
        Some(out)
    }
}

/// Column lattice of [phi] - I.
pub fn image_lattice(phi: &Endo) -> Lattice {
    let m = phi.matrix().minus_identity();
    Lattice::from_generators(&[m.column(0), m.column(1)])
}

/// Witness g with g1 = g g2 phi(g)^{-1}, if g1 and g2 are semiconjugate.
pub fn same_class(g1: &Monomial, g2: &Monomial, phi: &Endo) -> Option<Monomial> {
    let m = phi.matrix().minus_identity();
    let rhs = [&g2.exp_u - &g1.exp_u, &g2.exp_v - &g1.exp_v];
    let (z, _) = solve_integer_system(&m, &rhs)?;
    let g = Monomial::from_vec(&z);
    let check = g.mul(g2).div(&phi.apply_monomial(&g));
    assert_eq!(&check, g1, "semiconjugacy witness failed substitution");
    Some(g)
}

pub fn canonical_marker(g: &Monomial, phi: &Endo) -> Monomial {
    Monomial::from_vec(&image_lattice(phi).reduce(&g.exponents()))
}

/// Basis of ker([phi] - I), the semicentralizer of every element.
pub fn kernel_basis(phi: &Endo) -> KernelLattice {
    let m = phi.matrix().minus_identity();
    solve_integer_system(&m, &vec2(0, 0)).expect("homogeneous system is solvable").1
}

/// A semiconjugacy class, keyed by its canonical marker.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SemiClass {
    pub rep: Monomial,
    pub phi: Endo,
}

impl SemiClass {
    pub fn of(g: &Monomial, phi: &Endo) -> SemiClass {
        SemiClass { rep: canonical_marker(g, phi), phi: phi.clone() }
    }

    pub fn contains(&self, g: &Monomial) -> bool {
        canonical_marker(g, &self.phi) == self.rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(m: &IntMatrix2, b: &IntVec2, r: i64) -> Vec<IntVec2> {
        let mut out = Vec::new();
        for x in -r..=r {
            for y in -r..=r {
                let z = vec2(x, y);
                if m.mul_vec(&z) == *b {
                    out.push(z);
                }
            }
        }
        out
    }

    #[test]
    fn solver_examples() {
        let m = IntMatrix2::new(0, 0, 0, 2);
        let (p, k) = solve_integer_system(&m, &vec2(0, 2)).unwrap();
        assert_eq!(p, vec2(0, 1));
        assert_eq!(k.basis, vec![vec2(1, 0)]);
        let (p, k) = solve_integer_system(&IntMatrix2::identity(), &vec2(0, 0)).unwrap();
        assert_eq!(p, vec2(0, 0));
        assert!(k.basis.is_empty());
        assert!(solve_integer_system(&m, &vec2(0, 1)).is_none());
        assert!(brute_force(&m, &vec2(0, 1), 6).is_empty());
    }

    #[test]
    fn solver_agrees_with_brute_force() {
        let r = 3i64;
        for entries in [(0, 0, 0, 0), (2, 4, 1, 2), (3, 1, 6, 2), (0, 1, 0, -2), (2, 1, 1, 1), (4, 6, 2, 3)] {
            let m = IntMatrix2::new(entries.0, entries.1, entries.2, entries.3);
            for b0 in -r..=r {
                for b1 in -r..=r {
                    let b = vec2(b0, b1);
                    let found = solve_integer_system(&m, &b);
                    let brute = brute_force(&m, &b, 12);
                    match found {
                        None => assert!(brute.is_empty(), "{m} {b:?}"),
                        Some((p, k)) => {
                            assert_eq!(m.mul_vec(&p), b);
                            for z in &k.basis {
                                assert_eq!(m.mul_vec(z), vec2(0, 0));
                            }
                            // every brute-force solution differs from p by a kernel element
                            let lat = Lattice::from_generators(&k.basis);
                            for s in brute {
                                assert!(lat.contains(&[&s[0] - &p[0], &s[1] - &p[1]]));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn same_class_examples() {
        let phi = Endo::new(1, 0, 0, 3);
        assert_eq!(same_class(&Monomial::v(1), &Monomial::v(3), &phi), Some(Monomial::v(1)));
        let g = Monomial::new(4, -2);
        assert_eq!(same_class(&g, &g, &Endo::new(2, 1, 5, -1)), Some(Monomial::one()));
        assert_eq!(same_class(&Monomial::v(1), &Monomial::v(2), &phi), None);
    }

    #[test]
    fn marker_examples() {
        let phi = Endo::new(1, 0, 0, 3);
        assert_eq!(canonical_marker(&Monomial::v(3), &phi), Monomial::v(1));
        assert_eq!(canonical_marker(&Monomial::u(5), &phi), Monomial::u(5));
        let g = Monomial::new(-7, 3);
        assert_eq!(canonical_marker(&g, &Endo::identity()), g);
        // triangulated regime: everything collapses onto u^0 v^*
        let tri = Endo::new(1, 0, 1, -1);
        assert_eq!(canonical_marker(&Monomial::new(3, 1), &tri), Monomial::v(7));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&Endo::new(1, 0, 0, 3)).basis, vec![vec2(1, 0)]);
        assert_eq!(kernel_basis(&Endo::identity()).basis, vec![vec2(1, 0), vec2(0, 1)]);
        assert!(kernel_basis(&Endo::new(2, 0, 0, 3)).basis.is_empty());
        assert_eq!(kernel_basis(&Endo::new(1, 0, 1, -1)).basis, vec![vec2(1, 0)]);
        assert_eq!(kernel_basis(&Endo::new(3, 4, 3, 7)).basis, vec![vec2(3, -2)]);
    }

    #[test]
    fn unimodular_inverse() {
        let p = IntMatrix2::new(2, 1, 1, 1);
        assert_eq!(p.mul(&p.inverse().unwrap()), IntMatrix2::identity());
        let q = IntMatrix2::new(0, 1, 1, 0);
        assert_eq!(q.mul(&q.inverse().unwrap()), IntMatrix2::identity());
        assert!(IntMatrix2::new(2, 0, 0, 1).inverse().is_none());
    }

    #[test]
    fn matrix_string_round_trip() {
        let m: IntMatrix2 = "1,-2,0,-1".parse().unwrap();
        assert_eq!(m, IntMatrix2::new(1, -2, 0, -1));
        assert_eq!(m.to_string(), "1,-2,0,-1");
        assert!("1,2,3".parse::<IntMatrix2>().is_err());
    }
}
