//! Piecewise-affine homotopies of the torus and their exact fixed sets.
//!
//! A piece is the lift (z, t) -> L z + t beta + gamma for t in [t_lo, t_hi],
//! with L an integer matrix and beta, gamma rational. A point z of the torus
//! is fixed at time t iff (L - I) z + t beta + gamma lies in Z^2.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::lattice::{vec2, IntMatrix2, IntVec2};
use crate::ring::Monomial;

pub type Rat = BigRational;
pub type RatVec2 = [Rat; 2];

pub fn rat(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn int(n: impl Into<BigInt>) -> Rat {
    Rat::from_integer(n.into())
}

fn is_integral(x: &Rat) -> bool {
    x.is_integer()
}

fn mat_vec(l: &IntMatrix2, z: &RatVec2) -> RatVec2 {
    [int(l.a11.clone()) * &z[0] + int(l.a12.clone()) * &z[1], int(l.a21.clone()) * &z[0] + int(l.a22.clone()) * &z[1]]
}

fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffinePiece {
    #[serde(with = "crate::serde_util::rational")]
    pub t_lo: Rat,
    #[serde(with = "crate::serde_util::rational")]
    pub t_hi: Rat,
    pub linear: IntMatrix2,
    #[serde(with = "crate::serde_util::rational_pair")]
    pub velocity: RatVec2,
    #[serde(with = "crate::serde_util::rational_pair")]
    pub offset: RatVec2,
}

impl AffinePiece {
    /// Translation part t beta + gamma at time t.
    pub fn translation(&self, t: &Rat) -> RatVec2 {
        [&self.velocity[0] * t + &self.offset[0], &self.velocity[1] * t + &self.offset[1]]
    }

    pub fn eval(&self, z: &RatVec2, t: &Rat) -> RatVec2 {
        let lz = mat_vec(&self.linear, z);
        let tr = self.translation(t);
        [&lz[0] + &tr[0], &lz[1] + &tr[1]]
    }

    pub fn contains_time(&self, t: &Rat) -> bool {
        &self.t_lo <= t && t <= &self.t_hi
    }
}

impl fmt::Display for AffinePiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = &self.linear;
        write!(
            f,
            "t in [{}, {}]: x' = {}x + {}y + {}t + {}, y' = {}x + {}y + {}t + {}",
            self.t_lo,
            self.t_hi,
            l.a11,
            l.a12,
            self.velocity[0],
            self.offset[0],
            l.a21,
            l.a22,
            self.velocity[1],
            self.offset[1]
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelCase {
    /// Square decomposition, B = (1 0; 0 b4).
    SquareB3Zero,
    /// Triangulated decomposition, B = (1 1; 0 -1).
    TriB4MinusOne,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelHomotopyParams {
    pub case: ModelCase,
    #[serde(with = "crate::serde_util::bigint")]
    pub c1: BigInt,
    #[serde(with = "crate::serde_util::bigint")]
    pub c2: BigInt,
    #[serde(with = "crate::serde_util::bigint")]
    pub b4: BigInt,
}

impl ModelHomotopyParams {
    pub fn square(c1: impl Into<BigInt>, c2: impl Into<BigInt>, b4: impl Into<BigInt>) -> Self {
        ModelHomotopyParams { case: ModelCase::SquareB3Zero, c1: c1.into(), c2: c2.into(), b4: b4.into() }
    }

    pub fn triangulated(c1: impl Into<BigInt>, c2: impl Into<BigInt>) -> Self {
        ModelHomotopyParams { case: ModelCase::TriB4MinusOne, c1: c1.into(), c2: c2.into(), b4: BigInt::from(-1) }
    }

    /// The fiber matrix B of the model: (1 0; 0 b4) or (1 1; 0 -1).
    pub fn fiber_matrix(&self) -> IntMatrix2 {
        match self.case {
            ModelCase::SquareB3Zero => IntMatrix2::new(1, 0, 0, self.b4.clone()),
            ModelCase::TriB4MinusOne => IntMatrix2::new(1, 1, 0, -1),
        }
    }
}

/// The two-branch model homotopies: first translate by 2 c1 t along x, then
/// by 2 c2 t along y.
///
/// * square: (x + 2c1 t - 1/2, b4 y) on [0,1/2], (x + (2c1-1)/2, b4 y + 2c2 t - c2) on [1/2,1]
/// * triangulated: (x + y + 2c1 t + 1/2, -y + 1/2) on [0,1/2],
///   (x + y + (2c1+1)/2, -y + 2c2 t - c2 + 1/2) on [1/2,1]
pub fn model_homotopy(p: &ModelHomotopyParams) -> Vec<AffinePiece> {
    let half = rat(1, 2);
    let two_c1 = int(&p.c1 * 2);
    let two_c2 = int(&p.c2 * 2);
    let (linear, base) = match p.case {
        ModelCase::SquareB3Zero => (p.fiber_matrix(), [-half.clone(), Rat::zero()]),
        ModelCase::TriB4MinusOne => (p.fiber_matrix(), [half.clone(), half.clone()]),
    };
    let first = AffinePiece {
        t_lo: Rat::zero(),
        t_hi: half.clone(),
        linear: linear.clone(),
        velocity: [two_c1, Rat::zero()],
        offset: base.clone(),
    };
    let second = AffinePiece {
        t_lo: half,
        t_hi: Rat::one(),
        linear,
        velocity: [Rat::zero(), two_c2],
        offset: [&base[0] + int(p.c1.clone()), &base[1] - int(p.c2.clone())],
    };
    vec![first, second]
}

/// Single-piece homotopy moving linearly between the end maps of `h`. Its lift
/// has the same endpoints, so it is homotopic to `h` relative to t = 0, 1.
pub fn straight_line(h: &[AffinePiece]) -> Result<Vec<AffinePiece>, OracleError> {
    let (first, last) = match (h.first(), h.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(OracleError::BadPieces("empty homotopy".into())),
    };
    if first.linear != last.linear {
        return Err(OracleError::BadPieces("end maps have different linear parts".into()));
    }
    let g0 = first.translation(&Rat::zero());
    let g1 = last.translation(&Rat::one());
    Ok(vec![AffinePiece {
        t_lo: Rat::zero(),
        t_hi: Rat::one(),
        linear: first.linear.clone(),
        velocity: [&g1[0] - &g0[0], &g1[1] - &g0[1]],
        offset: g0,
    }])
}

/// P F(P^-1 z, t) for unimodular P.
pub fn conjugate_homotopy(h: &[AffinePiece], p: &IntMatrix2) -> Option<Vec<AffinePiece>> {
    let pinv = p.inverse()?;
    Some(
        h.iter()
            .map(|piece| AffinePiece {
                t_lo: piece.t_lo.clone(),
                t_hi: piece.t_hi.clone(),
                linear: p.mul(&piece.linear).mul(&pinv),
                velocity: mat_vec(p, &piece.velocity),
                offset: mat_vec(p, &piece.offset),
            })
            .collect(),
    )
}

/// Pieces must tile [0,1] in order and agree mod Z^2 at junctions.
pub fn validate_pieces(h: &[AffinePiece]) -> Result<(), OracleError> {
    let mut t = Rat::zero();
    for (i, piece) in h.iter().enumerate() {
        if piece.t_lo != t || piece.t_lo >= piece.t_hi {
            return Err(OracleError::BadPieces(format!("piece {i} starts at {} not {t}", piece.t_lo)));
        }
        if i > 0 {
            let prev = &h[i - 1];
            let a = prev.translation(&t);
            let b = piece.translation(&t);
            if prev.linear != piece.linear || !is_integral(&(&a[0] - &b[0])) || !is_integral(&(&a[1] - &b[1])) {
                return Err(OracleError::BadPieces(format!("pieces {} and {i} disagree at t = {t}", i - 1)));
            }
        }
        t = piece.t_hi.clone();
    }
    if t != Rat::one() {
        return Err(OracleError::BadPieces(format!("pieces end at {t}, not 1")));
    }
    Ok(())
}

/// Structure of L - I used to solve the congruences.
#[allow(clippy::large_enum_variant)]
enum Shape {
    Zero,
    /// k spans ker(L - I), w completes it to a unimodular basis, q = (L - I) w,
    /// mu is a primitive covector vanishing on the image.
    RankOne {
        k: IntVec2,
        w: IntVec2,
        q: IntVec2,
        mu: IntVec2,
    },
    Full,
}

fn shape(l: &IntMatrix2) -> Shape {
    let m = l.minus_identity();
    if m == IntMatrix2::zero() {
        return Shape::Zero;
    }
    if !m.det().is_zero() {
        return Shape::Full;
    }
    let kernel = crate::lattice::solve_integer_system(&m, &vec2(0, 0)).expect("homogeneous").1;
    let k = kernel.basis[0].clone();
    // complete k to a unimodular basis: x k0 + y k1 = 1, w = (-y, x)
    let e = k[0].extended_gcd(&k[1]);
    let (x, y) = if e.gcd.is_negative() { (-e.x, -e.y) } else { (e.x, e.y) };
    let w = [-y, x];
    let q = m.mul_vec(&w);
    let g = q[0].gcd(&q[1]);
    let mu = [&q[1] / &g, -(&q[0] / &g)];
    Shape::RankOne { k, w, q, mu }
}

fn dot_rat(mu: &IntVec2, z: &RatVec2) -> Rat {
    int(mu[0].clone()) * &z[0] + int(mu[1].clone()) * &z[1]
}

/// Fixed points of z -> L z + gamma on the torus exist?
fn slice_has_fixed_points(l: &IntMatrix2, gamma: &RatVec2) -> bool {
    match shape(l) {
        Shape::Full => true,
        Shape::Zero => is_integral(&gamma[0]) && is_integral(&gamma[1]),
        Shape::RankOne { mu, .. } => is_integral(&dot_rat(&mu, gamma)),
    }
}

pub fn boundary_fixed_point_free(h: &[AffinePiece]) -> bool {
    let (Some(first), Some(last)) = (h.first(), h.last()) else { return true };
    !slice_has_fixed_points(&first.linear, &first.translation(&first.t_lo))
        && !slice_has_fixed_points(&last.linear, &last.translation(&last.t_hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

/// One component of the fixed set: at time t, the closed curve
/// base + s * direction (s in [0,1]) on the torus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedCircle {
    #[serde(with = "crate::serde_util::rational")]
    pub t: Rat,
    #[serde(with = "crate::serde_util::rational_pair")]
    pub base: RatVec2,
    #[serde(with = "crate::serde_util::int_pair")]
    pub direction: IntVec2,
    /// Set when the circle is a coordinate circle (direction along an axis).
    pub free_coordinate: Option<Axis>,
    /// u^-n1 v^-n2 where the lift sends the circle to itself translated by n.
    pub class_marker: Option<Monomial>,
}

impl FixedCircle {
    /// `n` equally spaced points on the circle.
    pub fn sample(&self, n: usize) -> Vec<RatVec2> {
        (0..n)
            .map(|j| {
                let s = rat(j as i64, n as i64);
                [
                    frac(&(&self.base[0] + &s * int(self.direction[0].clone()))),
                    frac(&(&self.base[1] + &s * int(self.direction[1].clone()))),
                ]
            })
            .collect()
    }

    /// Constrained coordinate value, for coordinate circles.
    pub fn level(&self) -> Option<&Rat> {
        match self.free_coordinate {
            Some(Axis::X) => Some(&self.base[1]),
            Some(Axis::Y) => Some(&self.base[0]),
            None => None,
        }
    }
}

impl fmt::Display for FixedCircle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.free_coordinate {
            Some(Axis::X) => write!(f, "t = {}, y = {}, x free", self.t, self.base[1]),
            Some(Axis::Y) => write!(f, "t = {}, x = {}, y free", self.t, self.base[0]),
            None => write!(
                f,
                "t = {}, through ({}, {}) along ({}, {})",
                self.t, self.base[0], self.base[1], self.direction[0], self.direction[1]
            ),
        }
    }
}

/// Whether every sample point of the circle is fixed by h at its time.
pub fn circle_is_fixed(h: &[AffinePiece], c: &FixedCircle, samples: usize) -> bool {
    let Some(piece) = h.iter().find(|p| p.contains_time(&c.t)) else { return false };
    c.sample(samples).iter().all(|z| {
        let img = piece.eval(z, &c.t);
        is_integral(&(&img[0] - &z[0])) && is_integral(&(&img[1] - &z[1]))
    })
}

/// All fixed circles of h, merged across piece junctions, sorted by (t, base).
pub fn fixed_set(h: &[AffinePiece]) -> Result<Vec<FixedCircle>, OracleError> {
    validate_pieces(h)?;
    if !boundary_fixed_point_free(h) {
        return Err(OracleError::BoundaryFixedPoints);
    }
    // (t, r) identifies a circle once L is fixed, since k and w depend only on L.
    let mut found: Vec<(Rat, Rat, FixedCircle)> = Vec::new();
    for piece in h {
        match shape(&piece.linear) {
            Shape::Full => {
                return Err(OracleError::NonCircle(format!("{} (isolated points for every t)", piece.t_lo)));
            }
            Shape::Zero => {
                // whole torus fixed at any t with t beta + gamma integral
                for t in integral_times(&piece.velocity[0], &piece.offset[0], &piece.t_lo, &piece.t_hi)? {
                    if is_integral(&piece.translation(&t)[1]) {
                        return Err(OracleError::NonCircle(t.to_string()));
                    }
                }
            }
            Shape::RankOne { k, w, q, mu } => {
                let mb = dot_rat(&mu, &piece.velocity);
                let mg = dot_rat(&mu, &piece.offset);
                for t in integral_times(&mb, &mg, &piece.t_lo, &piece.t_hi)? {
                    let gamma = piece.translation(&t);
                    for r in circle_parameters(&q, &gamma) {
                        if found.iter().any(|(t2, r2, _)| *t2 == t && *r2 == r) {
                            continue;
                        }
                        let base = [frac(&(&r * int(w[0].clone()))), frac(&(&r * int(w[1].clone())))];
                        let free_coordinate = if k[1].is_zero() {
                            Some(Axis::X)
                        } else if k[0].is_zero() {
                            Some(Axis::Y)
                        } else {
                            None
                        };
                        // the lift moves the circle by the deck translation n
                        let img = piece.eval(&base, &t);
                        let n = [(&img[0] - &base[0]).to_integer(), (&img[1] - &base[1]).to_integer()];
                        let circle = FixedCircle {
                            t: t.clone(),
                            base,
                            direction: k.clone(),
                            free_coordinate,
                            class_marker: Some(Monomial::new(-&n[0], -&n[1])),
                        };
                        found.push((t.clone(), r, circle));
                    }
                }
            }
        }
    }
    let mut circles: Vec<FixedCircle> = found.into_iter().map(|(_, _, c)| c).collect();
    circles.sort_by(|a, b| (&a.t, &a.base).cmp(&(&b.t, &b.base)));
    Ok(circles)
}

/// Times t in [lo, hi] with a t + b an integer. Errors when a = 0 and b is
/// an integer, i.e. the condition holds on a whole interval.
fn integral_times(a: &Rat, b: &Rat, lo: &Rat, hi: &Rat) -> Result<Vec<Rat>, OracleError> {
    if a.is_zero() {
        if is_integral(b) {
            return Err(OracleError::NonCircle(format!("[{lo}, {hi}] (fixed for a whole interval)")));
        }
        return Ok(Vec::new());
    }
    let (v_lo, v_hi) = {
        let x = a * lo + b;
        let y = a * hi + b;
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    };
    let mut n = v_lo.ceil().to_integer();
    let end = v_hi.floor().to_integer();
    let mut out = Vec::new();
    while n <= end {
        out.push((int(n.clone()) - b) / a);
        n += 1;
    }
    out.sort();
    Ok(out)
}

/// r in [0,1) with r q + gamma integral.
fn circle_parameters(q: &IntVec2, gamma: &RatVec2) -> Vec<Rat> {
    let (i, j) = if !q[0].is_zero() { (0, 1) } else { (1, 0) };
    let qi = int(q[i].clone());
    let count = q[i].abs();
    let mut out = Vec::new();
    // r = (n - gamma_i) / q_i, n ranging over one period
    let start = gamma[i].ceil().to_integer();
    let mut n = BigInt::zero();
    while n < count {
        let r = frac(&((int(&start + &n) - &gamma[i]) / &qi));
        if is_integral(&(&r * int(q[j].clone()) + &gamma[j])) && !out.contains(&r) {
            out.push(r);
        }
        n += 1;
    }
    out.sort();
    out
}

pub fn circle_count(h: &[AffinePiece]) -> Result<usize, OracleError> {
    Ok(fixed_set(h)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_pieces_match_display() {
        let h = model_homotopy(&ModelHomotopyParams::square(1, 0, 2));
        assert_eq!(h[0].t_hi, rat(1, 2));
        assert_eq!(h[0].linear, IntMatrix2::new(1, 0, 0, 2));
        assert_eq!(h[0].velocity, [int(2), int(0)]);
        assert_eq!(h[0].offset, [rat(-1, 2), int(0)]);
        let h = model_homotopy(&ModelHomotopyParams::triangulated(0, 0));
        assert_eq!(h[0].linear, IntMatrix2::new(1, 1, 0, -1));
        assert_eq!(h[0].velocity, [int(0), int(0)]);
        assert_eq!(h[0].offset, [rat(1, 2), rat(1, 2)]);
        for c1 in -3..=3 {
            for c2 in -3..=3 {
                validate_pieces(&model_homotopy(&ModelHomotopyParams::triangulated(c1, c2))).unwrap();
                validate_pieces(&model_homotopy(&ModelHomotopyParams::square(c1, c2, 3))).unwrap();
            }
        }
    }

    #[test]
    fn boundary_examples() {
        assert!(boundary_fixed_point_free(&model_homotopy(&ModelHomotopyParams::square(1, 0, 2))));
        let identity = vec![AffinePiece {
            t_lo: int(0),
            t_hi: int(1),
            linear: IntMatrix2::identity(),
            velocity: [int(0), int(0)],
            offset: [int(0), int(0)],
        }];
        assert!(!boundary_fixed_point_free(&identity));
        for c1 in -3..=3 {
            for c2 in -3..=3 {
                assert!(boundary_fixed_point_free(&model_homotopy(&ModelHomotopyParams::triangulated(c1, c2))));
            }
        }
    }

    #[test]
    fn fixed_set_examples() {
        let c = fixed_set(&model_homotopy(&ModelHomotopyParams::square(1, 0, 2))).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].t, rat(1, 4));
        assert_eq!(c[0].level(), Some(&int(0)));
        assert_eq!(c[0].free_coordinate, Some(Axis::X));

        let c = fixed_set(&model_homotopy(&ModelHomotopyParams::square(1, 0, 3))).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|x| x.t == rat(1, 4)));
        assert_eq!(c[0].level(), Some(&int(0)));
        assert_eq!(c[1].level(), Some(&rat(1, 2)));

        assert!(fixed_set(&model_homotopy(&ModelHomotopyParams::square(0, 0, 2))).unwrap().is_empty());
    }

    #[test]
    fn degenerate_plane_is_rejected() {
        let h = vec![AffinePiece {
            t_lo: int(0),
            t_hi: int(1),
            linear: IntMatrix2::identity(),
            velocity: [int(1), int(0)],
            offset: [rat(1, 2), int(0)],
        }];
        assert!(matches!(fixed_set(&h), Err(OracleError::NonCircle(_))));
    }

    #[test]
    fn circles_are_fixed_and_disjoint() {
        for c1 in -3..=3 {
            for c2 in -3..=3 {
                for h in [
                    model_homotopy(&ModelHomotopyParams::triangulated(c1, c2)),
                    model_homotopy(&ModelHomotopyParams::square(c1, c2, -2)),
                ] {
                    let circles = fixed_set(&h).unwrap();
                    for c in &circles {
                        assert!(circle_is_fixed(&h, c, 8));
                    }
                    for (i, a) in circles.iter().enumerate() {
                        for b in &circles[i + 1..] {
                            assert!(a.t != b.t || a.base != b.base);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn straight_line_counts() {
        for c1 in -3i64..=3 {
            for c2 in -3i64..=3 {
                let h = model_homotopy(&ModelHomotopyParams::triangulated(c1, c2));
                let s = straight_line(&h).unwrap();
                assert_eq!(circle_count(&s).unwrap() as i64, (2 * c1 + c2).abs());
                let printed = circle_count(&h).unwrap() as i64;
                assert_eq!(printed, 2 * c1.abs() + c2.abs());
            }
        }
    }
}
