//! Cellular chains of the lifted cell structures, computed from coordinates.
//!
//! Used to derive the chain maps of the end maps F(., 0) and F(., 1) of a
//! model homotopy, to re-derive the operators ∂ and D from the lifted
//! homotopy, and to check the chain homotopy identity
//! ∂ D + D ∂ = F0 - F1 on the tabulated matrices.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::cells::CellModel;
use crate::error::GeometryError;
use crate::lattice::IntMatrix2;
use crate::matrix::RingMatrix;
use crate::oracle::{int, model_homotopy, rat, AffinePiece, ModelCase, Rat, RatVec2};
use crate::ring::{Monomial, RingElt};

/// Lifted cells in [0,1]^2. Edges run from their first to their second
/// point; faces are listed counterclockwise with their orientation relative
/// to the counterclockwise one.
#[derive(Clone, Debug)]
pub struct CellGeometry {
    pub vertices: Vec<RatVec2>,
    pub edges: Vec<(RatVec2, RatVec2)>,
    pub faces: Vec<(Vec<RatVec2>, i32)>,
}

fn pt(x: (i64, i64), y: (i64, i64)) -> RatVec2 {
    [rat(x.0, x.1), rat(y.0, y.1)]
}

fn h(n: i64) -> (i64, i64) {
    (n, 2)
}

pub fn square_geometry() -> CellGeometry {
    let p = |a: i64, b: i64| pt(h(a), h(b));
    CellGeometry {
        vertices: vec![p(0, 0), p(1, 0)],
        edges: vec![(p(0, 0), p(1, 0)), (p(1, 0), p(2, 0)), (p(0, 0), p(0, 2)), (p(1, 0), p(1, 2))],
        faces: vec![(vec![p(0, 0), p(1, 0), p(1, 2), p(0, 2)], -1), (vec![p(1, 0), p(2, 0), p(2, 2), p(1, 2)], -1)],
    }
}

pub fn triangulated_geometry() -> CellGeometry {
    let p = |a: i64, b: i64| pt(h(a), h(b));
    let edges = vec![
        (p(0, 0), p(1, 0)),
        (p(1, 0), p(2, 0)),
        (p(0, 0), p(0, 1)),
        (p(0, 1), p(1, 0)),
        (p(1, 0), p(1, 1)),
        (p(1, 1), p(2, 0)),
        (p(0, 1), p(1, 1)),
        (p(1, 1), p(2, 1)),
        (p(0, 1), p(0, 2)),
        (p(0, 2), p(1, 1)),
        (p(1, 1), p(1, 2)),
        (p(1, 2), p(2, 1)),
    ];
    let faces = vec![
        (vec![p(0, 0), p(1, 0), p(0, 1)], 1),
        (vec![p(1, 0), p(1, 1), p(0, 1)], 1),
        (vec![p(1, 0), p(2, 0), p(1, 1)], 1),
        (vec![p(2, 0), p(2, 1), p(1, 1)], 1),
        (vec![p(0, 1), p(1, 1), p(0, 2)], 1),
        (vec![p(1, 1), p(1, 2), p(0, 2)], 1),
        (vec![p(1, 1), p(2, 1), p(1, 2)], 1),
        (vec![p(2, 1), p(2, 2), p(1, 2)], 1),
    ];
    CellGeometry { vertices: vec![p(0, 0), p(1, 0), p(0, 1), p(1, 1)], edges, faces }
}

pub fn geometry_for(case: ModelCase) -> CellGeometry {
    match case {
        ModelCase::SquareB3Zero => square_geometry(),
        ModelCase::TriB4MinusOne => triangulated_geometry(),
    }
}

fn sub(a: &RatVec2, b: &RatVec2) -> RatVec2 {
    [&a[0] - &b[0], &a[1] - &b[1]]
}

fn add(a: &RatVec2, b: &RatVec2) -> RatVec2 {
    [&a[0] + &b[0], &a[1] + &b[1]]
}

fn cross(a: &RatVec2, b: &RatVec2) -> Rat {
    &a[0] * &b[1] - &a[1] * &b[0]
}

fn dot(a: &RatVec2, b: &RatVec2) -> Rat {
    &a[0] * &b[0] + &a[1] * &b[1]
}

fn apply(l: &IntMatrix2, z: &RatVec2) -> RatVec2 {
    [int(l.a11.clone()) * &z[0] + int(l.a12.clone()) * &z[1], int(l.a21.clone()) * &z[0] + int(l.a22.clone()) * &z[1]]
}

fn translate(z: &RatVec2, n: &[BigInt; 2]) -> RatVec2 {
    [&z[0] + int(n[0].clone()), &z[1] + int(n[1].clone())]
}

/// Coefficient of the lifted cell translated by n.
fn coefficient(n: &[BigInt; 2]) -> Monomial {
    Monomial::new(-&n[0], -&n[1])
}

fn signed_area2(poly: &[RatVec2]) -> Rat {
    let mut a = Rat::zero();
    for i in 0..poly.len() {
        a += cross(&poly[i], &poly[(i + 1) % poly.len()]);
    }
    a
}

fn ccw(mut poly: Vec<RatVec2>) -> Vec<RatVec2> {
    if signed_area2(&poly).is_negative() {
        poly.reverse();
    }
    poly
}

fn strictly_inside(poly_ccw: &[RatVec2], p: &RatVec2) -> bool {
    (0..poly_ccw.len()).all(|i| {
        let a = &poly_ccw[i];
        let b = &poly_ccw[(i + 1) % poly_ccw.len()];
        cross(&sub(b, a), &sub(p, a)).is_positive()
    })
}

fn barycenter(poly: &[RatVec2]) -> RatVec2 {
    let n = int(poly.len() as i64);
    let s = poly.iter().fold([Rat::zero(), Rat::zero()], |acc, p| add(&acc, p));
    [&s[0] / &n, &s[1] / &n]
}

/// Integer translations n for which [0,1]^2 + n meets the box around `pts`.
fn translations(pts: &[RatVec2]) -> Vec<[BigInt; 2]> {
    let lo = |k: usize| -> BigInt { pts.iter().map(|p| p[k].floor().to_integer()).min().unwrap() - 1 };
    let hi = |k: usize| -> BigInt { pts.iter().map(|p| p[k].ceil().to_integer()).max().unwrap() };
    let mut out = Vec::new();
    let mut x = lo(0);
    while x <= hi(0) {
        let mut y = lo(1);
        while y <= hi(1) {
            out.push([x.clone(), y.clone()]);
            y += 1;
        }
        x += 1;
    }
    out
}

fn column(len: usize) -> Vec<RingElt> {
    vec![RingElt::zero(); len]
}

fn bump(col: &mut [RingElt], i: usize, n: &[BigInt; 2], c: i64) {
    col[i].add_term(coefficient(n), BigInt::from(c));
}

impl CellGeometry {
    pub fn counts(&self) -> [usize; 3] {
        [self.vertices.len(), self.edges.len(), self.faces.len()]
    }

    /// The 0-chain of a vertex of the lifted structure.
    pub fn point_chain(&self, p: &RatVec2) -> Result<Vec<RingElt>, GeometryError> {
        let mut col = column(self.vertices.len());
        for (j, v) in self.vertices.iter().enumerate() {
            let d = sub(p, v);
            if d[0].is_integer() && d[1].is_integer() {
                bump(&mut col, j, &[d[0].to_integer(), d[1].to_integer()], 1);
                return Ok(col);
            }
        }
        Err(GeometryError::NotCellular(format!("({}, {}) is not a vertex", p[0], p[1])))
    }

    /// The 1-chain of the oriented segment from p to q (zero if p = q).
    pub fn segment_chain(&self, p: &RatVec2, q: &RatVec2) -> Result<Vec<RingElt>, GeometryError> {
        let mut col = column(self.edges.len());
        let dir = sub(q, p);
        let len2 = dot(&dir, &dir);
        if len2.is_zero() {
            return Ok(col);
        }
        let mut covered = Rat::zero();
        for n in translations(&[p.clone(), q.clone()]) {
            for (j, (a, b)) in self.edges.iter().enumerate() {
                let e = sub(b, a);
                if !cross(&e, &dir).is_zero() {
                    continue;
                }
                let a = translate(a, &n);
                if !cross(&sub(&a, p), &dir).is_zero() {
                    continue;
                }
                let mid = add(&a, &[&e[0] / int(2), &e[1] / int(2)]);
                let s = dot(&sub(&mid, p), &dir) / &len2;
                if s.is_positive() && s < int(1) {
                    let along = dot(&e, &dir) / &len2;
                    bump(&mut col, j, &n, if along.is_positive() { 1 } else { -1 });
                    covered += along.abs();
                }
            }
        }
        if covered != int(1) {
            return Err(GeometryError::NotCellular(format!(
                "segment ({}, {}) -> ({}, {}) is not a union of edges",
                p[0], p[1], q[0], q[1]
            )));
        }
        Ok(col)
    }

    /// sign times the 2-chain of a convex polygon region.
    pub fn region_chain(&self, poly: &[RatVec2], sign: i32) -> Result<Vec<RingElt>, GeometryError> {
        let mut col = column(self.faces.len());
        let poly = ccw(poly.to_vec());
        let area = signed_area2(&poly);
        if area.is_zero() {
            return Ok(col);
        }
        let mut covered = Rat::zero();
        for n in translations(&poly) {
            for (j, (face, orientation)) in self.faces.iter().enumerate() {
                if strictly_inside(&poly, &translate(&barycenter(face), &n)) {
                    bump(&mut col, j, &n, (sign * orientation) as i64);
                    covered += signed_area2(face);
                }
            }
        }
        if covered != area {
            return Err(GeometryError::NotCellular("region is not a union of faces".into()));
        }
        Ok(col)
    }

    pub fn boundary1(&self) -> Result<RingMatrix, GeometryError> {
        let mut cols = Vec::new();
        for (a, b) in &self.edges {
            let end = self.point_chain(b)?;
            let start = self.point_chain(a)?;
            cols.push(end.iter().zip(&start).map(|(x, y)| x - y).collect());
        }
        Ok(from_columns(self.vertices.len(), cols))
    }

    pub fn boundary2(&self) -> Result<RingMatrix, GeometryError> {
        let mut cols = Vec::new();
        for (face, orientation) in &self.faces {
            let mut col = column(self.edges.len());
            for i in 0..face.len() {
                let seg = self.segment_chain(&face[i], &face[(i + 1) % face.len()])?;
                for (c, s) in col.iter_mut().zip(seg) {
                    *c = &*c + &s;
                }
            }
            if *orientation < 0 {
                col = col.iter().map(|c| -c).collect();
            }
            cols.push(col);
        }
        Ok(from_columns(self.edges.len(), cols))
    }

    /// Cellular chain maps, in dimensions 0, 1, 2, of z -> L z + gamma.
    pub fn affine_chain_maps(&self, l: &IntMatrix2, gamma: &RatVec2) -> Result<[RingMatrix; 3], GeometryError> {
        let image = |z: &RatVec2| add(&apply(l, z), gamma);
        let mut c0 = Vec::new();
        for v in &self.vertices {
            c0.push(self.point_chain(&image(v))?);
        }
        let mut c1 = Vec::new();
        for (a, b) in &self.edges {
            c1.push(self.segment_chain(&image(a), &image(b))?);
        }
        let det = l.det();
        let mut c2 = Vec::new();
        for (face, orientation) in &self.faces {
            if det.is_zero() {
                c2.push(column(self.faces.len()));
                continue;
            }
            let img: Vec<RatVec2> = face.iter().map(&image).collect();
            let sign = orientation * if det.is_positive() { 1 } else { -1 };
            c2.push(self.region_chain(&img, sign)?);
        }
        Ok([
            from_columns(self.vertices.len(), c0),
            from_columns(self.edges.len(), c1),
            from_columns(self.faces.len(), c2),
        ])
    }

    /// D0 and D1 of a lifted piecewise-affine homotopy: D0(v) is minus the
    /// path t -> F(v, t), D1(E) is the image of E x I.
    pub fn homotopy_operators(&self, h: &[AffinePiece]) -> Result<(RingMatrix, RingMatrix), GeometryError> {
        let mut d0 = Vec::new();
        for v in &self.vertices {
            let mut col = column(self.edges.len());
            for piece in h {
                let seg = self.segment_chain(&piece.eval(v, &piece.t_lo), &piece.eval(v, &piece.t_hi))?;
                for (c, s) in col.iter_mut().zip(seg) {
                    *c = &*c - &s;
                }
            }
            d0.push(col);
        }
        let mut d1 = Vec::new();
        for (a, b) in &self.edges {
            let mut col = column(self.faces.len());
            for piece in h {
                let e = apply(&piece.linear, &sub(b, a));
                let dt = &piece.t_hi - &piece.t_lo;
                let shift = [&piece.velocity[0] * &dt, &piece.velocity[1] * &dt];
                let jac = cross(&e, &piece.velocity);
                if jac.is_zero() {
                    continue;
                }
                let p0 = piece.eval(a, &piece.t_lo);
                let p1 = add(&p0, &e);
                let p2 = add(&p1, &shift);
                let p3 = add(&p0, &shift);
                let region = self.region_chain(&[p0, p1, p2, p3], if jac.is_positive() { 1 } else { -1 })?;
                for (c, s) in col.iter_mut().zip(region) {
                    *c = &*c + &s;
                }
            }
            d1.push(col);
        }
        Ok((from_columns(self.edges.len(), d0), from_columns(self.faces.len(), d1)))
    }
}

fn from_columns(rows: usize, cols: Vec<Vec<RingElt>>) -> RingMatrix {
    let mut m = RingMatrix::zeros(rows, cols.len());
    for (j, col) in cols.into_iter().enumerate() {
        for (i, x) in col.into_iter().enumerate() {
            m.set(i, j, x);
        }
    }
    m
}

/// Chain maps of the end maps F(., 0) and F(., 1) of the model homotopy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMaps {
    pub f0: [RingMatrix; 3],
    pub f1: [RingMatrix; 3],
}

pub fn boundary_chain_maps(m: &CellModel) -> Result<ChainMaps, GeometryError> {
    let geom = geometry_for(m.name);
    let h = model_homotopy(&m.params);
    let (first, last) = (&h[0], &h[h.len() - 1]);
    Ok(ChainMaps {
        f0: geom.affine_chain_maps(&first.linear, &first.translation(&first.t_lo))?,
        f1: geom.affine_chain_maps(&last.linear, &last.translation(&last.t_hi))?,
    })
}

/// Copy of the model with D0, D1 re-derived from its lifted homotopy.
pub fn derived_model(m: &CellModel) -> Result<CellModel, GeometryError> {
    let (d0, d1) = geometry_for(m.name).homotopy_operators(&model_homotopy(&m.params))?;
    Ok(CellModel { d0, d1, ..m.clone() })
}

/// Checks, in each dimension k, ∂_{k+1} D_k + D_{k-1} phi(∂_k) = F0_k - F1_k
/// on the model's tabulated matrices. D is twisted by phi, so composing D
/// after ∂ applies phi to the entries of ∂.
pub fn chain_homotopy_identity(m: &CellModel) -> Result<bool, GeometryError> {
    let maps = boundary_chain_maps(m)?;
    let diff = |k: usize| maps.f0[k].add(&maps.f1[k].neg()).expect("same shape");
    let phi = &m.phi;
    let k0 = m.partial1.mul(&m.d0).expect("shapes");
    let k1 = m.partial2.mul(&m.d1).and_then(|a| a.add(&m.d0.mul(&m.partial1.apply_endo(phi))?)).expect("shapes");
    let k2 = m.d1.mul(&m.partial2.apply_endo(phi)).expect("shapes");
    Ok(k0 == diff(0) && k1 == diff(1) && k2 == diff(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::{build_square_model, build_triangulated_model};

    #[test]
    fn derived_boundaries_match_tables() {
        let sq = build_square_model(1, 2, 3);
        let g = square_geometry();
        assert_eq!(g.boundary1().unwrap(), sq.partial1);
        assert_eq!(g.boundary2().unwrap(), sq.partial2);
        let tri = build_triangulated_model(1, 2);
        let g = triangulated_geometry();
        assert_eq!(g.boundary1().unwrap(), tri.partial1);
        assert_eq!(g.boundary2().unwrap(), tri.partial2);
    }

    #[test]
    fn degenerate_square_has_equal_end_maps() {
        let maps = boundary_chain_maps(&build_square_model(0, 0, 1)).unwrap();
        assert_eq!(maps.f0, maps.f1);
    }

    #[test]
    fn tabulated_identity_first_branch() {
        for c1 in 0..=3 {
            for b4 in [-2, -1, 0, 2, 3] {
                assert!(chain_homotopy_identity(&build_square_model(c1, 0, b4)).unwrap(), "square {c1} {b4}");
            }
        }
        assert!(!chain_homotopy_identity(&build_square_model(0, 1, 2)).unwrap());
    }

    #[test]
    fn derived_operators_satisfy_identity() {
        for c1 in -2..=2 {
            for c2 in -2..=2 {
                for b4 in [-2, -1, 0, 2, 3] {
                    let m = derived_model(&build_square_model(c1, c2, b4)).unwrap();
                    assert!(chain_homotopy_identity(&m).unwrap(), "square {c1} {c2} {b4}");
                }
                let m = derived_model(&build_triangulated_model(c1, c2)).unwrap();
                assert!(chain_homotopy_identity(&m).unwrap(), "tri {c1} {c2}");
            }
        }
    }

    #[test]
    fn derived_matches_tables_without_second_branch() {
        for c1 in 0..=3 {
            for b4 in [-2, 0, 2, 3] {
                let m = build_square_model(c1, 0, b4);
                assert_eq!(derived_model(&m).unwrap(), m);
            }
        }
    }

    #[test]
    fn derived_and_tabulated_indices() {
        use crate::trace::trace_report;
        for c1 in -3..=3 {
            for c2 in -3..=3 {
                let m = build_triangulated_model(c1, c2);
                let a = trace_report(&m).unwrap();
                let b = trace_report(&derived_model(&m).unwrap()).unwrap();
                assert_eq!(a.indices, b.indices, "tri {c1} {c2}");
                if c1 >= 0 {
                    let m = build_square_model(c1, c2, 3);
                    let a = trace_report(&m).unwrap();
                    let b = trace_report(&derived_model(&m).unwrap()).unwrap();
                    assert_eq!(a.indices, b.indices, "square {c1} {c2}");
                }
            }
        }
    }

    #[test]
    fn derived_classes_match_fixed_circles() {
        use crate::lattice::SemiClass;
        use crate::oracle::fixed_set;
        use crate::trace::trace_report;
        for c1 in -3..=3 {
            for b4 in [-2, 0, 2, 3] {
                let m = derived_model(&build_square_model(c1, 1, b4)).unwrap();
                let rep = trace_report(&m).unwrap();
                let mut circles: Vec<SemiClass> = fixed_set(&model_homotopy(&m.params))
                    .unwrap()
                    .iter()
                    .map(|c| SemiClass::of(c.class_marker.as_ref().unwrap(), &m.phi))
                    .collect();
                circles.sort();
                circles.dedup();
                let traced: Vec<SemiClass> = rep.indices.entries.keys().cloned().collect();
                assert_eq!(traced, circles, "square {c1} {b4}");
            }
        }
    }
}
