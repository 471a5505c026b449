//! The two CW decompositions of the torus with the operator matrices of the
//! model homotopies, entered as data tables.
//!
//! Matrix conventions: column j is the image of the j-th cell, rows index the
//! target cells, and a lifted cell translated by (m, n) carries the
//! coefficient u^-m v^-n. Shapes: partial1 is #0 x #1, partial2 is #1 x #2,
//! d0 is #1 x #0 and d1 is #2 x #1.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::matrix::RingMatrix;
use crate::oracle::{ModelCase, ModelHomotopyParams};
use crate::ring::{helper_sum, Endo, HelperKind, Monomial, RingElt};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellModel {
    pub name: ModelCase,
    pub cell_counts: [usize; 3],
    pub partial1: RingMatrix,
    pub partial2: RingMatrix,
    pub d0: RingMatrix,
    pub d1: RingMatrix,
    pub phi: Endo,
    pub params: ModelHomotopyParams,
}

fn mono(a: impl Into<BigInt>, b: impl Into<BigInt>) -> RingElt {
    RingElt::from(Monomial::new(a, b))
}

fn c(n: i64) -> RingElt {
    RingElt::constant(n)
}

/// Square decomposition: 0-cells (0,0), (1/2,0); 1-cells (0,0)->(1/2,0),
/// (1/2,0)->(1,0), (0,0)->(0,1), (1/2,0)->(1/2,1); 2-cells the two vertical
/// strips [0,1/2]x[0,1] and [1/2,1]x[0,1]. phi = (1,0,0,b4).
pub fn build_square_model(c1: impl Into<BigInt>, c2: impl Into<BigInt>, b4: impl Into<BigInt>) -> CellModel {
    let params = ModelHomotopyParams::square(c1, c2, b4);
    let (c1, c2, b4) = (&params.c1, &params.c2, &params.b4);
    let x = helper_sum(HelperKind::X, c1);
    let y = helper_sum(HelperKind::Y, c1);
    let w = helper_sum(HelperKind::W, c2);
    let wb = helper_sum(HelperKind::W, b4);
    let z = RingElt::zero;
    let vm = &mono(0, -1) - &c(1);
    let u1c = &mono(1 - c1, 0) * &w;
    let uc = &mono(-c1, 0) * &w;

    let partial1 =
        RingMatrix::from_rows(vec![vec![c(-1), mono(-1, 0), vm.clone(), z()], vec![c(1), c(-1), z(), vm.clone()]]);
    let partial2 = RingMatrix::from_rows(vec![
        vec![vm.clone(), z()],
        vec![z(), vm.clone()],
        vec![c(1), -mono(-1, 0)],
        vec![c(-1), c(1)],
    ]);
    let d0 = RingMatrix::from_rows(vec![vec![-&x, -&x], vec![-&y, -&x], vec![z(), -&uc], vec![-&u1c, z()]]);
    let d1 = RingMatrix::from_rows(vec![
        vec![z(), u1c.clone(), &x * &wb, &x * &wb],
        vec![u1c.clone(), z(), &y * &wb, &x * &wb],
    ]);
    CellModel {
        name: ModelCase::SquareB3Zero,
        cell_counts: [2, 4, 2],
        partial1,
        partial2,
        d0,
        d1,
        phi: Endo::new(1, 0, 0, b4.clone()),
        params,
    }
}

/// Triangulated decomposition with vertices (0,0), (1/2,0), (0,1/2),
/// (1/2,1/2), twelve edges and eight triangles (see `geometry`). phi = (1,0,1,-1).
pub fn build_triangulated_model(c1: impl Into<BigInt>, c2: impl Into<BigInt>) -> CellModel {
    let params = ModelHomotopyParams::triangulated(c1, c2);
    let (c1, c2) = (&params.c1, &params.c2);
    let x = helper_sum(HelperKind::X, c1);
    let w = helper_sum(HelperKind::W, c2);
    let z = RingElt::zero;
    let ui = mono(-1, 0);
    let vi = mono(0, -1);
    // u^a v^b X(c1) and u^a v^b W(c2)
    let ux = |a: BigInt, b: i64| &mono(a, b) * &x;
    let uw = |a: BigInt, b: i64| &mono(a, b) * &w;
    let m0: BigInt = -c1.clone();
    let m1: BigInt = -c1.clone() - 1;
    let k = |n: i64| BigInt::from(n);

    let partial1 = RingMatrix::from_rows(vec![
        vec![c(-1), ui.clone(), c(-1), z(), z(), ui.clone(), z(), z(), vi.clone(), -&vi, z(), z()],
        vec![c(1), c(-1), z(), c(1), c(-1), z(), z(), z(), z(), z(), vi.clone(), -&vi],
        vec![z(), z(), c(1), c(-1), z(), z(), c(-1), ui.clone(), c(-1), z(), z(), ui.clone()],
        vec![z(), z(), z(), z(), c(1), c(-1), c(1), c(-1), z(), c(1), c(-1), z()],
    ]);
    let nv = -&vi;
    let partial2 = RingMatrix::from_rows(vec![
        vec![c(1), z(), z(), z(), z(), nv.clone(), z(), z()],
        vec![z(), z(), c(1), z(), z(), z(), z(), nv.clone()],
        vec![c(-1), z(), z(), ui.clone(), z(), z(), z(), z()],
        vec![c(-1), c(1), z(), z(), z(), z(), z(), z()],
        vec![z(), c(1), c(-1), z(), z(), z(), z(), z()],
        vec![z(), z(), c(-1), c(1), z(), z(), z(), z()],
        vec![z(), c(-1), z(), z(), c(1), z(), z(), z()],
        vec![z(), z(), z(), c(-1), z(), z(), c(1), z()],
        vec![z(), z(), z(), z(), c(-1), z(), z(), ui.clone()],
        vec![z(), z(), z(), z(), c(-1), c(1), z(), z()],
        vec![z(), z(), z(), z(), z(), c(1), c(-1), z()],
        vec![z(), z(), z(), z(), z(), z(), c(-1), c(1)],
    ]);
    let d0 = RingMatrix::from_rows(vec![
        vec![z(), z(), -ux(k(-1), 0), -ux(k(-2), 0)],
        vec![z(), z(), -ux(k(-1), 0), -ux(k(-1), 0)],
        vec![z(), -uw(k(0), -1), -uw(m1.clone(), 0), z()],
        vec![z(), z(), z(), z()],
        vec![-uw(m0.clone(), -1), z(), z(), -uw(m1.clone(), 0)],
        vec![z(), z(), z(), z()],
        vec![-ux(m0.clone(), 0), -ux(k(-1), 0), z(), z()],
        vec![-x.clone(), -ux(k(-1), 0), z(), z()],
        vec![z(), -uw(m1.clone(), 0), -uw(m1.clone(), 0), z()],
        vec![z(), z(), z(), z()],
        vec![-uw(m0.clone(), 0), z(), z(), -uw(m0.clone(), 0)],
        vec![z(), z(), z(), z()],
    ]);
    // Images of the twelve 1-cells, as (2-cell, coefficient) lists.
    let images: Vec<Vec<(usize, RingElt)>> = vec![
        vec![(3, uw(m0.clone(), -1)), (4, uw(m0.clone(), -1)), (7, uw(m0.clone(), 0)), (8, uw(m0.clone(), 0))],
        vec![(1, uw(m1.clone(), -1)), (2, uw(m1.clone(), -1)), (5, uw(m1.clone(), 0)), (6, uw(m1.clone(), 0))],
        vec![
            (1, ux(m0.clone(), 0)),
            (2, ux(m0.clone(), 0)),
            (3, &ux(m0.clone(), 0) + &uw(m0.clone(), -1)),
            (4, &x + &uw(m0.clone(), 0)),
            (7, uw(m0.clone(), 0)),
            (8, uw(m0.clone(), 0)),
        ],
        vec![(1, ux(m0.clone(), 0)), (2, ux(m0.clone(), 0)), (3, ux(m0.clone(), 0)), (4, ux(m0.clone(), 0))],
        vec![
            (1, &ux(k(-2), 0) + &uw(m1.clone(), -1)),
            (2, &ux(k(-1), 0) + &uw(m1.clone(), 0)),
            (3, ux(k(-1), 0)),
            (4, ux(k(-1), 0)),
            (5, uw(m1.clone(), 0)),
            (6, uw(m1.clone(), 0)),
        ],
        vec![(1, ux(k(-2), 0)), (2, ux(k(-2), 0)), (3, ux(k(-1), 0)), (4, ux(k(-1), 0))],
        vec![(1, uw(m1.clone(), -1)), (2, uw(m1.clone(), -1)), (5, uw(m1.clone(), -1)), (6, uw(m1.clone(), -1))],
        vec![(1, uw(m1.clone(), 0)), (2, uw(m1.clone(), 0)), (5, uw(m1.clone(), 0)), (6, uw(m1.clone(), 0))],
        vec![
            (1, uw(m1.clone(), 0)),
            (2, uw(m1.clone(), 0)),
            (5, &ux(k(-2), 1) + &uw(m1.clone(), 0)),
            (6, &ux(k(-1), 1) + &uw(m1.clone(), 1)),
            (7, ux(k(-1), 1)),
            (8, ux(k(-1), 1)),
        ],
        vec![(5, ux(k(-2), 1)), (6, ux(k(-2), 1)), (7, ux(k(-1), 1)), (8, ux(k(-1), 1))],
        vec![
            (3, uw(m1.clone(), 0)),
            (4, uw(m1.clone(), 0)),
            (5, ux(k(-2), 1)),
            (6, ux(k(-2), 1)),
            (7, &ux(k(-2), 1) + &uw(m1.clone(), 0)),
            (8, &ux(k(-1), 1) + &uw(m1.clone(), 1)),
        ],
        vec![(5, ux(k(-2), 1)), (6, ux(k(-2), 1)), (7, ux(k(-2), 1)), (8, ux(k(-2), 1))],
    ];
    let mut d1 = RingMatrix::zeros(8, 12);
    for (j, img) in images.into_iter().enumerate() {
        for (face, coeff) in img {
            d1.set(face - 1, j, coeff);
        }
    }
    CellModel {
        name: ModelCase::TriB4MinusOne,
        cell_counts: [4, 12, 8],
        partial1,
        partial2,
        d0,
        d1,
        phi: Endo::new(1, 0, 1, -1),
        params,
    }
}

pub fn build_model(p: &ModelHomotopyParams) -> CellModel {
    match p.case {
        ModelCase::SquareB3Zero => build_square_model(p.c1.clone(), p.c2.clone(), p.b4.clone()),
        ModelCase::TriB4MinusOne => build_triangulated_model(p.c1.clone(), p.c2.clone()),
    }
}

/// partial1 * partial2 = 0
pub fn verify_complex(m: &CellModel) -> bool {
    m.partial1.mul(&m.partial2).is_some_and(|p| p.is_zero())
}

impl CellModel {
    /// Reverses the orientation of one cell: negates its row and column in
    /// every operator matrix.
    pub fn flip_orientation(&self, dim: usize, index: usize) -> CellModel {
        let mut m = self.clone();
        match dim {
            0 => {
                m.partial1.negate_row(index);
                m.d0.negate_col(index);
            }
            1 => {
                m.partial1.negate_col(index);
                m.partial2.negate_row(index);
                m.d0.negate_row(index);
                m.d1.negate_col(index);
            }
            2 => {
                m.partial2.negate_col(index);
                m.d1.negate_row(index);
            }
            _ => panic!("no cells of dimension {dim}"),
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_examples() {
        let m = build_square_model(0, 0, 2);
        assert!(m.d0.is_zero());
        let m = build_square_model(1, 0, 2);
        assert_eq!(m.d1.get(0, 2), &"1 + v^-1".parse().unwrap());
        assert!(verify_complex(&m));
        assert_eq!((m.partial1.rows(), m.partial1.cols()), (2, 4));
        assert_eq!((m.partial2.rows(), m.partial2.cols()), (4, 2));
        assert_eq!((m.d0.rows(), m.d0.cols()), (4, 2));
        assert_eq!((m.d1.rows(), m.d1.cols()), (2, 4));
    }

    #[test]
    fn triangulated_examples() {
        let m = build_triangulated_model(0, 1);
        let column: Vec<&RingElt> = (0..8).map(|i| m.d1.get(i, 0)).filter(|e| !e.is_zero()).collect();
        assert_eq!(column.len(), 4);
        assert!(column.iter().all(|e| e.len() == 1));
        let m = build_triangulated_model(0, 0);
        assert!(m.d0.is_zero() && m.d1.is_zero());
        assert!(verify_complex(&m));
        assert_eq!(m.cell_counts, [4, 12, 8]);
    }

    #[test]
    fn corrupted_matrix_fails_complex_check() {
        let mut m = build_triangulated_model(1, 1);
        let e = -m.partial2.get(3, 1);
        m.partial2.set(3, 1, e);
        assert!(!verify_complex(&m));
        let mut m = build_square_model(1, 0, 2);
        let e = -m.partial1.get(0, 0);
        m.partial1.set(0, 0, e);
        assert!(!verify_complex(&m));
    }

    #[test]
    fn complex_on_grid() {
        for c1 in -4..=4 {
            for c2 in -4..=4 {
                assert!(verify_complex(&build_triangulated_model(c1, c2)));
                for b4 in -3..=4 {
                    assert!(verify_complex(&build_square_model(c1, c2, b4)));
                }
            }
        }
    }
}
