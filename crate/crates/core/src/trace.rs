//! One-parameter trace R(F), class indices, N(F) and L(F) of a cellular model.
//!
//! R(F) is the Hochschild trace of the block operators ∂_* = ∂1 ⊕ ∂2 and
//! D_* = (-1)^{k+1} D_k, taken on the D-matrices as they are tabulated (which
//! already include the sign of their own definition). Block-wise this is
//! R(F) = -trace(∂1 ⊗ D0) + trace(∂2 ⊗ D1).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cells::CellModel;
use crate::error::{HochschildError, TraceError};
use crate::hochschild::{d1, reduce_cycle, split_by_class, tensor_trace, Chain1};
use crate::lattice::{vec2, IntVec2, SemiClass};
use crate::matrix::RingMatrix;
use crate::oracle::{boundary_fixed_point_free, model_homotopy};
use crate::ring::{Endo, Monomial};

/// Nonzero fixed point indices keyed by semiconjugacy class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassIndexMap {
    pub entries: BTreeMap<SemiClass, BigInt>,
}

impl ClassIndexMap {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, class: SemiClass, index: BigInt) {
        if !index.is_zero() {
            self.entries.insert(class, index);
        }
    }
}

#[derive(Serialize, Deserialize)]
struct IndexEntry {
    marker: Monomial,
    #[serde(with = "crate::serde_util::bigint")]
    index: BigInt,
}

impl Serialize for ClassIndexMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let list: Vec<IndexEntry> =
            self.entries.iter().map(|(c, i)| IndexEntry { marker: c.rep.clone(), index: i.clone() }).collect();
        list.serialize(s)
    }
}

/// Block operators (∂_*, D_*) on the direct sum of all cells, ordered by
/// dimension.
pub fn assemble_operators(m: &CellModel) -> (RingMatrix, RingMatrix) {
    let [n0, n1, n2] = m.cell_counts;
    let n = n0 + n1 + n2;
    let mut boundary = RingMatrix::zeros(n, n);
    let mut homotopy = RingMatrix::zeros(n, n);
    for i in 0..n0 {
        for j in 0..n1 {
            boundary.set(i, n0 + j, m.partial1.get(i, j).clone());
            homotopy.set(n0 + j, i, -m.d0.get(j, i));
        }
    }
    for i in 0..n1 {
        for j in 0..n2 {
            boundary.set(n0 + i, n0 + n1 + j, m.partial2.get(i, j).clone());
            homotopy.set(n0 + n1 + j, n0 + i, m.d1.get(j, i).clone());
        }
    }
    (boundary, homotopy)
}

/// R(F) for the model's homotopy. Requires fixed point free end maps and
/// checks that the result is a cycle.
pub fn one_parameter_trace(m: &CellModel) -> Result<Chain1, TraceError> {
    if !boundary_fixed_point_free(&model_homotopy(&m.params)) {
        return Err(TraceError::BoundaryFixedPoints);
    }
    let (boundary, homotopy) = assemble_operators(m);
    let t = tensor_trace(&boundary, &homotopy, &m.phi)?;
    let rest = d1(&t.chain, &m.phi);
    if !t.criterion_holds || !rest.is_zero() {
        return Err(TraceError::NotACycle(rest.to_string()));
    }
    Ok(t.chain)
}

pub fn class_indices(r: &Chain1, phi: &Endo) -> Result<ClassIndexMap, HochschildError> {
    let mut out = ClassIndexMap::default();
    for (class, part) in split_by_class(r, phi) {
        let red = reduce_cycle(&part, &class, phi)?;
        out.insert(class, red.index);
    }
    Ok(out)
}

pub fn nielsen_number(indices: &ClassIndexMap) -> usize {
    indices.entries.values().filter(|i| !i.is_zero()).count()
}

/// Sum of the class indices pushed into H1(G) = Z^2. Each semicentralizer is
/// generated by u in the supported regime, so an index n contributes (n, 0).
pub fn lefschetz_class(indices: &ClassIndexMap, _phi: &Endo) -> IntVec2 {
    let total: BigInt = indices.entries.values().sum();
    vec2(total, 0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceReport {
    pub r_chain: Chain1,
    pub indices: ClassIndexMap,
    pub nielsen: usize,
    #[serde(with = "crate::serde_util::int_pair")]
    pub lefschetz: IntVec2,
}

pub fn trace_report(m: &CellModel) -> Result<TraceReport, TraceError> {
    let r_chain = one_parameter_trace(m)?;
    let indices = class_indices(&r_chain, &m.phi)?;
    let nielsen = nielsen_number(&indices);
    let lefschetz = lefschetz_class(&indices, &m.phi);
    Ok(TraceReport { r_chain, indices, nielsen, lefschetz })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::{build_square_model, build_triangulated_model};
    use num_traits::Signed;

    #[test]
    fn zero_parameters_give_zero_trace() {
        for b4 in [-2, 0, 2, 5] {
            assert!(one_parameter_trace(&build_square_model(0, 0, b4)).unwrap().is_zero());
        }
    }

    #[test]
    fn square_single_class() {
        let rep = trace_report(&build_square_model(1, 0, 2)).unwrap();
        assert_eq!(rep.nielsen, 1);
        let (class, index) = rep.indices.entries.iter().next().unwrap();
        assert!(class.contains(&Monomial::v(-1)));
        assert_eq!(index.abs(), BigInt::from(1));
        assert_eq!(rep.lefschetz[0].abs(), BigInt::from(1));
        assert!(rep.lefschetz[1].is_zero());
    }

    #[test]
    fn square_two_classes() {
        let rep = trace_report(&build_square_model(2, 0, 2)).unwrap();
        assert_eq!(rep.nielsen, 2);
        assert!(rep.indices.entries.values().all(|i| i.abs() == BigInt::from(1)));
    }

    #[test]
    fn triangulated_count() {
        assert_eq!(trace_report(&build_triangulated_model(1, 1)).unwrap().nielsen, 3);
    }

    #[test]
    fn empty_and_cancelling_indices() {
        let phi = Endo::new(1, 0, 0, 3);
        let empty = ClassIndexMap::default();
        assert_eq!(nielsen_number(&empty), 0);
        assert_eq!(lefschetz_class(&empty, &phi), vec2(0, 0));
        assert!(class_indices(&Chain1::zero(), &phi).unwrap().is_empty());
        let mut two = ClassIndexMap::default();
        two.insert(SemiClass::of(&Monomial::one(), &phi), BigInt::from(1));
        two.insert(SemiClass::of(&Monomial::v(1), &phi), BigInt::from(-1));
        assert_eq!(nielsen_number(&two), 2);
        assert_eq!(lefschetz_class(&two, &phi), vec2(0, 0));
    }
}
