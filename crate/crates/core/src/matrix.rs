use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ring::{Endo, RingElt};

/// Dense matrix over the group ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<RingElt>,
}

impl RingMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RingMatrix { rows, cols, entries: vec![RingElt::zero(); rows * cols] }
    }

    /// Builds from row vectors. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<RingElt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        RingMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: RingElt) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RingElt::is_zero)
    }

    pub fn mul(&self, o: &RingMatrix) -> Option<RingMatrix> {
        if self.cols != o.rows {
            return None;
        }
        let mut out = RingMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = RingElt::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * o.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        Some(out)
    }

    pub fn add(&self, o: &RingMatrix) -> Option<RingMatrix> {
        if self.rows != o.rows || self.cols != o.cols {
            return None;
        }
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect();
        Some(RingMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn neg(&self) -> RingMatrix {
        RingMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|a| -a).collect() }
    }

    /// Entrywise phi.
    pub fn apply_endo(&self, phi: &Endo) -> RingMatrix {
        RingMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|a| phi.apply(a)).collect() }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = -self.get(i, j);
            self.set(i, j, x);
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let x = -self.get(i, j);
            self.set(i, j, x);
        }
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect()).collect()
    }
}

impl fmt::Display for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_strings() {
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for RingMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RingMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        let mut parsed = Vec::with_capacity(rows.len());
        for row in rows {
            let mut out = Vec::with_capacity(row.len());
            for s in row {
                out.push(s.parse::<RingElt>().map_err(serde::de::Error::custom)?);
            }
            parsed.push(out);
        }
        Ok(RingMatrix::from_rows(parsed))
    }
}
