//! Dense matrices and row vectors over the group ring.
//!
//! Modules are left modules and vectors are rows of left coefficients, so a
//! linear map is stored with the image of the `i`-th basis vector in row `i`
//! and acts by `x -> x * F`. Composition `g . f` has matrix `F * G`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::{RingElement, UnitaryRing};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<RingElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![RingElement::zero(); rows * cols],
        }
    }

    pub fn identity(ring: &UnitaryRing, n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RingElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: bad.len(),
            });
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: RingElement) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[RingElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<RingElement>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &RingElement> {
        self.data.iter()
    }

    pub fn mul(&self, ring: &UnitaryRing, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += &ring.mul(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Entrywise involution of the transpose.
    pub fn conjugate_transpose(&self, ring: &UnitaryRing) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, ring.involute(self.get(i, j)));
            }
        }
        out
    }

    pub fn block_diagonal(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// `out[i][j] = self[perm[i]][perm[j]]`.
    pub fn permute(&self, perm: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(perm.len(), perm.len());
        for (i, &pi) in perm.iter().enumerate() {
            for (j, &pj) in perm.iter().enumerate() {
                out.set(i, j, self.get(pi, pj).clone());
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&RingElement) -> RingElement) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// First `(row, col)` where the two matrices differ.
    pub fn first_difference(&self, other: &Matrix) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((self.rows.min(other.rows), self.cols.min(other.cols)));
        }
        (0..self.data.len())
            .find(|&k| self.data[k] != other.data[k])
            .map(|k| (k / self.cols, k % self.cols))
    }

    pub fn check_entries(&self, ring: &UnitaryRing) -> Result<()> {
        self.data.iter().try_for_each(|x| ring.check(x))
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<RingElement>>::deserialize(deserializer)?;
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Element `x = sum a_i e_i` of a free module, stored by its left coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModuleVector {
    pub coords: Vec<RingElement>,
}

impl ModuleVector {
    pub fn new(coords: Vec<RingElement>) -> Self {
        ModuleVector { coords }
    }

    pub fn zero(n: usize) -> Self {
        ModuleVector {
            coords: vec![RingElement::zero(); n],
        }
    }

    pub fn basis(ring: &UnitaryRing, n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.coords[i] = ring.one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(RingElement::is_zero)
    }

    /// `a * x`.
    pub fn scale_left(&self, ring: &UnitaryRing, a: &RingElement) -> Self {
        ModuleVector {
            coords: self.coords.iter().map(|c| ring.mul(a, c)).collect(),
        }
    }

    /// `x * F`, the image of `x` under the linear map with matrix `F`.
    pub fn apply_matrix(&self, ring: &UnitaryRing, m: &Matrix) -> Result<Self> {
        if self.dim() != m.rows() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: self.dim(),
            });
        }
        let mut out = ModuleVector::zero(m.cols());
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for j in 0..m.cols() {
                let b = m.get(i, j);
                if !b.is_zero() {
                    out.coords[j] += &ring.mul(a, b);
                }
            }
        }
        Ok(out)
    }

    pub fn concat(&self, other: &ModuleVector) -> Self {
        let mut coords = self.coords.clone();
        coords.extend(other.coords.iter().cloned());
        ModuleVector { coords }
    }

    pub fn map(&self, f: impl Fn(&RingElement) -> RingElement) -> Self {
        ModuleVector {
            coords: self.coords.iter().map(f).collect(),
        }
    }

    fn zip_with(&self, rhs: &ModuleVector, f: impl Fn(&RingElement, &RingElement) -> RingElement) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        ModuleVector {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl std::ops::Add<&ModuleVector> for &ModuleVector {
    type Output = ModuleVector;
    fn add(self, rhs: &ModuleVector) -> ModuleVector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl std::ops::Sub<&ModuleVector> for &ModuleVector {
    type Output = ModuleVector;
    fn sub(self, rhs: &ModuleVector) -> ModuleVector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl std::ops::Neg for &ModuleVector {
    type Output = ModuleVector;
    fn neg(self) -> ModuleVector {
        self.map(|a| -a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FiniteGroup, Group, GroupElement};

    #[test]
    fn product_respects_noncommutativity() {
        let ring = UnitaryRing::standard(Group::Finite(FiniteGroup::symmetric3(false)));
        let s = ring.elem(GroupElement::Finite(1));
        let r = ring.elem(GroupElement::Finite(4));
        assert_ne!(ring.mul(&s, &r), ring.mul(&r, &s));
        let a = Matrix::from_rows(vec![vec![s.clone()]]).unwrap();
        let b = Matrix::from_rows(vec![vec![r.clone()]]).unwrap();
        assert_eq!(a.mul(&ring, &b).unwrap().get(0, 0), &ring.mul(&s, &r));
        // x * (A * B) == (x * A) * B
        let x = ModuleVector::new(vec![ring.elem(GroupElement::Finite(2))]);
        let lhs = x.apply_matrix(&ring, &a.mul(&ring, &b).unwrap()).unwrap();
        let rhs = x.apply_matrix(&ring, &a).unwrap().apply_matrix(&ring, &b).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn ragged_rows_rejected() {
        let one = RingElement::monomial(1, GroupElement::Finite(0));
        assert!(Matrix::from_rows(vec![vec![one.clone()], vec![]]).is_err());
    }
}
