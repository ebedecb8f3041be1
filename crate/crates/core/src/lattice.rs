//! Integer lattices in echelon form, for exact membership tests.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Rows with strictly increasing pivot columns; each pivot entry positive.
#[derive(Clone, Debug, Default)]
pub struct Lattice {
    dim: usize,
    rows: Vec<Vec<BigInt>>,
}

fn pivot(v: &[BigInt]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

fn axpy(k: &BigInt, x: &[BigInt], y: &mut [BigInt]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= k * xi;
    }
}

impl Lattice {
    pub fn new(dim: usize) -> Self {
        Lattice { dim, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn row_with_pivot(&self, c: usize) -> Result<usize, usize> {
        self.rows.binary_search_by_key(&c, |r| pivot(r).expect("rows are nonzero"))
    }

    /// Adds a generator.
    pub fn insert(&mut self, mut v: Vec<BigInt>) {
        assert_eq!(v.len(), self.dim, "lattice dimension mismatch");
        while let Some(c) = pivot(&v) {
            match self.row_with_pivot(c) {
                Err(pos) => {
                    if v[c].is_negative() {
                        v.iter_mut().for_each(|x| *x = -&*x);
                    }
                    self.rows.insert(pos, v);
                    return;
                }
                Ok(i) => {
                    let b = &self.rows[i];
                    if (&v[c] % &b[c]).is_zero() {
                        let k = &v[c] / &b[c];
                        axpy(&k, b, &mut v);
                        continue;
                    }
                    // replace the row by a combination with pivot gcd(b_c, v_c)
                    let e = b[c].extended_gcd(&v[c]);
                    let new_row: Vec<BigInt> = b.iter().zip(&v).map(|(bi, vi)| &e.x * bi + &e.y * vi).collect();
                    let (bc, vc) = (&b[c] / &e.gcd, &v[c] / &e.gcd);
                    let rest: Vec<BigInt> = b.iter().zip(&v).map(|(bi, vi)| &vc * bi - &bc * vi).collect();
                    let mut new_row = new_row;
                    if new_row[c].is_negative() {
                        new_row.iter_mut().for_each(|x| *x = -&*x);
                    }
                    self.rows[i] = new_row;
                    v = rest;
                }
            }
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.dim, "lattice dimension mismatch");
        let mut v = v.to_vec();
        while let Some(c) = pivot(&v) {
            let Ok(i) = self.row_with_pivot(c) else {
                return false;
            };
            let b = &self.rows[i];
            if !(&v[c] % &b[c]).is_zero() {
                return false;
            }
            let k = &v[c] / &b[c];
            axpy(&k, b, &mut v);
        }
        true
    }
}
