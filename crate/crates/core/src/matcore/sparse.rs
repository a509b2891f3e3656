use alloc::vec::Vec;

use super::{CMatrix, C64, ZERO};

/// Entries with modulus at or below this are dropped when sparsifying.
const DROP: f64 = 1e-16;

/// Square complex matrix in coordinate form.
///
/// Operator systems built from tensor products have thousands of basis elements
/// on spaces of dimension 64 or 256, each with only a handful of nonzeros; this
/// is the representation every inner loop runs on.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMat {
    dim: usize,
    rows: Vec<u32>,
    cols: Vec<u32>,
    vals: Vec<C64>,
}

impl SparseMat {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, rows: Vec::new(), cols: Vec::new(), vals: Vec::new() }
    }

    /// Panics if `m` is not square.
    pub fn from_dense(m: &CMatrix) -> Self {
        assert!(m.is_square(), "sparse operators are square");
        let n = m.rows();
        let mut s = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if v.norm() > DROP {
                    s.push(i, j, v);
                }
            }
        }
        s
    }

    fn push(&mut self, i: usize, j: usize, v: C64) {
        self.rows.push(i as u32);
        self.cols.push(j as u32);
        self.vals.push(v);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Coordinates and values as parallel slices.
    pub fn parts(&self) -> (&[u32], &[u32], &[C64]) {
        (&self.rows, &self.cols, &self.vals)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .zip(&self.vals)
            .map(|((&i, &j), &v)| (i as usize, j as usize, v))
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.entries() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn adjoint(&self) -> SparseMat {
        SparseMat {
            dim: self.dim,
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            vals: self.vals.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> SparseMat {
        SparseMat { vals: self.vals.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    /// `<u| self |v>`.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        self.entries().fold(ZERO, |acc, (i, j, a)| acc + u[i].conj() * a * v[j])
    }

    /// `out = self · v` (overwrites `out`).
    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = ZERO);
        for (i, j, a) in self.entries() {
            out[i] += a * v[j];
        }
    }

    /// `tr(self^* m)`.
    pub fn hs_inner_dense(&self, m: &CMatrix) -> C64 {
        self.entries().fold(ZERO, |acc, (i, j, a)| acc + a.conj() * m[(i, j)])
    }

    /// `tr(self^* other)`, assuming no repeated coordinates.
    pub fn hs_inner(&self, other: &SparseMat) -> C64 {
        let n = self.dim;
        let mut acc = ZERO;
        for (i, j, a) in self.entries() {
            for (k, l, b) in other.entries() {
                if i * n + j == k * n + l {
                    acc += a.conj() * b;
                }
            }
        }
        acc
    }

    pub fn hs_norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `dense += s · self`.
    pub fn add_to(&self, dense: &mut CMatrix, s: C64) {
        for (i, j, a) in self.entries() {
            dense[(i, j)] += s * a;
        }
    }

    /// Kronecker product with the same block convention as [`super::kron`].
    pub fn kron(&self, other: &SparseMat) -> SparseMat {
        let m = other.dim;
        let mut out = SparseMat::zeros(self.dim * m);
        for (i, j, a) in self.entries() {
            for (k, l, b) in other.entries() {
                out.push(i * m + k, j * m + l, a * b);
            }
        }
        out
    }

    /// Largest `|a_ij - conj(a_ji)|`, assuming no repeated coordinates.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut sorted: Vec<(u32, u32, C64)> = self.entries().map(|(i, j, v)| (i as u32, j as u32, v)).collect();
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        let lookup = |i: u32, j: u32| {
            sorted
                .binary_search_by_key(&(i, j), |&(a, b, _)| (a, b))
                .map_or(ZERO, |k| sorted[k].2)
        };
        sorted
            .iter()
            .map(|&(i, j, v)| (v - lookup(j, i).conj()).norm())
            .fold(0.0, f64::max)
    }
}
