use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};


use super::{CVector, C64, ONE, ZERO};
use crate::{Error, Result};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: alloc::vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    /// Matrix unit `|i><j|` in `M_n` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    /// `|u><v|`.
    pub fn outer(u: &CVector, v: &CVector) -> Self {
        Self::from_fn(u.dim(), v.dim(), |i, j| u[i] * v[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[CVector]) -> Self {
        let rows = columns.first().map_or(0, CVector::dim);
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
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

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    /// Row-major vectorization.
    pub fn vectorize(&self) -> CVector {
        CVector::new(self.data.clone())
    }

    pub fn adjoint(&self) -> CMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> CMatrix {
        self.scale(C64::new(s, 0.0))
    }

    /// In-place `self += s * other`.
    pub fn axpy(&mut self, s: C64, other: &CMatrix) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Hilbert–Schmidt inner product `tr(self^* other)`.
    pub fn hs_inner(&self, other: &CMatrix) -> C64 {
        self.data.iter().zip(&other.data).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|m_ij - m_ji^*|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(M + M^*)/2`.
    pub fn hermitian_part(&self) -> CMatrix {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `(M - M^*)/(2i)`, Hermitian; `M = H + iK` with `H` the Hermitian part.
    pub fn skew_part(&self) -> CMatrix {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] - self[(j, i)].conj()) * C64::new(0.0, -0.5)
        })
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn mat_vec(&self, v: &CVector) -> CVector {
        debug_assert_eq!(self.cols, v.dim());
        CVector::new(
            (0..self.rows)
                .map(|i| {
                    let row = &self.data[i * self.cols..(i + 1) * self.cols];
                    row.iter().zip(v.as_slice()).fold(ZERO, |acc, (a, b)| acc + a * b)
                })
                .collect(),
        )
    }

    /// `<u|self|v>`.
    pub fn sandwich(&self, u: &CVector, v: &CVector) -> C64 {
        u.dot(&self.mat_vec(v))
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        super::singular_values(self).first().copied().unwrap_or(0.0)
    }

    /// Column block `[.., start..start+width]`.
    pub fn column_block(&self, start: usize, width: usize) -> CMatrix {
        Self::from_fn(self.rows, width, |i, j| self[(i, start + j)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        out.axpy(ONE, rhs);
        out
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        out.axpy(-ONE, rhs);
        out
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product: block `(i, j)` of the result is `a_ij * B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    let oc = ac * bc;
    for i in 0..ar {
        for j in 0..ac {
            let s = a.data[i * ac + j];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                let dst = &mut out.data[(i * br + k) * oc + j * bc..(i * br + k) * oc + (j + 1) * bc];
                for (d, x) in dst.iter_mut().zip(&b.data[k * bc..(k + 1) * bc]) {
                    *d = s * x;
                }
            }
        }
    }
    out
}

/// Left-to-right Kronecker product of a non-empty list.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> Option<CMatrix> {
    let mut iter = factors.into_iter();
    let first = iter.next()?.clone();
    Some(iter.fold(first, |acc, m| kron(&acc, m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{Angle, I};

    #[test]
    fn kron_of_identities_is_identity() {
        assert_eq!(kron(&CMatrix::identity(2), &CMatrix::identity(2)), CMatrix::identity(4));
    }

    #[test]
    fn kron_places_blocks() {
        // |2><1| ⊗ I2 puts I2 in block (2,1).
        let m = kron(&CMatrix::unit(2, 1, 0), &CMatrix::identity(2));
        let mut expected = CMatrix::zeros(4, 4);
        expected[(2, 0)] = ONE;
        expected[(3, 1)] = ONE;
        assert_eq!(m, expected);
    }

    #[test]
    fn kron_of_phase_gates() {
        let g = Angle::new(1, 2).gamma();
        let u = CMatrix::diag(&[ONE, g]);
        let m = kron(&u, &u);
        assert_eq!(m, CMatrix::diag(&[ONE, I, I, -ONE]));
    }

    #[test]
    fn adjoint_is_involution() {
        let m = CMatrix::from_fn(3, 2, |i, j| C64::new(i as f64 - 0.5, j as f64 * 2.0 + 1.0));
        assert_eq!(m.adjoint().adjoint(), m);
        assert_eq!(m.adjoint().rows(), 2);
    }

    #[test]
    fn rejects_bad_length() {
        assert!(matches!(CMatrix::new(2, 2, alloc::vec![ONE; 3]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hermitian_and_skew_parts_recombine() {
        let m = CMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64, (j as f64) - (i as f64) * 0.7));
        let h = m.hermitian_part();
        let k = m.skew_part();
        assert!(h.is_hermitian(0.0));
        assert!(k.is_hermitian(1e-15));
        let back = &h + &k.scale(I);
        assert!(back.max_abs_diff(&m) < 1e-14);
    }
}
