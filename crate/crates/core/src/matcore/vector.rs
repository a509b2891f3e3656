use alloc::vec::Vec;
use core::ops::{Index, IndexMut};


use super::{C64, ZERO};

/// Dense complex vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector {
    data: Vec<C64>,
}

impl CVector {
    pub fn new(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: alloc::vec![ZERO; dim] }
    }

    /// Canonical basis vector `e_index` of `C^dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn dot(&self, other: &CVector) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> CVector {
        CVector::new(self.data.iter().map(|z| z * s).collect())
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: C64, other: &CVector) -> CVector {
        CVector::new(self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect())
    }

    /// Unit vector along `self`; `None` for the zero vector.
    pub fn normalized(&self) -> Option<CVector> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// Tensor product under the identification `x ⊗ y ↔ [x_1 y, ..., x_n y]`.
    pub fn kron(&self, other: &CVector) -> CVector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            out.extend(other.data.iter().map(|b| a * b));
        }
        CVector::new(out)
    }

    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

impl From<Vec<C64>> for CVector {
    fn from(data: Vec<C64>) -> Self {
        Self::new(data)
    }
}

/// Modified Gram–Schmidt, applied twice. Vectors whose remaining norm falls below
/// `tol` times their original norm are dropped.
pub(crate) fn orthonormalize(vectors: &[CVector], tol: f64) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::new();
    for v in vectors {
        let original = v.norm();
        if original == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w = w.add_scaled(-c, q);
            }
        }
        let n = w.norm();
        if n > tol * original {
            basis.push(w.scale(C64::new(1.0 / n, 0.0)));
        }
    }
    basis
}

/// Gram–Schmidt on matrices under the Hilbert–Schmidt inner product. Unlike
/// [`orthonormalize`], the drop threshold is `tol` times the largest input norm, so
/// spanning elements that are pure rounding noise never enter the basis.
pub(crate) fn orthonormalize_matrices(ms: &[super::CMatrix], tol: f64) -> Vec<super::CMatrix> {
    let scale = ms.iter().map(super::CMatrix::hs_norm).fold(0.0, f64::max);
    let mut basis: Vec<super::CMatrix> = Vec::new();
    for m in ms {
        if m.hs_norm() == 0.0 {
            continue;
        }
        let mut w = m.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = q.hs_inner(&w);
                w.axpy(-c, q);
            }
        }
        let n = w.hs_norm();
        if n > tol * scale {
            basis.push(w.scale(C64::new(1.0 / n, 0.0)));
        }
    }
    basis
}
