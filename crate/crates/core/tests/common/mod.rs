//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use zekit_core::{CMatrix, CVector, C64};

pub fn to_na(m: &CMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

pub fn vec_to_na(v: &CVector) -> DVector<C64> {
    DVector::from_column_slice(v.as_slice())
}

pub fn from_na(v: &DVector<C64>) -> CVector {
    CVector::new(v.iter().copied().collect())
}

/// Canonical (non-orthonormal) basis of 𝔑 with phase `gamma`, written out from the
/// matrix pattern `[a b e f; c d f γ̄e; g h a b; h γg c d]`, labels a..h in order.
pub fn n_theta_canonical(gamma: C64) -> Vec<CMatrix> {
    let one = C64::new(1.0, 0.0);
    let entries: [Vec<(usize, usize, C64)>; 8] = [
        vec![(0, 0, one), (2, 2, one)],
        vec![(0, 1, one), (2, 3, one)],
        vec![(1, 0, one), (3, 2, one)],
        vec![(1, 1, one), (3, 3, one)],
        vec![(0, 2, one), (1, 3, gamma.conj())],
        vec![(0, 3, one), (1, 2, one)],
        vec![(2, 0, one), (3, 1, gamma)],
        vec![(2, 1, one), (3, 0, one)],
    ];
    entries
        .iter()
        .map(|es| {
            let mut m = CMatrix::zeros(4, 4);
            for &(r, c, v) in es {
                m[(r, c)] = v;
            }
            m
        })
        .collect()
}

/// Element of 𝔑 with coordinates `(a, …, h)`.
pub fn n_theta_element(gamma: C64, coords: &[C64; 8]) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (b, &c) in n_theta_canonical(gamma).iter().zip(coords) {
        m.axpy(c, b);
    }
    m
}

/// Kronecker products of canonical bases, first factor slowest.
pub fn tensor_canonical(factors: &[Vec<CMatrix>]) -> Vec<CMatrix> {
    factors.iter().skip(1).fold(factors[0].clone(), |acc, f| {
        acc.iter().flat_map(|a| f.iter().map(move |b| zekit_core::matcore::kron(a, b))).collect()
    })
}

/// `‖P x‖²` for the orthogonal projection `P` onto `span(basis)` in the
/// Hilbert–Schmidt geometry, from the normal equations of the stacked basis.
pub fn projected_norm_sqr(basis: &[CMatrix], x: &CMatrix) -> f64 {
    let n2 = x.rows() * x.cols();
    let b = DMatrix::from_fn(n2, basis.len(), |r, k| basis[k].data()[r]);
    let xv = DVector::from_column_slice(x.data());
    let gram = b.adjoint() * &b;
    let rhs = b.adjoint() * &xv;
    let y = gram.lu().solve(&rhs).expect("independent basis");
    (rhs.adjoint() * y)[(0, 0)].re
}

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> CVector {
    CVector::new((0..n).map(|_| gaussian(rng)).collect())
}

pub fn random_unit(rng: &mut impl Rng, n: usize) -> CVector {
    random_vector(rng, n).normalized().expect("nonzero")
}

/// Orthonormal pair by one Gram–Schmidt step.
pub fn random_pair(rng: &mut impl Rng, n: usize) -> (CVector, CVector) {
    let phi = random_unit(rng, n);
    let raw = random_vector(rng, n);
    let psi = raw.add_scaled(-phi.dot(&raw), &phi).normalized().expect("generic");
    (phi, psi)
}

/// Orthonormal basis of the nullspace of `m` from nalgebra's SVD; singular values
/// at or below `rel_tol · σ_max` count as zero.
pub fn svd_nullspace(m: &CMatrix, rel_tol: f64) -> Vec<CVector> {
    let a = to_na(m);
    let n = a.ncols();
    // pad to square so the SVD exposes the full right singular basis
    let padded = if a.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(&a);
        p
    } else {
        a
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= rel_tol * top.max(1.0))
        .map(|k| CVector::new(v_t.row(k).iter().map(|z| z.conj()).collect()))
        .collect()
}

/// Orthogonal projector onto the span of `vs` (any spanning set).
pub fn projector(vs: &[CVector], n: usize) -> DMatrix<C64> {
    if vs.is_empty() {
        return DMatrix::zeros(n, n);
    }
    let a = DMatrix::from_fn(n, vs.len(), |r, c| vs[c][r]);
    let pinv = a.clone().pseudo_inverse(1e-12).expect("pseudo-inverse");
    a * pinv
}

/// Sine of the largest principal angle between two subspaces of equal dimension;
/// infinite when the dimensions differ.
pub fn max_principal_sine(a: &[CVector], b: &[CVector], n: usize) -> f64 {
    let (pa, pb) = (projector(a, n), projector(b, n));
    let rank = |p: &DMatrix<C64>| p.trace().re.round() as usize;
    if rank(&pa) != rank(&pb) {
        return f64::INFINITY;
    }
    (pa - pb).singular_values().iter().copied().fold(0.0, f64::max)
}
