//! Operator systems: subspaces of `M_n` that are `*`-closed and contain the identity.
//!
//! An [`OperatorSystem`] keeps its spanning list together with a Hilbert–Schmidt
//! orthonormal basis. Once the span passes the `*`-closure check that basis is made
//! of Hermitian matrices, so expectations `<φ|A_k|φ>` against it are real. The
//! identity, when present, is always the first orthonormal element (`I/√n`).

use alloc::string::ToString;
use alloc::vec::Vec;


use crate::matcore::{orthonormalize_matrices, svd_rank, CMatrix, CVector, SparseMat, C64, DEFAULT_TOL, ONE, ZERO};
use crate::{Angle, Error, Result};

/// Names of the coordinates of the canonical basis of [`n_theta`], in basis order.
pub const N_THETA_LABELS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

/// Outcome of [`validate_system`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Validation {
    /// Distance from `I_n` to the span.
    pub identity_residual: f64,
    /// Largest distance from the adjoint of a spanning element to the span.
    pub adjoint_residual: f64,
    pub dim: usize,
    pub tol: f64,
}

impl Validation {
    pub fn contains_identity(&self) -> bool {
        self.identity_residual < self.tol
    }

    pub fn star_closed(&self) -> bool {
        self.adjoint_residual < self.tol
    }

    pub fn is_valid(&self) -> bool {
        self.contains_identity() && self.star_closed()
    }
}

/// A subspace of `n × n` complex matrices given by a spanning list.
#[derive(Clone, Debug)]
pub struct OperatorSystem {
    ambient_dim: usize,
    basis: Vec<SparseMat>,
    ortho: Vec<SparseMat>,
    hermitian: bool,
    validation: Validation,
}

impl OperatorSystem {
    /// Builds the span of `basis` inside `M_n` and validates it.
    pub fn new(ambient_dim: usize, basis: Vec<CMatrix>) -> Result<Self> {
        for b in &basis {
            if b.rows() != ambient_dim || b.cols() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: b.rows().max(b.cols()) });
            }
        }
        let n = ambient_dim;
        let general = orthonormalize_matrices(&basis, DEFAULT_TOL);
        let residual = |a: &CMatrix| projection_residual_dense(&general, a);
        let identity_residual = residual(&CMatrix::identity(n));
        let adjoint_residual = basis.iter().map(|b| residual(&b.adjoint())).fold(0.0, f64::max);
        let dim = general.len();
        let validation = Validation { identity_residual, adjoint_residual, dim, tol: DEFAULT_TOL };

        let (ortho, hermitian) = if validation.star_closed() {
            (hermitian_ortho_basis(n, &basis, validation.contains_identity()), true)
        } else {
            (general, false)
        };
        debug_assert!(!hermitian || ortho.len() == dim);
        Ok(Self {
            ambient_dim,
            basis: basis.iter().map(SparseMat::from_dense).collect(),
            ortho: ortho.iter().map(SparseMat::from_dense).collect(),
            hermitian,
            validation,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the span.
    pub fn dim(&self) -> usize {
        self.ortho.len()
    }

    /// The spanning list as given (or as built by a tensor product).
    pub fn basis(&self) -> &[SparseMat] {
        &self.basis
    }

    pub fn basis_dense(&self) -> Vec<CMatrix> {
        self.basis.iter().map(SparseMat::to_dense).collect()
    }

    /// Hilbert–Schmidt orthonormal basis of the span; Hermitian when
    /// [`Self::has_hermitian_basis`].
    pub fn ortho_basis(&self) -> &[SparseMat] {
        &self.ortho
    }

    pub fn has_hermitian_basis(&self) -> bool {
        self.hermitian
    }

    pub fn validation(&self) -> Validation {
        self.validation
    }

    pub fn is_valid(&self) -> bool {
        self.validation.is_valid()
    }

    /// Orthogonal projection of `a` onto the span.
    pub fn project(&self, a: &CMatrix) -> Result<CMatrix> {
        self.check_dim(a)?;
        let mut p = CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for q in &self.ortho {
            let c = q.hs_inner_dense(a);
            if c != ZERO {
                q.add_to(&mut p, c);
            }
        }
        Ok(p)
    }

    fn check_dim(&self, a: &CMatrix) -> Result<()> {
        if a.rows() != self.ambient_dim || a.cols() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: a.rows().max(a.cols()) });
        }
        Ok(())
    }
}

fn projection_residual_dense(ortho: &[CMatrix], a: &CMatrix) -> f64 {
    let mut r = a.clone();
    for q in ortho {
        let c = q.hs_inner(&r);
        r.axpy(-c, q);
    }
    r.hs_norm()
}

/// Orthonormal Hermitian basis of a `*`-closed span: Gram–Schmidt over the
/// Hermitian and skew parts of each spanning element, identity first.
fn hermitian_ortho_basis(n: usize, basis: &[CMatrix], with_identity: bool) -> Vec<CMatrix> {
    let mut candidates = Vec::with_capacity(2 * basis.len() + 1);
    if with_identity {
        candidates.push(CMatrix::identity(n));
    }
    for b in basis {
        candidates.push(b.hermitian_part());
        candidates.push(b.skew_part());
    }
    let scale = candidates.iter().map(CMatrix::hs_norm).fold(0.0, f64::max);
    let mut out: Vec<CMatrix> = Vec::new();
    for c in &candidates {
        if c.hs_norm() == 0.0 {
            continue;
        }
        let mut w = c.clone();
        for _ in 0..2 {
            for q in &out {
                // real for Hermitian pairs; dropping the rounding keeps w Hermitian
                let coeff = q.hs_inner(&w).re;
                w.axpy(C64::new(-coeff, 0.0), q);
            }
        }
        let norm = w.hs_norm();
        if norm > DEFAULT_TOL * scale {
            out.push(w.hermitian_part().scale_real(1.0 / norm));
        }
    }
    out
}

/// `γ`-parametrized 8-dimensional system on `C^4`:
///
/// ```text
/// [ a   b   e    f  ]
/// [ c   d   f   γ̄e  ]
/// [ g   h   a    b  ]
/// [ h   γg  c    d  ]
/// ```
///
/// The spanning list sets one of `a..h` to one and the rest to zero, in that order.
pub fn n_theta_with_gamma(gamma: C64) -> OperatorSystem {
    let pattern: [&[(usize, usize, C64)]; 8] = [
        &[(0, 0, ONE), (2, 2, ONE)],
        &[(0, 1, ONE), (2, 3, ONE)],
        &[(1, 0, ONE), (3, 2, ONE)],
        &[(1, 1, ONE), (3, 3, ONE)],
        &[(0, 2, ONE), (1, 3, gamma.conj())],
        &[(0, 3, ONE), (1, 2, ONE)],
        &[(2, 0, ONE), (3, 1, gamma)],
        &[(2, 1, ONE), (3, 0, ONE)],
    ];
    let basis = pattern
        .iter()
        .map(|entries| {
            let mut m = CMatrix::zeros(4, 4);
            for &(i, j, v) in entries.iter() {
                m[(i, j)] = v;
            }
            m
        })
        .collect();
    OperatorSystem::new(4, basis).expect("4x4 basis")
}

/// The system at `γ = exp(iθ)` for an exact angle.
pub fn n_theta(theta: Angle) -> OperatorSystem {
    n_theta_with_gamma(theta.gamma())
}

/// The system at `γ = exp(iθ)` for a floating angle in radians.
pub fn n_theta_radians(theta: f64) -> OperatorSystem {
    n_theta_with_gamma(crate::matcore::unit_phase(theta))
}

/// Re-checks identity membership, `*`-closure and the span dimension.
///
/// For systems built from an explicit spanning list the dimension is the numerical
/// rank of the stacked vectorizations. Tensor products are certified through their
/// orthonormal basis instead: a span with a Hermitian spanning set is `*`-closed.
pub fn validate_system(l: &OperatorSystem) -> Validation {
    let n = l.ambient_dim;
    let identity_residual = membership(l, &CMatrix::identity(n)).expect("square identity");
    if n * n <= 256 && l.basis.len() <= 256 {
        let stacked = stacked_vectorizations(&l.basis_dense());
        let dim = if l.basis.is_empty() { 0 } else { svd_rank(&stacked, DEFAULT_TOL) };
        let adjoint_residual = l
            .basis
            .iter()
            .map(|b| membership(l, &b.adjoint().to_dense()).expect("square"))
            .fold(0.0, f64::max);
        Validation { identity_residual, adjoint_residual, dim, tol: DEFAULT_TOL }
    } else {
        let adjoint_residual = if l.hermitian {
            l.ortho.iter().map(SparseMat::hermitian_deviation).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        Validation { identity_residual, adjoint_residual, dim: l.ortho.len(), tol: DEFAULT_TOL }
    }
}

/// Hilbert–Schmidt distance from `a` to the span of `l`.
pub fn membership(l: &OperatorSystem, a: &CMatrix) -> Result<f64> {
    let p = l.project(a)?;
    Ok((a - &p).hs_norm())
}

/// Tensor product `L1 ⊗ L2`: spanned by all pairwise Kronecker products.
pub fn tensor_systems(l1: &OperatorSystem, l2: &OperatorSystem) -> Result<OperatorSystem> {
    for l in [l1, l2] {
        if !l.is_valid() {
            return Err(Error::InvalidInput("tensor product of an unvalidated operator system".to_string()));
        }
    }
    let pairwise = |xs: &[SparseMat], ys: &[SparseMat]| -> Vec<SparseMat> {
        xs.iter().flat_map(|x| ys.iter().map(move |y| x.kron(y))).collect()
    };
    let mut out = OperatorSystem {
        ambient_dim: l1.ambient_dim * l2.ambient_dim,
        basis: pairwise(&l1.basis, &l2.basis),
        // products of orthonormal Hermitian bases are orthonormal and Hermitian
        ortho: pairwise(&l1.ortho, &l2.ortho),
        hermitian: true,
        validation: l1.validation,
    };
    out.validation = validate_system(&out);
    Ok(out)
}

/// Left-to-right tensor product of a non-empty list.
pub fn tensor_all<'a>(systems: impl IntoIterator<Item = &'a OperatorSystem>) -> Result<OperatorSystem> {
    let mut iter = systems.into_iter();
    let first = iter.next().ok_or_else(|| Error::InvalidInput("empty tensor product".to_string()))?;
    iter.try_fold(first.clone(), |acc, l| tensor_systems(&acc, l))
}

/// `n_theta(θ₁) ⊗ … ⊗ n_theta(θ_k)`.
pub fn n_theta_tensor(thetas: &[Angle]) -> Result<OperatorSystem> {
    let factors: Vec<OperatorSystem> = thetas.iter().map(|&t| n_theta(t)).collect();
    tensor_all(&factors)
}

/// Vector `v` in the canonical product basis of `(C^4)^{⊗k}` with digits `digits`.
pub fn product_index(digits: &[usize], local_dim: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * local_dim + d)
}

/// Vectorizations of the spanning list as rows of a matrix (row-major order).
pub fn stacked_vectorizations(ms: &[CMatrix]) -> CMatrix {
    let len = ms.first().map_or(0, |m| m.rows() * m.cols());
    CMatrix::from_fn(ms.len(), len, |k, idx| ms[k].data()[idx])
}

/// Convenience for tests and reports: `<u|A|v>` over every orthonormal element.
pub fn expectations(l: &OperatorSystem, u: &CVector, v: &CVector) -> Vec<C64> {
    l.ortho.iter().map(|a| a.sandwich(u.as_slice(), v.as_slice())).collect()
}
