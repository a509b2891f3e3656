//! Dense complex linear algebra.
//!
//! Matrices are stored row-major and vectorized in the same order (entry `(i, j)` of
//! an `n × m` matrix sits at index `i * m + j`). Tolerances default to `1e-10`
//! absolute unless a routine says otherwise.

mod angle;
mod decomp;
mod matrix;
mod sparse;
mod vector;

pub use angle::Angle;
pub use decomp::{herm_eig, herm_eig_min, nullspace, singular_values, svd, svd_rank, HermEig, Svd};
pub use matrix::{kron, kron_all, CMatrix};
pub use sparse::SparseMat;
pub use vector::CVector;
pub(crate) use vector::{orthonormalize, orthonormalize_matrices};

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex64;

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

pub(crate) const I: C64 = C64::new(0.0, 1.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

/// `exp(i * theta)`.
pub fn unit_phase(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}
