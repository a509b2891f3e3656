//! Knill–Laflamme verification of zero-error codes, the explicit two-dimensional
//! codes for tensor products of `n_theta` systems, and the numerical-range
//! distance used to rule codes out.

use alloc::string::String;
use alloc::vec::Vec;


use crate::matcore::{CVector, SparseMat, C64, I, ONE, ZERO};
use crate::opsys::OperatorSystem;
use crate::{Angle, Error, Result};

/// Default pass tolerance of [`verify_code`].
pub const DEFAULT_KL_TOL: f64 = 1e-9;

/// An orthonormal family `{φ_k}` spanning a candidate code.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeCandidate {
    ambient_dim: usize,
    vectors: Vec<CVector>,
}

impl CodeCandidate {
    /// Requires unit vectors (1e-12) with pairwise overlaps below 1e-12.
    pub fn new(vectors: Vec<CVector>) -> Result<Self> {
        let ambient_dim = vectors
            .first()
            .map(CVector::dim)
            .ok_or_else(|| Error::InvalidInput(String::from("a code needs at least one vector")))?;
        for (k, v) in vectors.iter().enumerate() {
            if v.dim() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: v.dim() });
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::NotUnit { norm });
            }
            for w in &vectors[..k] {
                let overlap = w.dot(v).norm();
                if overlap > 1e-12 {
                    return Err(Error::InvalidInput(alloc::format!("code vectors not orthogonal (overlap {overlap:e})")));
                }
            }
        }
        Ok(Self { ambient_dim, vectors })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Applies the rotation `(φ, ψ) ↦ (pφ − qψ, q̄φ + p̄ψ)` to a two-vector code.
    pub fn rotate_pair(&self, p: C64, q: C64) -> Result<CodeCandidate> {
        let [phi, psi] = self.vectors.as_slice() else {
            return Err(Error::InvalidInput(String::from("rotation acts on two-vector codes")));
        };
        let a = phi.scale(p).add_scaled(-q, psi);
        let b = phi.scale(q.conj()).add_scaled(p.conj(), psi);
        CodeCandidate::new(alloc::vec![a, b])
    }
}

/// Worst violations of the Knill–Laflamme conditions over a spanning set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KLReport {
    /// Largest `|<φ_l|A|φ_k>|`, `k ≠ l`.
    pub max_offdiag: f64,
    /// Largest `|<φ_l|A|φ_l> − <φ_0|A|φ_0>|`.
    pub max_diag_spread: f64,
    pub tol: f64,
    pub pass: bool,
}

impl KLReport {
    fn from_maxima(max_offdiag: f64, max_diag_spread: f64, tol: f64) -> Self {
        Self { max_offdiag, max_diag_spread, tol, pass: max_offdiag < tol && max_diag_spread < tol }
    }
}

/// Checks the code against the orthonormal basis of `l` (the conditions are linear in
/// `A`, so any spanning set decides them).
pub fn verify_code(l: &OperatorSystem, code: &CodeCandidate, tol: f64) -> Result<KLReport> {
    verify_code_over(l.ambient_dim(), l.ortho_basis(), code, tol)
}

/// Checks the code against an arbitrary spanning list.
pub fn verify_code_over(ambient_dim: usize, ops: &[SparseMat], code: &CodeCandidate, tol: f64) -> Result<KLReport> {
    if code.ambient_dim != ambient_dim {
        return Err(Error::DimensionMismatch { expected: ambient_dim, found: code.ambient_dim });
    }
    let vs = &code.vectors;
    let d = vs.len();
    let mut applied = alloc::vec![ZERO; ambient_dim];
    let mut max_offdiag = 0.0f64;
    let mut max_diag_spread = 0.0f64;
    for a in ops {
        if a.dim() != ambient_dim {
            return Err(Error::DimensionMismatch { expected: ambient_dim, found: a.dim() });
        }
        let mut diag0 = ZERO;
        for k in 0..d {
            a.apply_into(vs[k].as_slice(), &mut applied);
            let applied_vec = CVector::new(applied.clone());
            for (l, v) in vs.iter().enumerate() {
                let value = v.dot(&applied_vec);
                if l != k {
                    max_offdiag = max_offdiag.max(value.norm());
                } else if k == 0 {
                    diag0 = value;
                } else {
                    max_diag_spread = max_diag_spread.max((value - diag0).norm());
                }
            }
        }
    }
    Ok(KLReport::from_maxima(max_offdiag, max_diag_spread, tol))
}

/// The two-dimensional code for `n` tensor factors of `C^4`:
/// `φ = (|1…1> + i|2…2>)/√2`, `ψ = (|3…3> + i|4…4>)/√2`.
pub fn product_code(n: usize) -> Result<CodeCandidate> {
    if n == 0 {
        return Err(Error::InvalidInput(String::from("need at least one tensor factor")));
    }
    let dim = 4usize.pow(n as u32);
    // index of |k…k> (zero-based digit k) is k·(4^n − 1)/3
    let diagonal = |k: usize| k * (dim - 1) / 3;
    let s = C64::new(0.5f64.sqrt(), 0.0);
    let mut phi = CVector::zeros(dim);
    let mut psi = CVector::zeros(dim);
    phi[diagonal(0)] = s;
    phi[diagonal(1)] = I * s;
    psi[diagonal(2)] = s;
    psi[diagonal(3)] = I * s;
    CodeCandidate::new(alloc::vec![phi, psi])
}

/// The certificate `{[1, i, 0, 0], [0, 0, 1, i]}/√2` for the single system at `θ = π`.
pub fn pi_certificate() -> CodeCandidate {
    product_code(1).expect("n = 1")
}

/// Closed form of `<ψ|M₁⊗…⊗M_n|φ>` for the code of [`product_code`]:
/// `½·g₁…g_n·(1 + γ₁…γ_n)`, where `g_k` is the `g` coordinate of `M_k`.
pub fn pairing_value(thetas: &[Angle], g_coeffs: &[C64]) -> Result<C64> {
    if thetas.len() != g_coeffs.len() {
        return Err(Error::DimensionMismatch { expected: thetas.len(), found: g_coeffs.len() });
    }
    let g: C64 = g_coeffs.iter().product();
    let gamma: C64 = thetas.iter().map(|t| t.gamma()).product();
    Ok(g * (ONE + gamma) * 0.5)
}

/// Distance from 0 to the convex hull of `{1, γ₂, γ₁, γ₁γ₂}` (with `γ₂` conjugated
/// when `conj2`). This is the numerical-range distance
/// `min_{|y|=1} |<y|U₁⊗V₁|y>|` of the diagonal unitary `diag{1, γ₂, γ₁, γ₁γ₂}`.
pub fn hull_distance(theta1: Angle, theta2: Angle, conj2: bool) -> f64 {
    let g1 = theta1.gamma();
    let g2 = if conj2 { theta2.gamma().conj() } else { theta2.gamma() };
    let pts = [ONE, g2, g1, g1 * g2];
    hull_distance_points(&pts)
}

/// Distance from the origin to the convex hull of a planar point set.
pub fn hull_distance_points(points: &[C64]) -> f64 {
    let hull = convex_hull(points);
    match hull.len() {
        0 => f64::INFINITY,
        1 => hull[0].norm(),
        2 => segment_distance(hull[0], hull[1]),
        _ => {
            let inside = (0..hull.len()).all(|k| cross(hull[k], hull[(k + 1) % hull.len()], ZERO) >= -1e-15);
            if inside {
                0.0
            } else {
                (0..hull.len())
                    .map(|k| segment_distance(hull[k], hull[(k + 1) % hull.len()]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

fn cross(o: C64, a: C64, b: C64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Andrew's monotone chain, counter-clockwise, collinear points dropped.
fn convex_hull(points: &[C64]) -> Vec<C64> {
    let mut pts: Vec<C64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup_by(|a, b| (*a - *b).norm() < 1e-15);
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<C64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Vec<C64> = if pass == 0 { pts.clone() } else { pts.iter().rev().copied().collect() };
        for p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 1e-15 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        // all points collinear: keep the extreme pair
        hull.truncate(2);
    }
    hull
}

fn segment_distance(a: C64, b: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    let t = (-(a.re * ab.re + a.im * ab.im) / len2).clamp(0.0, 1.0);
    (a + ab * t).norm()
}
