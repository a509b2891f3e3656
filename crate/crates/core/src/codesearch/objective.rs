//! The feasibility objective and its gradient.

use alloc::vec;
use alloc::vec::Vec;

use crate::matcore::{CVector, SparseMat, C64, ZERO};
use crate::opsys::OperatorSystem;
use crate::{Error, Result};

/// Norm deviation tolerated for the input vectors.
pub const UNIT_TOL: f64 = 1e-9;

/// `F(φ, ψ) = Σ_k |<ψ|A_k|φ>|² + Σ_k (<φ|A_k|φ> − <ψ|A_k|ψ>)²` over the Hermitian
/// orthonormal basis `{A_k}` of `l`. Zero exactly when `span{φ, ψ}` is a code.
pub fn objective(l: &OperatorSystem, phi: &CVector, psi: &CVector) -> Result<f64> {
    objective_frame(l, &[phi.clone(), psi.clone()])
}

/// The objective for `d` vectors: the pair objective summed over all pairs `l < m`.
pub fn objective_frame(l: &OperatorSystem, frame: &[CVector]) -> Result<f64> {
    check_frame(l, frame)?;
    let slices: Vec<&[C64]> = frame.iter().map(CVector::as_slice).collect();
    Ok(Evaluator::new(l.ortho_basis(), l.ambient_dim(), frame.len()).value(&slices))
}

/// The part of the pair objective invariant under `SU(2)` rotations of the pair:
/// `Σ_k |<ψ|A_k|φ>|² + ¼ Σ_k (<φ|A_k|φ> − <ψ|A_k|ψ>)²`. It has the same zero set as
/// [`objective`] and satisfies `G ≤ F ≤ 4G`.
pub fn gauge_invariant_objective(l: &OperatorSystem, phi: &CVector, psi: &CVector) -> Result<f64> {
    let frame = [phi.clone(), psi.clone()];
    check_frame(l, &frame)?;
    let mut off = 0.0;
    let mut diag = 0.0;
    for a in l.ortho_basis() {
        off += a.sandwich(psi.as_slice(), phi.as_slice()).norm_sqr();
        let diff = a.sandwich(phi.as_slice(), phi.as_slice()) - a.sandwich(psi.as_slice(), psi.as_slice());
        diag += diff.norm_sqr();
    }
    Ok(off + 0.25 * diag)
}

/// Value and Wirtinger gradient `∂F/∂v̄_l` of the frame objective. The real
/// gradient of `F` as a function on `(C^n)^d ≅ R^{2nd}` is twice this.
pub fn objective_gradient(l: &OperatorSystem, frame: &[CVector]) -> Result<(f64, Vec<CVector>)> {
    check_frame(l, frame)?;
    let slices: Vec<&[C64]> = frame.iter().map(CVector::as_slice).collect();
    let n = l.ambient_dim();
    let mut eval = Evaluator::new(l.ortho_basis(), n, frame.len());
    let mut grad = vec![vec![ZERO; n]; frame.len()];
    let value = eval.value_and_gradient(&slices, &mut grad);
    Ok((value, grad.into_iter().map(CVector::new).collect()))
}

fn check_frame(l: &OperatorSystem, frame: &[CVector]) -> Result<()> {
    if !l.has_hermitian_basis() {
        return Err(Error::InvalidInput("the objective needs a *-closed system".into()));
    }
    for v in frame {
        if v.dim() != l.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: l.ambient_dim(), found: v.dim() });
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm });
        }
    }
    Ok(())
}

/// Scratch space for repeated evaluations on one system. Every loop runs over the
/// nonzero entries of the basis operators only.
pub(crate) struct Evaluator<'a> {
    ops: &'a [SparseMat],
    m: Vec<C64>,
    coeff: Vec<C64>,
    d: usize,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(ops: &'a [SparseMat], _n: usize, d: usize) -> Self {
        Self { ops, m: vec![ZERO; d * d], coeff: vec![ZERO; d * d], d }
    }

    /// Fills `m[l·d + j] = <v_l|A|v_j>`.
    fn compress(&mut self, a: &SparseMat, frame: &[&[C64]]) {
        let d = self.d;
        if d == 2 {
            // A is Hermitian: the diagonal is real and m[1][0] = conj(m[0][1])
            let (f0, f1) = (frame[0], frame[1]);
            let (mut m00, mut m11, mut m01) = (0.0, 0.0, ZERO);
            let (rows, cols, vals) = a.parts();
            for ((&r, &c), &v) in rows.iter().zip(cols).zip(vals) {
                let (r, c) = (r as usize, c as usize);
                let left0 = f0[r].conj() * v;
                m00 += (left0 * f0[c]).re;
                m01 += left0 * f1[c];
                m11 += (f1[r].conj() * v * f1[c]).re;
            }
            self.m[0] = C64::new(m00, 0.0);
            self.m[1] = m01;
            self.m[2] = m01.conj();
            self.m[3] = C64::new(m11, 0.0);
            return;
        }
        self.m.iter_mut().for_each(|x| *x = ZERO);
        let (rows, cols, vals) = a.parts();
        for ((&r, &c), &v) in rows.iter().zip(cols).zip(vals) {
            let (r, c) = (r as usize, c as usize);
            for (l, u) in frame.iter().enumerate() {
                let left = u[r].conj() * v;
                for (j, w) in frame.iter().enumerate() {
                    self.m[l * d + j] += left * w[c];
                }
            }
        }
    }

    fn pair_terms(&self) -> f64 {
        let d = self.d;
        let mut f = 0.0;
        for l in 0..d {
            for j in l + 1..d {
                let diff = self.m[l * d + l].re - self.m[j * d + j].re;
                f += self.m[l * d + j].norm_sqr() + diff * diff;
            }
        }
        f
    }

    pub(crate) fn value(&mut self, frame: &[&[C64]]) -> f64 {
        let mut f = 0.0;
        for a in self.ops {
            self.compress(a, frame);
            f += self.pair_terms();
        }
        f
    }

    /// Adds the Wirtinger gradient to `grad` (shape `d × n`, zero-initialized by the
    /// caller) and returns the value.
    pub(crate) fn value_and_gradient(&mut self, frame: &[&[C64]], grad: &mut [Vec<C64>]) -> f64 {
        let d = self.d;
        let mut f = 0.0;
        for a in self.ops {
            self.compress(a, frame);
            f += self.pair_terms();
            // ∂/∂v̄_l = Σ_j coeff[l][j] · A v_j
            for l in 0..d {
                let mll = self.m[l * d + l].re;
                let mut self_coeff = 0.0;
                for j in 0..d {
                    if j != l {
                        self_coeff += 2.0 * (mll - self.m[j * d + j].re);
                        self.coeff[l * d + j] = self.m[l * d + j].conj();
                    }
                }
                self.coeff[l * d + l] = C64::new(self_coeff, 0.0);
            }
            let (rows, cols, vals) = a.parts();
            if d == 2 {
                let (c00, c01, c10, c11) = (self.coeff[0], self.coeff[1], self.coeff[2], self.coeff[3]);
                let (f0, f1) = (frame[0], frame[1]);
                let (g0, g1) = grad.split_at_mut(1);
                let (g0, g1) = (&mut g0[0], &mut g1[0]);
                for ((&r, &c), &v) in rows.iter().zip(cols).zip(vals) {
                    let (r, c) = (r as usize, c as usize);
                    let (w0, w1) = (v * f0[c], v * f1[c]);
                    g0[r] += c00 * w0 + c01 * w1;
                    g1[r] += c10 * w0 + c11 * w1;
                }
                continue;
            }
            for ((&r, &c), &v) in rows.iter().zip(cols).zip(vals) {
                let (r, c) = (r as usize, c as usize);
                for (l, g) in grad.iter_mut().enumerate() {
                    let mut acc = ZERO;
                    for (j, w) in frame.iter().enumerate() {
                        acc += self.coeff[l * d + j] * w[c];
                    }
                    g[r] += acc * v;
                }
            }
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klcodes::pi_certificate;
    use crate::matcore::{CMatrix, ONE};
    use crate::opsys::n_theta;
    use crate::Angle;

    fn unit(values: &[(f64, f64)]) -> CVector {
        CVector::new(values.iter().map(|&(r, i)| C64::new(r, i)).collect()).normalized().unwrap()
    }

    #[test]
    fn certificate_is_a_zero() {
        let c = pi_certificate();
        let f = objective(&n_theta(Angle::PI), &c.vectors()[0], &c.vectors()[1]).unwrap();
        assert!(f <= 1e-25, "{f:e}");
    }

    #[test]
    fn scalar_system_is_identically_zero() {
        let l = OperatorSystem::new(2, vec![CMatrix::identity(2)]).unwrap();
        let s = 0.5f64.sqrt();
        let phi = unit(&[(s, 0.0), (0.0, s)]);
        let psi = unit(&[(0.0, s), (s, 0.0)]);
        assert!(objective(&l, &phi, &psi).unwrap() < 1e-30);
    }

    #[test]
    fn rejects_bad_inputs() {
        let l = n_theta(Angle::PI);
        let v = CVector::basis(4, 0);
        assert!(matches!(objective(&l, &v, &CVector::basis(3, 0)), Err(Error::DimensionMismatch { .. })));
        let long = v.scale(ONE * 2.0);
        assert!(matches!(objective(&l, &v, &long), Err(Error::NotUnit { .. })));
    }

    #[test]
    fn rotation_changes_f_but_not_the_invariant_part() {
        let z = CMatrix::diag(&[ONE, -ONE, ZERO, ZERO]);
        let l = OperatorSystem::new(4, vec![CMatrix::identity(4), z]).unwrap();
        let (e1, e2) = (CVector::basis(4, 0), CVector::basis(4, 1));
        let s = C64::new(0.5f64.sqrt(), 0.0);
        let (r1, r2) = (e1.scale(s).add_scaled(-s, &e2), e1.scale(s).add_scaled(s, &e2));
        assert!((objective(&l, &e1, &e2).unwrap() - 2.0).abs() < 1e-14);
        assert!((objective(&l, &r1, &r2).unwrap() - 0.5).abs() < 1e-14);
        let g0 = gauge_invariant_objective(&l, &e1, &e2).unwrap();
        let g1 = gauge_invariant_objective(&l, &r1, &r2).unwrap();
        assert!((g0 - 0.5).abs() < 1e-14 && (g1 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn gradient_matches_wirtinger_derivative_on_a_small_case() {
        let l = n_theta(Angle::new(1, 3));
        let phi = unit(&[(0.3, 0.1), (-0.2, 0.4), (0.5, -0.1), (0.1, 0.2)]);
        let psi = unit(&[(0.1, -0.3), (0.2, 0.2), (-0.4, 0.1), (0.3, 0.5)]);
        let (f, g) = objective_gradient(&l, &[phi.clone(), psi.clone()]).unwrap();
        assert!((f - objective(&l, &phi, &psi).unwrap()).abs() < 1e-14);
        // perturb a single real coordinate of φ without renormalizing
        let h = 1e-6;
        let bump = |t: f64| {
            let mut p = phi.clone();
            p[2] += C64::new(t, 0.0);
            let slices: Vec<&[C64]> = vec![p.as_slice(), psi.as_slice()];
            Evaluator::new(l.ortho_basis(), 4, 2).value(&slices)
        };
        let fd = (bump(h) - bump(-h)) / (2.0 * h);
        assert!((fd - 2.0 * g[0][2].re).abs() < 1e-8 * fd.abs().max(1.0));
    }
}
