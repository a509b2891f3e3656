//! Structured solution of `<z_right|U_k ⊗ V_l|z_left> = 0`, `k, l = 1, 2`, with
//! `U_1 = diag{1, γ₁}`, `V_1 = diag{1, γ₂}` and `U_2 = V_2` the swap of `C²`.

use alloc::vec;
use alloc::vec::Vec;

use crate::matcore::{svd, CMatrix, CVector, C64, ONE, ZERO};
use crate::{Angle, Error, Result};

/// `|p_k|` at or below this times `max(1, ‖z_right‖)` counts as zero.
pub const VANISH_TOL: f64 = 1e-10;

/// One of the five solution families of the zero-pair system.
///
/// The named parameters enter the templates below (`μ = mu1`, `ν = mu2`):
///
/// ```text
/// 1) z_left = [μ; s] ⊗ [a; b]                          z_right = [μ̄; −s] ⊗ [c; d]
/// 2) z_left = [a; b] ⊗ [ν; s]                          z_right = [c; d] ⊗ [ν̄; −s]
/// 3) z_left = a[μ; 1]⊗[ν; s] + b[μ; −1]⊗[ν; −s]        z_right = c[μ̄; 1]⊗[ν̄; −s] + d[μ̄; −1]⊗[ν̄; s]
/// 4) z_left = h[μ; s] ⊗ [ν; t]                         z_right = [μ̄; −s]⊗[a; b] + [c; d]⊗[ν̄; −t]
/// 5) z_left = [μ; −s]⊗[a; b] + [c; d]⊗[ν; −t]          z_right = h[μ̄; s] ⊗ [ν̄; t]
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroPairSolution {
    pub form_id: u8,
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub h: C64,
    pub s: i8,
    /// Only meaningful for forms 4 and 5.
    pub t: i8,
    pub mu1: C64,
    /// `√γ₂`, or its conjugate for the conjugated system.
    pub mu2: C64,
}

fn two(x: C64, y: C64) -> CVector {
    CVector::new(vec![x, y])
}

fn sign(s: i8) -> C64 {
    C64::new(f64::from(s), 0.0)
}

type Part = (C64, CVector);

impl ZeroPairSolution {
    /// Template spanning vectors of the left and right vectors, as
    /// `(left parts, right parts)`; each part is paired with its parameter.
    fn templates(&self) -> (Vec<Part>, Vec<Part>) {
        let (mu, nu) = (self.mu1, self.mu2);
        let (s, t) = (sign(self.s), sign(self.t));
        let e = |k: usize| CVector::basis(2, k);
        let expand = |fixed: CVector, first: bool, p: C64, q: C64| -> Vec<(C64, CVector)> {
            // fixed ⊗ [p; q] (or [p; q] ⊗ fixed) split along the standard basis of C²
            if first {
                vec![(p, fixed.kron(&e(0))), (q, fixed.kron(&e(1)))]
            } else {
                vec![(p, e(0).kron(&fixed)), (q, e(1).kron(&fixed))]
            }
        };
        match self.form_id {
            1 => (
                expand(two(mu, s), true, self.a, self.b),
                expand(two(mu.conj(), -s), true, self.c, self.d),
            ),
            2 => (
                expand(two(nu, s), false, self.a, self.b),
                expand(two(nu.conj(), -s), false, self.c, self.d),
            ),
            3 => (
                vec![(self.a, two(mu, ONE).kron(&two(nu, s))), (self.b, two(mu, -ONE).kron(&two(nu, -s)))],
                vec![
                    (self.c, two(mu.conj(), ONE).kron(&two(nu.conj(), -s))),
                    (self.d, two(mu.conj(), -ONE).kron(&two(nu.conj(), s))),
                ],
            ),
            4 => {
                let mut right = expand(two(mu.conj(), -s), true, self.a, self.b);
                right.extend(expand(two(nu.conj(), -t), false, self.c, self.d));
                (vec![(self.h, two(mu, s).kron(&two(nu, t)))], right)
            }
            _ => {
                let mut left = expand(two(mu, -s), true, self.a, self.b);
                left.extend(expand(two(nu, -t), false, self.c, self.d));
                (left, vec![(self.h, two(mu.conj(), s).kron(&two(nu.conj(), t)))])
            }
        }
    }

    /// `(z_left, z_right)` for the stored parameters.
    pub fn materialize(&self) -> (CVector, CVector) {
        let (left, right) = self.templates();
        let combine = |parts: &[(C64, CVector)]| {
            parts.iter().fold(CVector::zeros(4), |acc, (coef, v)| acc.add_scaled(*coef, v))
        };
        (combine(&left), combine(&right))
    }

    /// Left vector with the left-side parameters replaced by `params` (in the order
    /// they appear in the template) and the right side untouched.
    pub fn with_left_parameters(&self, params: &[C64]) -> ZeroPairSolution {
        let mut out = *self;
        let slots: Vec<&mut C64> = match self.form_id {
            1..=3 => vec![&mut out.a, &mut out.b],
            4 => vec![&mut out.h],
            _ => vec![&mut out.a, &mut out.b, &mut out.c, &mut out.d],
        };
        for (slot, p) in slots.into_iter().zip(params) {
            *slot = *p;
        }
        out
    }
}

/// Output of [`solve_zero_pair`].
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroPairResult {
    /// `p₁..p₄`, the eigenvalues of `W` on the columns of `S`.
    pub p: [C64; 4],
    pub vanishing: [bool; 4],
    /// Orthonormal basis of the admissible left vectors (span of `q_k` with `p_k = 0`).
    pub nullspace: Vec<CVector>,
    /// The matching family with right-side parameters fitted to `z_right`; empty when
    /// no `p_k` or every `p_k` vanishes.
    pub solutions: Vec<ZeroPairSolution>,
    /// Set when every `p_k` vanishes (`z_right = 0`).
    pub full_space: bool,
}

/// `(μ₁, μ₂, γ₁, γ₂)` with `γ₂`, `μ₂` conjugated when `conj2`.
fn phases(theta1: Angle, theta2: Angle, conj2: bool) -> (C64, C64, C64, C64) {
    let (mu1, g1) = (theta1.half_phase(), theta1.gamma());
    let (mut mu2, mut g2) = (theta2.half_phase(), theta2.gamma());
    if conj2 {
        mu2 = mu2.conj();
        g2 = g2.conj();
    }
    (mu1, mu2, g1, g2)
}

fn check_right(z_right: &CVector) -> Result<()> {
    if z_right.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: z_right.dim() });
    }
    Ok(())
}

/// The coefficient matrix `W` with `(a, b, c, d)` the entries of the bra `<z_right|`;
/// its rows are `<z_right|U_k ⊗ V_l` for `(k, l) = (1,1), (1,2), (2,1), (2,2)`.
pub fn w_matrix(theta1: Angle, theta2: Angle, z_right: &CVector, conj2: bool) -> Result<CMatrix> {
    check_right(z_right)?;
    let (_, _, g1, g2) = phases(theta1, theta2, conj2);
    let [a, b, c, d] = [0, 1, 2, 3].map(|k| z_right[k].conj());
    CMatrix::new(
        4,
        4,
        vec![
            a, g2 * b, g1 * c, g1 * g2 * d, //
            b, a, g1 * d, g1 * c, //
            c, g2 * d, a, g2 * b, //
            d, c, b, a,
        ],
    )
}

/// `S` with columns `q₁ = [μ₁;1]⊗[μ₂;1]`, `q₂ = [μ₁;1]⊗[μ₂;−1]`, `q₃ = [μ₁;−1]⊗[μ₂;1]`,
/// `q₄ = [μ₁;−1]⊗[μ₂;−1]`. Its columns are orthogonal with squared norm 4.
pub fn s_matrix(theta1: Angle, theta2: Angle, conj2: bool) -> CMatrix {
    let (mu1, mu2, _, _) = phases(theta1, theta2, conj2);
    CMatrix::from_columns(&q_columns(mu1, mu2))
}

fn q_columns(mu1: C64, mu2: C64) -> [CVector; 4] {
    let signs = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
    signs.map(|(s, t)| two(mu1, C64::new(s, 0.0)).kron(&two(mu2, C64::new(t, 0.0))))
}

/// Closed-form `p₁..p₄` for `(a, b, c, d) = <z_right|`.
pub fn p_values(theta1: Angle, theta2: Angle, z_right: &CVector, conj2: bool) -> Result<[C64; 4]> {
    check_right(z_right)?;
    let (mu1, mu2, _, _) = phases(theta1, theta2, conj2);
    let [a, b, c, d] = [0, 1, 2, 3].map(|k| z_right[k].conj());
    Ok([
        a + mu2 * b + mu1 * c + mu1 * mu2 * d,
        a - mu2 * b + mu1 * c - mu1 * mu2 * d,
        a + mu2 * b - mu1 * c - mu1 * mu2 * d,
        a - mu2 * b - mu1 * c + mu1 * mu2 * d,
    ])
}

/// Solves for all left vectors `z` with `W z = 0` and classifies the solution family.
pub fn solve_zero_pair(theta1: Angle, theta2: Angle, z_right: &CVector, conj2: bool) -> Result<ZeroPairResult> {
    let p = p_values(theta1, theta2, z_right, conj2)?;
    let (mu1, mu2, _, _) = phases(theta1, theta2, conj2);
    let threshold = VANISH_TOL * z_right.norm().max(1.0);
    let vanishing = p.map(|pk| pk.norm() <= threshold);
    let qs = q_columns(mu1, mu2);
    let half = C64::new(0.5, 0.0);
    let nullspace: Vec<CVector> =
        qs.iter().zip(&vanishing).filter(|(_, &v)| v).map(|(q, _)| q.scale(half)).collect();
    let count = vanishing.iter().filter(|&&v| v).count();
    let full_space = count == 4;

    let template = |form_id: u8, s: i8, t: i8| ZeroPairSolution {
        form_id,
        a: ONE,
        b: ONE,
        c: ONE,
        d: ONE,
        h: ONE,
        s,
        t,
        mu1,
        mu2,
    };
    let signs_of = |k: usize| -> (i8, i8) { (if k < 2 { 1 } else { -1 }, if k.is_multiple_of(2) { 1 } else { -1 }) };
    let form = match (count, vanishing) {
        (2, [true, true, false, false]) => Some(template(1, 1, 1)),
        (2, [false, false, true, true]) => Some(template(1, -1, 1)),
        (2, [true, false, true, false]) => Some(template(2, 1, 1)),
        (2, [false, true, false, true]) => Some(template(2, -1, 1)),
        (2, [true, false, false, true]) => Some(template(3, 1, 1)),
        (2, [false, true, true, false]) => Some(template(3, -1, 1)),
        (1, _) => {
            let k = vanishing.iter().position(|&v| v).expect("one vanishing p");
            let (s, t) = signs_of(k);
            Some(template(4, s, t))
        }
        (3, _) => {
            let k = vanishing.iter().position(|&v| !v).expect("one nonvanishing p");
            let (s, t) = signs_of(k);
            Some(template(5, s, t))
        }
        _ => None,
    };
    let solutions = match form {
        Some(sol) => vec![fit_right(sol, z_right)],
        None => Vec::new(),
    };
    Ok(ZeroPairResult { p, vanishing, nullspace, solutions, full_space })
}

/// Least-squares (pseudo-inverse) fit of the right-side parameters to `z_right`.
fn fit_right(sol: ZeroPairSolution, z_right: &CVector) -> ZeroPairSolution {
    let (_, right) = sol.templates();
    let columns: Vec<CVector> = right.iter().map(|(_, v)| v.clone()).collect();
    let b = CMatrix::from_columns(&columns);
    let dec = svd(&b);
    let top = dec.s.first().copied().unwrap_or(0.0);
    let mut coeffs = vec![ZERO; columns.len()];
    for (k, &sk) in dec.s.iter().enumerate() {
        if sk <= 1e-12 * top {
            continue;
        }
        let proj = dec.u.column(k).dot(z_right) / sk;
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c += dec.v[(j, k)] * proj;
        }
    }
    let mut out = sol;
    let slots: Vec<&mut C64> = match sol.form_id {
        1..=3 => vec![&mut out.c, &mut out.d],
        4 => vec![&mut out.a, &mut out.b, &mut out.c, &mut out.d],
        _ => vec![&mut out.h],
    };
    for (slot, c) in slots.into_iter().zip(coeffs) {
        *slot = c;
    }
    out
}
