//! Jacobi-type decompositions for small dense complex matrices.

use alloc::vec::Vec;


use super::{CMatrix, CVector, C64, ONE, ZERO};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Hermitian tolerance accepted by [`herm_eig`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

/// Thin singular value decomposition `M = U diag(s) V^*`, singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

/// The 2×2 unitary `J` that zeroes the off-diagonal of the Hermitian pencil
/// `[[app, apq], [conj(apq), aqq]]` under `J^* H J`. Returned as `(c, s, phase)` with
/// `J = [[c, s], [-s·phase, c·phase]]`, `phase = exp(-i arg apq)`.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> (f64, f64, C64) {
    let r = apq.norm();
    let phase = (apq / r).conj();
    let zeta = (aqq - app) / (2.0 * r);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase)
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn herm_eig(m: &CMatrix) -> Result<HermEig> {
    let deviation = m.hermitian_deviation();
    if !m.is_square() || deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.hs_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let (c, s, ph) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                let (jpp, jpq, jqp, jqq) = (C64::new(c, 0.0), C64::new(s, 0.0), -ph * s, ph * c);
                // A <- A J (columns p, q)
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                // A <- J^* A (rows p, q)
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermEig { values, vectors })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn herm_eig_min(m: &CMatrix) -> Result<f64> {
    Ok(herm_eig(m)?.values.first().copied().unwrap_or(0.0))
}

/// One-sided (Hestenes) Jacobi SVD of a matrix with `rows >= cols`.
fn hestenes(m: &CMatrix) -> Svd {
    let (rows, cols) = (m.rows(), m.cols());
    debug_assert!(rows >= cols);
    // work column-major for cache-friendly column rotations
    let mut a: Vec<Vec<C64>> = (0..cols).map(|j| m.column(j).into_vec()).collect();
    let mut v: Vec<Vec<C64>> = (0..cols)
        .map(|j| {
            let mut col = alloc::vec![ZERO; cols];
            col[j] = ONE;
            col
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (alpha, beta, gamma) = {
                    let (ap, aq) = (&a[p], &a[q]);
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = ZERO;
                    for (x, y) in ap.iter().zip(aq) {
                        alpha += x.norm_sqr();
                        beta += y.norm_sqr();
                        gamma += x.conj() * y;
                    }
                    (alpha, beta, gamma)
                };
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let (c, s, ph) = jacobi_rotation(alpha, beta, gamma);
                let (jpp, jpq, jqp, jqq) = (C64::new(c, 0.0), C64::new(s, 0.0), -ph * s, ph * c);
                let (lo, hi) = a.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, xq) = (*x, *y);
                    *x = xp * jpp + xq * jqp;
                    *y = xp * jpq + xq * jqq;
                }
                let (lo, hi) = v.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, xq) = (*x, *y);
                    *x = xp * jpp + xq * jqp;
                    *y = xp * jpq + xq * jqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = a.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let s: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let u = CMatrix::from_fn(rows, cols, |i, k| {
        let j = order[k];
        if norms[j] > 0.0 {
            a[j][i] / norms[j]
        } else {
            ZERO
        }
    });
    let vm = CMatrix::from_fn(cols, cols, |i, k| v[order[k]][i]);
    Svd { u, s, v: vm }
}

/// Thin SVD of an arbitrary matrix.
pub fn svd(m: &CMatrix) -> Svd {
    if m.rows() >= m.cols() {
        hestenes(m)
    } else {
        let t = hestenes(&m.adjoint());
        Svd { u: t.v, s: t.s, v: t.u }
    }
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    svd(m).s
}

/// Number of singular values exceeding `tol` times the largest one.
pub fn svd_rank(m: &CMatrix, tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > tol * top).count(),
        _ => 0,
    }
}

/// Orthonormal basis of `{x : M x = 0}` via the SVD; singular values at or below
/// `tol` times the largest count as zero.
pub fn nullspace(m: &CMatrix, tol: f64) -> Vec<CVector> {
    let n = m.cols();
    if m.rows() >= n {
        let d = hestenes(m);
        let top = d.s.first().copied().unwrap_or(0.0);
        (0..n).filter(|&k| d.s[k] <= tol * top || top == 0.0).map(|k| d.v.column(k)).collect()
    } else {
        // pad with zero rows so that the one-sided sweep sees every column
        let padded = CMatrix::from_fn(n, n, |i, j| if i < m.rows() { m[(i, j)] } else { ZERO });
        nullspace(&padded, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut state = seed;
        CMatrix::from_fn(rows, cols, |_, _| {
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            };
            C64::new(next(), next())
        })
    }

    #[test]
    fn eig_reconstructs() {
        let m = sample(6, 6, 3);
        let h = &m + &m.adjoint();
        let e = herm_eig(&h).unwrap();
        let d = CMatrix::diag(&e.values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let back = &(&e.vectors * &d) * &e.vectors.adjoint();
        assert!(back.max_abs_diff(&h) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_min_examples() {
        assert_eq!(herm_eig_min(&CMatrix::identity(3)).unwrap(), 1.0);
        let d = CMatrix::diag(&[ONE, -ONE]);
        assert_eq!(herm_eig_min(&d).unwrap(), -1.0);
        let g = crate::Angle::new(1, 2).gamma();
        let u = CMatrix::diag(&[ONE, g]);
        assert!(herm_eig_min(&(&u + &u.adjoint())).unwrap().abs() < 1e-15);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMatrix::unit(2, 0, 1);
        assert!(matches!(herm_eig_min(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn svd_reconstructs_both_shapes() {
        for (r, c) in [(5, 3), (3, 5), (4, 4)] {
            let m = sample(r, c, (r * 10 + c) as u64);
            let d = svd(&m);
            let k = d.s.len();
            let sd = CMatrix::diag(&d.s.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
            assert_eq!(d.u.cols(), k);
            let back = &(&d.u * &sd) * &d.v.adjoint();
            assert!(back.max_abs_diff(&m) < 1e-12, "{r}x{c}");
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(svd_rank(&CMatrix::zeros(4, 4), 1e-10), 0);
        assert_eq!(svd_rank(&CMatrix::identity(4), 1e-10), 4);
        let a = sample(6, 2, 9);
        let b = sample(2, 5, 10);
        assert_eq!(svd_rank(&(&a * &b), 1e-10), 2);
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let a = sample(4, 2, 1);
        let b = sample(2, 4, 2);
        let m = &a * &b;
        let ns = nullspace(&m, 1e-10);
        assert_eq!(ns.len(), 2);
        for x in &ns {
            assert!(m.mat_vec(x).norm() < 1e-12);
        }
        let wide = sample(1, 3, 5);
        assert_eq!(nullspace(&wide, 1e-10).len(), 2);
    }
}
