//! Numerical oracles for the linear-algebra facts behind the pair
//! analysis, with generators for instances that satisfy their hypotheses.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matcore::{kron, orthonormalize, svd, svd_rank, CMatrix, CVector, C64, ZERO};
use crate::{Error, Result};

/// Relative rank cutoff used by every oracle.
const RANK_TOL: f64 = 1e-8;

fn rank_of(vectors: &[&CVector]) -> usize {
    if vectors.iter().all(|v| v.norm() == 0.0) {
        return 0;
    }
    let cols: Vec<CVector> = vectors.iter().map(|v| (*v).clone()).collect();
    svd_rank(&CMatrix::from_columns(&cols), RANK_TOL)
}

fn check_dims(vectors: &[&CVector], dim: usize) -> Result<()> {
    for v in vectors {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.dim() });
        }
    }
    Ok(())
}

fn scale_of<'a>(vectors: impl IntoIterator<Item = &'a CVector>) -> f64 {
    vectors.into_iter().map(CVector::norm_sqr).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
}

/// Conclusion reached by [`parallel_triple`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParallelVerdict {
    LeftParallel,
    RightParallel,
    BothParallel,
    /// Neither family is parallel.
    Neither,
}

impl fmt::Display for ParallelVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::LeftParallel => "left-parallel",
            Self::RightParallel => "right-parallel",
            Self::BothParallel => "both-parallel",
            Self::Neither => "neither",
        })
    }
}

/// Given `|a><x| + |b><y| + |c><z| = 0`, reports whether `a ∥ b ∥ c` or `x ∥ y ∥ z`.
pub fn parallel_triple(left: [&CVector; 3], right: [&CVector; 3], tol: f64) -> Result<ParallelVerdict> {
    let n = left[0].dim();
    check_dims(&left, n)?;
    let m = right[0].dim();
    check_dims(&right, m)?;
    let mut sum = CMatrix::zeros(n, m);
    for (u, v) in left.iter().zip(&right) {
        sum = &sum + &CMatrix::outer(u, v);
    }
    let scale = scale_of(left.iter().copied().chain(right.iter().copied()));
    if sum.hs_norm() > tol * scale {
        return Err(Error::HypothesisNotMet(alloc::format!("Σ|a><x| has norm {:e}", sum.hs_norm())));
    }
    let l = rank_of(&left) <= 1;
    let r = rank_of(&right) <= 1;
    Ok(match (l, r) {
        (true, true) => ParallelVerdict::BothParallel,
        (true, false) => ParallelVerdict::LeftParallel,
        (false, true) => ParallelVerdict::RightParallel,
        (false, false) => ParallelVerdict::Neither,
    })
}

/// Ranks reported by [`parallel_rank_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankVerdict {
    /// Rank of the Gram matrix `[<x_i|x_j>]`.
    pub rank_x: usize,
    /// Rank of the Gram matrix `[<y_i|y_j>]`.
    pub rank_y: usize,
    /// Dimension of `span{x_i, y_i}`.
    pub span_dim: usize,
    /// Some `x_i = y_i = 0`, in which case the span should be at most one-dimensional.
    pub has_zero_pair: bool,
}

impl RankVerdict {
    /// Expected conclusion: span dimension ≤ 2, or ≤ 1 with a zero pair.
    pub fn holds(&self) -> bool {
        let bound = if self.has_zero_pair { 1 } else { 2 };
        self.rank_x == self.rank_y && self.rank_x <= bound && self.span_dim <= bound
    }
}

fn gram(us: &[CVector], vs: &[CVector]) -> CMatrix {
    CMatrix::from_fn(us.len(), vs.len(), |i, j| us[i].dot(&vs[j]))
}

/// Given `Σ|y_i><x_i| = 0` and `Σ|y_i><y_i| = Σ|x_i><x_i|` in `C^4`, computes the
/// ranks of the Gram matrices `X`, `Y` and the dimension of the common span. The
/// identities `XY = 0`, `X² = ZZ^*` and `Y² = Z^*Z` (with `Z = [<x_i|y_j>]`) are
/// checked as part of the hypothesis.
pub fn parallel_rank_check(xs: &[CVector], ys: &[CVector], tol: f64) -> Result<RankVerdict> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    let refs: Vec<&CVector> = xs.iter().chain(ys).collect();
    check_dims(&refs, 4)?;
    let scale = scale_of(refs.iter().copied());
    let mut cross = CMatrix::zeros(4, 4);
    let mut balance = CMatrix::zeros(4, 4);
    for (x, y) in xs.iter().zip(ys) {
        cross = &cross + &CMatrix::outer(y, x);
        balance = &(&balance + &CMatrix::outer(y, y)) - &CMatrix::outer(x, x);
    }
    if cross.hs_norm() > tol * scale || balance.hs_norm() > tol * scale {
        return Err(Error::HypothesisNotMet(alloc::format!(
            "Σ|y><x| = {:e}, Σ|y><y| − Σ|x><x| = {:e}",
            cross.hs_norm(),
            balance.hs_norm()
        )));
    }
    let (x, y, z) = (gram(xs, xs), gram(ys, ys), gram(xs, ys));
    let g_scale = scale * scale;
    let xy = (&x * &y).hs_norm();
    let x2 = (&(&x * &x) - &(&z * &z.adjoint())).hs_norm();
    let y2 = (&(&y * &y) - &(&z.adjoint() * &z)).hs_norm();
    if xy.max(x2).max(y2) > tol * g_scale * xs.len() as f64 {
        return Err(Error::HypothesisNotMet(alloc::format!("Gram identities off by {:e}", xy.max(x2).max(y2))));
    }
    let rank = |m: &CMatrix| if m.hs_norm() == 0.0 { 0 } else { svd_rank(m, RANK_TOL) };
    let has_zero_pair = xs.iter().zip(ys).any(|(x, y)| x.norm() <= tol * scale.sqrt() && y.norm() <= tol * scale.sqrt());
    Ok(RankVerdict { rank_x: rank(&x), rank_y: rank(&y), span_dim: rank_of(&refs), has_zero_pair })
}

fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::new(
        (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect(),
    )
}

/// Random unitary of size `n` (Gram–Schmidt of a complex Gaussian matrix), by rows.
fn random_unitary_rows<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<CVector> {
    loop {
        let rows: Vec<CVector> = (0..n).map(|_| gaussian_vector(rng, n)).collect();
        let q = orthonormalize(&rows, 1e-8);
        if q.len() == n {
            return q;
        }
    }
}

/// Generates `(x_i, y_i)`, `i = 1..4`, in `C^4` satisfying the hypothesis of
/// [`parallel_rank_check`]. With `zero_pair = Some(k)` the pair `k` is zero and the
/// remaining three live on a line; otherwise all eight live in a random plane.
pub fn rank_check_instance<R: Rng + ?Sized>(rng: &mut R, zero_pair: Option<usize>) -> (Vec<CVector>, Vec<CVector>) {
    let plane = random_unitary_rows(rng, 4);
    let (width, count) = if zero_pair.is_some() { (1, 3) } else { (2, 4) };
    // rows of a random unitary: X = T [r_1..r_w], Y = T [r_{w+1}..r_{2w}] give
    // Y X^* = 0 and X X^* = Y Y^* = T T^*
    let u = random_unitary_rows(rng, count);
    let t = CMatrix::from_fn(width, width, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let coords = |offset: usize, i: usize| -> CVector {
        let raw = CVector::new((0..width).map(|r| u[offset + r][i]).collect());
        let mixed = t.mat_vec(&raw);
        (0..width).fold(CVector::zeros(4), |acc, r| acc.add_scaled(mixed[r], &plane[r]))
    };
    let mut xs: Vec<CVector> = (0..count).map(|i| coords(0, i)).collect();
    let mut ys: Vec<CVector> = (0..count).map(|i| coords(width, i)).collect();
    if let Some(k) = zero_pair {
        let k = k.min(3);
        xs.insert(k, CVector::zeros(4));
        ys.insert(k, CVector::zeros(4));
    }
    (xs, ys)
}

/// Cases of the rank-one tensor equality `X₁⊗Y₁ + X₂⊗Y₂ = X₃⊗Y₃ + X₄⊗Y₄`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Al2Case {
    /// All `x_i` parallel, and `Σ ‖x_i‖² Y_i` balances.
    XParallel = 1,
    /// All `y_i` parallel, and `Σ ‖y_i‖² X_i` balances.
    YParallel = 2,
    /// `X₁⊗Y₁ = X₄⊗Y₄` and `X₂⊗Y₂ = X₃⊗Y₃`.
    Crossed = 3,
    /// `X₁⊗Y₁ = X₃⊗Y₃` and `X₂⊗Y₂ = X₄⊗Y₄`.
    Straight = 4,
}

fn projector(v: &CVector) -> CMatrix {
    CMatrix::outer(v, v)
}

/// Classifies an instance of the rank-one tensor equality (first matching case in
/// the order 1..4). Returns `None` when no case matches.
pub fn al2_case(xs: &[CVector; 4], ys: &[CVector; 4], tol: f64) -> Result<Option<Al2Case>> {
    let refs: Vec<&CVector> = xs.iter().chain(ys.iter()).collect();
    check_dims(&refs, 2)?;
    let terms: Vec<CMatrix> = xs.iter().zip(ys).map(|(x, y)| kron(&projector(x), &projector(y))).collect();
    let scale = terms.iter().map(CMatrix::hs_norm).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let close = |a: &CMatrix, b: &CMatrix| (a - b).hs_norm() <= tol * scale;
    if !close(&(&terms[0] + &terms[1]), &(&terms[2] + &terms[3])) {
        return Err(Error::HypothesisNotMet("the tensor equality does not hold".into()));
    }
    let weighted = |vs: &[CVector; 4], ws: &[CVector; 4], k: usize| projector(&ws[k]).scale_real(vs[k].norm_sqr());
    let balanced = |vs, ws| {
        close(&(&weighted(vs, ws, 0) + &weighted(vs, ws, 1)), &(&weighted(vs, ws, 2) + &weighted(vs, ws, 3)))
    };
    let xr: Vec<&CVector> = xs.iter().collect();
    let yr: Vec<&CVector> = ys.iter().collect();
    Ok(if rank_of(&xr) <= 1 && balanced(xs, ys) {
        Some(Al2Case::XParallel)
    } else if rank_of(&yr) <= 1 && balanced(ys, xs) {
        Some(Al2Case::YParallel)
    } else if close(&terms[0], &terms[3]) && close(&terms[1], &terms[2]) {
        Some(Al2Case::Crossed)
    } else if close(&terms[0], &terms[2]) && close(&terms[1], &terms[3]) {
        Some(Al2Case::Straight)
    } else {
        None
    })
}

/// Conclusion reached by [`al3_factor`].
#[derive(Clone, Debug, PartialEq)]
pub struct Al3Verdict {
    /// `z` with `d = z ⊗ y`, when it exists.
    pub d_factor: Option<CVector>,
    /// `(p, q)` with `c = p ⊗ q`, when it exists.
    pub c_factor: Option<(CVector, CVector)>,
}

impl Al3Verdict {
    pub fn holds(&self) -> bool {
        self.d_factor.is_some() || self.c_factor.is_some()
    }
}

/// Given `<a|U₁⊗A|x⊗y> = <c|U₁⊗A|d>` for all `A ∈ M₂` (with `U₁ = diag{1, γ}`),
/// looks for `d = z ⊗ y` or `c = p ⊗ q`.
pub fn al3_factor(a: &CVector, c: &CVector, d: &CVector, x: &CVector, y: &CVector, gamma: C64, tol: f64) -> Result<Al3Verdict> {
    check_dims(&[a, c, d], 4)?;
    check_dims(&[x, y], 2)?;
    if x.norm() == 0.0 || y.norm() == 0.0 {
        return Err(Error::HypothesisNotMet("x and y must be nonzero".into()));
    }
    let u1 = CMatrix::diag(&[C64::new(1.0, 0.0), gamma]);
    let xy = x.kron(y);
    let scale = (a.norm() * xy.norm()).max(c.norm() * d.norm()).max(f64::MIN_POSITIVE);
    for i in 0..2 {
        for j in 0..2 {
            let op = kron(&u1, &CMatrix::unit(2, i, j));
            let gap = (op.sandwich(a, &xy) - op.sandwich(c, d)).norm();
            if gap > tol * scale {
                return Err(Error::HypothesisNotMet(alloc::format!("matrix unit ({i},{j}) off by {gap:e}")));
            }
        }
    }
    // d = z ⊗ y  ⇔  both halves of d are multiples of y
    let halves = |v: &CVector| (CVector::new(v.as_slice()[..2].to_vec()), CVector::new(v.as_slice()[2..].to_vec()));
    let (d1, d2) = halves(d);
    let d_factor = (rank_of(&[&d1, &d2, y]) <= 1).then(|| {
        let yy = y.norm_sqr();
        CVector::new(vec_of([y.dot(&d1) / yy, y.dot(&d2) / yy]))
    });
    let (c1, c2) = halves(c);
    let c_factor = (rank_of(&[&c1, &c2]) <= 1).then(|| {
        // c_{2i+j} = p_i q_j: the 2×2 reshape with rows c1, c2 has rank ≤ 1
        let m = CMatrix::from_fn(2, 2, |i, j| c[2 * i + j]);
        let dec = svd(&m);
        let p = dec.u.column(0).scale(C64::new(dec.s[0], 0.0));
        let q = CVector::new(vec_of([dec.v[(0, 0)].conj(), dec.v[(1, 0)].conj()]));
        (p, q)
    });
    Ok(Al3Verdict { d_factor, c_factor })
}

fn vec_of(values: [C64; 2]) -> Vec<C64> {
    values.to_vec()
}

/// Instance of the hypothesis of [`al3_factor`]. `branch_d` selects `d = z ⊗ y`;
/// otherwise `c = p ⊗ q` with `d` not a product through `y`.
/// Returns `(a, c, d, x, y)`.
pub fn al3_instance<R: Rng + ?Sized>(rng: &mut R, gamma: C64, branch_d: bool) -> (CVector, CVector, CVector, CVector, CVector) {
    let x = gaussian_vector(rng, 2);
    let y = gaussian_vector(rng, 2);
    if branch_d {
        let z = gaussian_vector(rng, 2);
        let c = gaussian_vector(rng, 4);
        let d = z.kron(&y);
        // x_i <a_i| = z_i <c_i| on each half
        let a = CVector::new(
            (0..4).map(|k| (z[k / 2] / x[k / 2]).conj() * c[k]).collect(),
        );
        (a, c, d, x, y)
    } else {
        let p = gaussian_vector(rng, 2);
        let q = gaussian_vector(rng, 2);
        let lambda: C64 = {
            let re: f64 = StandardNormal.sample(rng);
            C64::new(re, 1.0)
        };
        let d1 = gaussian_vector(rng, 2);
        // p̄₁ d₁ + γ p̄₂ d₂ = λ y
        let d2 = y.scale(lambda).add_scaled(-p[0].conj(), &d1).scale(C64::new(1.0, 0.0) / (gamma * p[1].conj()));
        let c = p.kron(&q);
        let d = CVector::new(d1.as_slice().iter().chain(d2.as_slice()).copied().collect());
        // x₁ <a₁| = λ <q|, a₂ = 0
        let a1 = q.scale((lambda / x[0]).conj());
        let a = CVector::new(a1.as_slice().iter().copied().chain([ZERO, ZERO]).collect());
        (a, c, d, x, y)
    }
}

/// Random instance of case 3 (`pairing = Crossed`) or case 4 (`Straight`) of
/// [`al2_case`]: random rank-one terms, each repeated with compensating rescalings
/// and phases.
pub fn al2_instance<R: Rng + ?Sized>(rng: &mut R, case: Al2Case) -> ([CVector; 4], [CVector; 4]) {
    let mut fresh = || gaussian_vector(rng, 2);
    let (x1, y1, x2, y2) = (fresh(), fresh(), fresh(), fresh());
    let twin = |v: &CVector, w: &CVector, rng: &mut R| {
        let r: f64 = 0.5 + rng.random::<f64>();
        let (p1, p2): (f64, f64) = (rng.random::<f64>() * 6.0, rng.random::<f64>() * 6.0);
        (v.scale(C64::from_polar(r, p1)), w.scale(C64::from_polar(1.0 / r, p2)))
    };
    let (x1b, y1b) = twin(&x1, &y1, rng);
    let (x2b, y2b) = twin(&x2, &y2, rng);
    match case {
        Al2Case::Straight => ([x1, x2, x1b, x2b], [y1, y2, y1b, y2b]),
        _ => ([x1, x2, x2b, x1b], [y1, y2, y2b, y1b]),
    }
}
