//! Observables (finite POVMs) built from operator systems, and indistinguishable
//! subspaces.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::klcodes::{CodeCandidate, KLReport};
use crate::matcore::{herm_eig_min, kron, CMatrix, CVector, C64, ONE, ZERO};
use crate::opsys::OperatorSystem;
use crate::{Error, Result};

/// Tolerance of the positivity and completeness invariants.
pub const EFFECT_TOL: f64 = 1e-10;
/// Default operator-norm target of the rescaled basis elements.
pub const DEFAULT_SCALE: f64 = 0.5;
const MAX_SHRINKS: usize = 20;

/// A list of positive semidefinite effects summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    ambient_dim: usize,
    effects: Vec<CMatrix>,
    span_dim: usize,
}

impl Observable {
    /// Checks positivity (smallest eigenvalue ≥ −1e-10) and completeness (sum within
    /// 1e-10 of the identity, entrywise) and records the dimension of the span.
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        let n = effects
            .first()
            .map(CMatrix::rows)
            .ok_or_else(|| Error::InvalidInput(String::from("an observable needs at least one effect")))?;
        for m in &effects {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.rows().max(m.cols()) });
            }
        }
        if let Some(failure) = invariant_failure(n, &effects) {
            return Err(Error::InvalidInput(failure));
        }
        let span_dim = span_rank(&effects);
        Ok(Self { ambient_dim: n, effects, span_dim })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Dimension of the linear span of the effects.
    pub fn span_dim(&self) -> usize {
        self.span_dim
    }

    /// Largest entry of `Σ M_k − I`.
    pub fn sum_residual(&self) -> f64 {
        sum_residual(self.ambient_dim, &self.effects)
    }

    /// Smallest eigenvalue over all effects.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        self.effects.iter().map(herm_eig_min).try_fold(f64::INFINITY, |acc, e| e.map(|e| acc.min(e)))
    }

    /// The operator system spanned by the effects.
    pub fn span(&self) -> Result<OperatorSystem> {
        OperatorSystem::new(self.ambient_dim, self.effects.clone())
    }

    /// Outcome distribution `(<v|M_k|v>)_k` of a pure state.
    pub fn probabilities(&self, v: &CVector) -> Result<Vec<f64>> {
        if v.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: v.dim() });
        }
        Ok(self.effects.iter().map(|m| m.sandwich(v, v).re).collect())
    }
}

fn sum_residual(n: usize, effects: &[CMatrix]) -> f64 {
    let mut total = CMatrix::zeros(n, n);
    for m in effects {
        total.axpy(ONE, m);
    }
    total.max_abs_diff(&CMatrix::identity(n))
}

fn invariant_failure(n: usize, effects: &[CMatrix]) -> Option<String> {
    let residual = sum_residual(n, effects);
    if residual > EFFECT_TOL {
        return Some(alloc::format!("effects sum to the identity only within {residual:e}"));
    }
    for (k, m) in effects.iter().enumerate() {
        match herm_eig_min(m) {
            Ok(e) if e >= -EFFECT_TOL => {}
            Ok(e) => return Some(alloc::format!("effect {k} has eigenvalue {e:e}")),
            Err(err) => return Some(alloc::format!("effect {k}: {err}")),
        }
    }
    None
}

/// Rank of `{M_k}` in the Hilbert–Schmidt geometry, by pivoted Cholesky on the
/// Gram matrix with relative cutoff 1e-9.
fn span_rank(effects: &[CMatrix]) -> usize {
    let m = effects.len();
    let mut g = vec![ZERO; m * m];
    for i in 0..m {
        for j in i..m {
            let v = effects[i].hs_inner(&effects[j]);
            g[i * m + j] = v;
            g[j * m + i] = v.conj();
        }
    }
    let top = (0..m).map(|i| g[i * m + i].re).fold(0.0, f64::max);
    if top <= 0.0 {
        return 0;
    }
    let mut rank = 0;
    let mut active: Vec<usize> = (0..m).collect();
    let mut l_cols: Vec<Vec<C64>> = Vec::new();
    let mut diag: Vec<f64> = (0..m).map(|i| g[i * m + i].re).collect();
    while let Some((pos, &p)) = active.iter().enumerate().max_by(|a, b| diag[*a.1].total_cmp(&diag[*b.1])) {
        if diag[p] <= 1e-9 * top {
            break;
        }
        let pivot = diag[p].sqrt();
        let mut col = vec![ZERO; m];
        for &i in &active {
            let mut v = g[i * m + p];
            for prev in &l_cols {
                v -= prev[i] * prev[p].conj();
            }
            col[i] = v / pivot;
        }
        for &i in &active {
            diag[i] -= col[i].norm_sqr();
        }
        active.swap_remove(pos);
        l_cols.push(col);
        rank += 1;
    }
    rank
}

/// Effects `M_1..M_m` spanning `l`: with the Hermitian orthonormal basis `A_1 ∝ I`,
/// `A_2..A_m` rescaled to operator norm `scale`, `M_k = (I + A_k)/(2(m−1))` for
/// `k ≥ 2` and `M_1 = I − Σ_{k≥2} M_k`. The scale is halved (up to 20 times) until
/// positivity, completeness and the span all check out.
pub fn positive_basis(l: &OperatorSystem) -> Result<Observable> {
    positive_basis_with_scale(l, DEFAULT_SCALE)
}

/// [`positive_basis`] with an explicit starting scale in `(0, 1]`.
pub fn positive_basis_with_scale(l: &OperatorSystem, scale: f64) -> Result<Observable> {
    if !l.is_valid() || !l.has_hermitian_basis() {
        return Err(Error::InvalidInput(String::from("positive_basis needs a validated operator system")));
    }
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::InvalidInput(alloc::format!("scale {scale} outside (0, 1]")));
    }
    let n = l.ambient_dim();
    let m = l.dim();
    let identity = CMatrix::identity(n);
    if m == 1 {
        return Observable::new(vec![identity]);
    }
    let ortho: Vec<CMatrix> = l.ortho_basis().iter().map(|a| a.to_dense()).collect();
    let norms: Vec<f64> = ortho[1..].iter().map(CMatrix::operator_norm).collect();
    let c = 2.0 * (m - 1) as f64;
    let mut s = scale;
    let mut last_failure = String::new();
    for _ in 0..=MAX_SHRINKS {
        let mut effects = Vec::with_capacity(m);
        let mut closure = identity.clone();
        for (a, norm) in ortho[1..].iter().zip(&norms) {
            let mut e = identity.clone();
            e.axpy(C64::new(s / norm, 0.0), a);
            let e = e.scale_real(1.0 / c);
            closure.axpy(-ONE, &e);
            effects.push(e);
        }
        effects.insert(0, closure);
        match invariant_failure(n, &effects) {
            None => {
                let span_dim = span_rank(&effects);
                if span_dim == m {
                    return Ok(Observable { ambient_dim: n, effects, span_dim });
                }
                last_failure = alloc::format!("effects span {span_dim} dimensions, expected {m}");
            }
            Some(f) => last_failure = f,
        }
        s *= 0.5;
    }
    Err(Error::ConstructionFailed(last_failure))
}

/// All Kronecker products `M_{k_1} ⊗ … ⊗ M_{k_r}`, first factor slowest.
pub fn tensor_observables(observables: &[Observable]) -> Result<Observable> {
    let (first, rest) = observables
        .split_first()
        .ok_or_else(|| Error::InvalidInput(String::from("nothing to tensor")))?;
    let mut effects = first.effects.clone();
    let mut n = first.ambient_dim;
    let mut span_dim = first.span_dim;
    for o in rest {
        effects = effects.iter().flat_map(|a| o.effects.iter().map(move |b| kron(a, b))).collect();
        n *= o.ambient_dim;
        span_dim *= o.span_dim;
    }
    // positivity and completeness are inherited; only the sum is rechecked
    let residual = sum_residual(n, &effects);
    if residual > EFFECT_TOL * observables.len() as f64 {
        return Err(Error::ConstructionFailed(alloc::format!("tensor effects sum residual {residual:e}")));
    }
    Ok(Observable { ambient_dim: n, effects, span_dim })
}

/// Result of [`indistinguishable_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct Indistinguishability {
    /// Knill–Laflamme check of the subspace against the effects themselves.
    pub kl: KLReport,
    /// Largest total-variation distance between the outcome distribution of a sampled
    /// state in the subspace and that of its first basis vector.
    pub tv_spread: f64,
    pub samples: usize,
    pub seed: u64,
    pub pass: bool,
}

/// Default number of sampled states.
pub const DEFAULT_SAMPLES: usize = 1000;

/// Checks that every state of `subspace` yields the same outcome distribution,
/// with [`DEFAULT_SAMPLES`] sampled states and seed 0 for the spread statistic.
pub fn indistinguishable_check(obs: &Observable, subspace: &CodeCandidate, tol: f64) -> Result<Indistinguishability> {
    indistinguishable_check_with(obs, subspace, tol, DEFAULT_SAMPLES, 0)
}

/// [`indistinguishable_check`] with explicit sampling parameters.
pub fn indistinguishable_check_with(
    obs: &Observable,
    subspace: &CodeCandidate,
    tol: f64,
    samples: usize,
    seed: u64,
) -> Result<Indistinguishability> {
    if subspace.ambient_dim() != obs.ambient_dim {
        return Err(Error::DimensionMismatch { expected: obs.ambient_dim, found: subspace.ambient_dim() });
    }
    let vs = subspace.vectors();
    let d = vs.len();
    // compressions C_k[l][j] = <φ_l|M_k|φ_j>
    let compressed: Vec<Vec<C64>> = obs
        .effects
        .iter()
        .map(|m| {
            let applied: Vec<CVector> = vs.iter().map(|v| m.mat_vec(v)).collect();
            (0..d * d).map(|idx| vs[idx / d].dot(&applied[idx % d])).collect()
        })
        .collect();
    let mut max_offdiag = 0.0f64;
    let mut max_diag_spread = 0.0f64;
    for c in &compressed {
        for l in 0..d {
            for j in 0..d {
                if l != j {
                    max_offdiag = max_offdiag.max(c[l * d + j].norm());
                } else if l > 0 {
                    max_diag_spread = max_diag_spread.max((c[l * d + l] - c[0]).norm());
                }
            }
        }
    }
    let kl = KLReport { max_offdiag, max_diag_spread, tol, pass: max_offdiag < tol && max_diag_spread < tol };

    let reference: Vec<f64> = compressed.iter().map(|c| c[0].re).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tv_spread = 0.0f64;
    for _ in 0..samples {
        let coeffs: Vec<C64> = (0..d)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re, im)
            })
            .collect();
        let norm2: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        let tv: f64 = compressed
            .iter()
            .zip(&reference)
            .map(|(c, r)| {
                let mut p = ZERO;
                for l in 0..d {
                    for j in 0..d {
                        p += coeffs[l].conj() * c[l * d + j] * coeffs[j];
                    }
                }
                (p.re / norm2 - r).abs()
            })
            .sum::<f64>()
            * 0.5;
        tv_spread = tv_spread.max(tv);
    }
    Ok(Indistinguishability { pass: kl.pass, kl, tv_spread, samples, seed })
}
