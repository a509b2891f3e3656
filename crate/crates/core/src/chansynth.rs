//! Channels in Kraus form and synthesis of a channel with a prescribed
//! noncommutative graph.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;


use crate::matcore::{herm_eig, herm_eig_min, kron, svd_rank, CMatrix, SparseMat, C64, DEFAULT_TOL, ONE};
use crate::opsys::{membership, stacked_vectorizations, OperatorSystem};
use crate::{Error, Result};

/// Default diagonal perturbation strength of the synthesis recipe.
pub const DEFAULT_ETA: f64 = 1.0 / 8.0;
/// Default off-diagonal strength of the synthesis recipe.
pub const DEFAULT_EPS: f64 = 1.0 / 16.0;
const MAX_HALVINGS: usize = 20;

/// A channel `ρ ↦ Σ_k V_k ρ V_k^*` with `V_k : C^{d_A} → C^{d_B}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    kraus: Vec<CMatrix>,
    d_a: usize,
    d_b: usize,
}

impl Channel {
    /// Checks shapes only; see [`Channel::tp_residual`] for trace preservation.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidInput(String::from("a channel needs at least one Kraus operator")))?;
        let (d_b, d_a) = (first.rows(), first.cols());
        for k in &kraus {
            if k.rows() != d_b || k.cols() != d_a {
                return Err(Error::DimensionMismatch { expected: d_b * d_a, found: k.rows() * k.cols() });
            }
        }
        Ok(Self { kraus, d_a, d_b })
    }

    pub fn identity(n: usize) -> Self {
        Self { kraus: alloc::vec![CMatrix::identity(n)], d_a: n, d_b: n }
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    /// Number of linearly independent Kraus operators.
    pub fn choi_rank(&self) -> usize {
        svd_rank(&stacked_vectorizations(&self.kraus), DEFAULT_TOL)
    }

    /// Largest entry of `Σ V_k^* V_k − I`.
    pub fn tp_residual(&self) -> f64 {
        let mut sum = CMatrix::zeros(self.d_a, self.d_a);
        for v in &self.kraus {
            sum.axpy(ONE, &(&v.adjoint() * v));
        }
        sum.max_abs_diff(&CMatrix::identity(self.d_a))
    }

    /// `Φ(ρ)`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.d_b, self.d_b);
        for v in &self.kraus {
            out.axpy(ONE, &(&(v * rho) * &v.adjoint()));
        }
        out
    }
}

/// Noncommutative graph: the span of all `V_k^* V_l`.
pub fn graph_of(phi: &Channel) -> OperatorSystem {
    let mut products = Vec::with_capacity(phi.kraus.len() * phi.kraus.len());
    for vk in &phi.kraus {
        let vk_star = vk.adjoint();
        for vl in &phi.kraus {
            products.push(&vk_star * vl);
        }
    }
    OperatorSystem::new(phi.d_a, products).expect("graph products are square")
}

/// Largest membership residual of either span in the other.
pub fn graph_distance(a: &OperatorSystem, b: &OperatorSystem) -> Result<f64> {
    let mut worst = 0.0f64;
    for (x, y) in [(a, b), (b, a)] {
        for m in x.basis() {
            worst = worst.max(membership(y, &m.to_dense())?);
        }
    }
    Ok(worst)
}

/// Block matrix `G = [B_ij]` whose blocks span `L`, before factorization.
fn gram_blocks(ortho: &[CMatrix], d_e: usize, eta: f64, eps: f64) -> Vec<Vec<CMatrix>> {
    let n = ortho[0].rows();
    let zero = CMatrix::zeros(n, n);
    let mut blocks = alloc::vec![alloc::vec![zero.clone(); d_e]; d_e];
    let identity_share = CMatrix::identity(n).scale_real(1.0 / d_e as f64);
    let mut next = 1;

    // diagonal: I/d_E + η H_i with Σ H_i = 0
    let mut h: Vec<CMatrix> = Vec::with_capacity(d_e);
    for _ in 0..d_e.saturating_sub(1) {
        if next < ortho.len() {
            h.push(ortho[next].clone());
            next += 1;
        } else {
            h.push(zero.clone());
        }
    }
    let mut last = zero.clone();
    for hi in &h {
        last.axpy(-ONE, hi);
    }
    h.push(last);
    for (i, hi) in h.iter().enumerate() {
        let mut b = identity_share.clone();
        b.axpy(C64::new(eta, 0.0), hi);
        blocks[i][i] = b;
    }

    // off-diagonal pairs (i<j) take up to two remaining elements: ε(A + iA')
    #[allow(clippy::needless_range_loop)]
    for i in 0..d_e {
        for j in i + 1..d_e {
            let mut b = zero.clone();
            if next < ortho.len() {
                b.axpy(C64::new(eps, 0.0), &ortho[next]);
                next += 1;
            }
            if next < ortho.len() {
                b.axpy(C64::new(0.0, eps), &ortho[next]);
                next += 1;
            }
            blocks[j][i] = b.adjoint();
            blocks[i][j] = b;
        }
    }
    blocks
}

fn assemble(blocks: &[Vec<CMatrix>]) -> CMatrix {
    let d_e = blocks.len();
    let n = blocks[0][0].rows();
    CMatrix::from_fn(d_e * n, d_e * n, |r, c| blocks[r / n][c / n][(r % n, c % n)])
}

/// Builds a channel with `d_A = L.ambient_dim` whose graph is `L`.
///
/// The recipe picks `d_E = ⌈√m⌉` for `m = dim L`, assembles a positive block matrix
/// `G = [B_ij]` with `B_ij ∈ L`, `B_ji = B_ij^*`, `Σ_i B_ii = I` and
/// `span{B_ij} = L`, factors `G = W^* W` and slices `W` into Kraus operators so that
/// `V_i^* V_j = B_ij`. `(eta, eps)` are halved (up to 20 times) until `G` is
/// positive semidefinite and the span check passes.
pub fn synthesize(l: &OperatorSystem, eta: f64, eps: f64) -> Result<Channel> {
    if !l.is_valid() || !l.has_hermitian_basis() {
        return Err(Error::InvalidInput(String::from("synthesis needs a validated operator system")));
    }
    if !(eta > 0.0 && eta <= 0.25 && eps > 0.0 && eps <= 0.25) {
        return Err(Error::InvalidInput(format!("eta and eps must lie in (0, 1/4], got {eta}, {eps}")));
    }
    let m = l.dim();
    let n = l.ambient_dim();
    let d_e = (1..).find(|d| d * d >= m).expect("finite dimension");
    let ortho: Vec<CMatrix> = l.ortho_basis().iter().map(SparseMat::to_dense).collect();

    let (mut eta, mut eps) = (eta, eps);
    let mut failure = String::new();
    for _ in 0..=MAX_HALVINGS {
        let blocks = gram_blocks(&ortho, d_e, eta, eps);
        let g = assemble(&blocks);
        let min_eig = herm_eig_min(&g)?;
        if min_eig < -1e-10 {
            failure = format!("block matrix not positive semidefinite (min eigenvalue {min_eig:e})");
            eta *= 0.5;
            eps *= 0.5;
            continue;
        }
        let channel = factor(&g, d_e, n)?;
        let graph = graph_of(&channel);
        let distance = graph_distance(&graph, l)?;
        if graph.dim() != m || distance >= 1e-8 {
            failure = format!("graph mismatch (dim {} vs {m}, residual {distance:e})", graph.dim());
            eta *= 0.5;
            eps *= 0.5;
            continue;
        }
        return Ok(channel);
    }
    Err(Error::SynthesisFailed(failure))
}

/// `G = W^* W` with `W = Λ^{1/2} U^*` restricted to the nonzero spectrum.
fn factor(g: &CMatrix, d_e: usize, n: usize) -> Result<Channel> {
    let eig = herm_eig(g)?;
    let top = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > 1e-12 * top.max(1.0)).collect();
    let rank = keep.len();
    let w = CMatrix::from_fn(rank, g.cols(), |r, c| {
        let k = keep[r];
        eig.vectors[(c, k)].conj() * eig.values[k].max(0.0).sqrt()
    });
    let kraus = (0..d_e).map(|i| w.column_block(i * n, n)).collect();
    Channel::new(kraus)
}

/// `Φ₁ ⊗ … ⊗ Φ_k`: Kraus operators are all Kronecker products.
pub fn tensor_channels(channels: &[Channel]) -> Result<Channel> {
    let (first, rest) = channels
        .split_first()
        .ok_or_else(|| Error::InvalidInput(String::from("empty tensor product")))?;
    let mut kraus = first.kraus.clone();
    for ch in rest {
        kraus = kraus.iter().flat_map(|a| ch.kraus.iter().map(move |b| kron(a, b))).collect();
    }
    Channel::new(kraus)
}
