//! Multi-start Riemannian gradient descent over orthonormal frames.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::objective::Evaluator;
use crate::klcodes::CodeCandidate;
use crate::matcore::{orthonormalize, CVector, C64, ZERO};
use crate::opsys::OperatorSystem;
use crate::{Error, Result};

/// Default target objective value.
pub const DEFAULT_SEARCH_TOL: f64 = 1e-18;

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;
const MAX_STEP: f64 = 1e6;

/// Stopping rules of one restart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    /// Stop once the objective drops below this.
    pub tol: f64,
    pub max_iters: usize,
    /// Stop when the relative decrease over this many iterates is below `min_rel_decrease`.
    pub window: usize,
    pub min_rel_decrease: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_SEARCH_TOL, max_iters: 5000, window: 50, min_rel_decrease: 1e-14 }
    }
}

impl SearchOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Result of a single restart.
#[derive(Clone, Debug, PartialEq)]
pub struct RestartOutcome {
    pub index: usize,
    pub objective: f64,
    pub iterations: usize,
    pub frame: Vec<CVector>,
}

/// Best-of-restarts summary of a search.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityReport {
    pub objective_min: f64,
    pub certificate: CodeCandidate,
    pub restarts: usize,
    pub iterations_total: usize,
    pub seed: u64,
    pub tol: f64,
    pub converged_at_tol: bool,
    /// Index of the restart that produced the certificate.
    pub best_restart: usize,
    /// Final objective of every restart, by restart index.
    pub restart_floors: Vec<f64>,
}

/// Starting frame of restart `restart`: complex Gaussian entries from a ChaCha8
/// stream keyed by `(seed, restart)`, then Gram–Schmidt.
pub fn initial_frame(n: usize, d: usize, seed: u64, restart: usize) -> Vec<CVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    loop {
        let raw: Vec<CVector> = (0..d)
            .map(|_| {
                CVector::new(
                    (0..n)
                        .map(|_| {
                            let re: f64 = StandardNormal.sample(&mut rng);
                            let im: f64 = StandardNormal.sample(&mut rng);
                            C64::new(re, im)
                        })
                        .collect(),
                )
            })
            .collect();
        let frame = orthonormalize(&raw, 1e-8);
        if frame.len() == d {
            return frame;
        }
    }
}

fn check_problem(l: &OperatorSystem, d: usize) -> Result<()> {
    if !l.is_valid() || !l.has_hermitian_basis() {
        return Err(Error::InvalidInput("search needs a validated operator system".into()));
    }
    if d < 2 || d > l.ambient_dim() {
        return Err(Error::InvalidInput(alloc::format!(
            "code dimension {d} outside 2..={}",
            l.ambient_dim()
        )));
    }
    Ok(())
}

/// Gram–Schmidt retraction of a frame stored as `d` rows of length `n`.
fn retract(frame: &mut [Vec<C64>]) {
    for l in 0..frame.len() {
        let (done, rest) = frame.split_at_mut(l);
        let v = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let c = q.iter().zip(v.iter()).fold(ZERO, |acc, (x, y)| acc + x.conj() * y);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi /= norm;
        }
    }
}

/// Riemannian gradient `ξ = G − V·herm(V^* G)` of the embedded Stiefel manifold,
/// with `G` twice the Wirtinger gradient.
fn riemannian_gradient(frame: &[Vec<C64>], wirtinger: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let d = frame.len();
    let g: Vec<Vec<C64>> = wirtinger.iter().map(|row| row.iter().map(|z| z * 2.0).collect()).collect();
    // s[l][m] = <v_l, g_m>
    let s: Vec<Vec<C64>> = (0..d)
        .map(|l| (0..d).map(|m| frame[l].iter().zip(&g[m]).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)).collect())
        .collect();
    let mut xi = g.clone();
    for m in 0..d {
        for l in 0..d {
            let h = (s[l][m] + s[m][l].conj()) * 0.5;
            if h != ZERO {
                for (x, v) in xi[m].iter_mut().zip(&frame[l]) {
                    *x -= h * v;
                }
            }
        }
    }
    xi
}

fn real_inner(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.re * q.re + p.im * q.im).sum::<f64>()).sum()
}

/// Runs restart `restart` of a `d`-vector search.
pub fn run_restart(
    l: &OperatorSystem,
    d: usize,
    seed: u64,
    restart: usize,
    opts: &SearchOptions,
) -> Result<RestartOutcome> {
    check_problem(l, d)?;
    let n = l.ambient_dim();
    let mut eval = Evaluator::new(l.ortho_basis(), n, d);
    let start = initial_frame(n, d, seed, restart);
    let mut frame: Vec<Vec<C64>> = start.into_iter().map(CVector::into_vec).collect();

    let value_grad = |eval: &mut Evaluator, frame: &[Vec<C64>]| {
        let slices: Vec<&[C64]> = frame.iter().map(Vec::as_slice).collect();
        let mut grad = vec![vec![ZERO; n]; d];
        let f = eval.value_and_gradient(&slices, &mut grad);
        (f, riemannian_gradient(frame, &grad))
    };

    let (mut f, mut xi) = value_grad(&mut eval, &frame);
    let mut history: Vec<f64> = vec![f];
    let mut step = {
        let g = real_inner(&xi, &xi).sqrt();
        if g > 0.0 { (1.0 / g).min(1.0) } else { 1.0 }
    };
    let mut iterations = 0;
    let mut trial = frame.clone();

    while iterations < opts.max_iters && f >= opts.tol {
        if history.len() > opts.window {
            let old = history[history.len() - 1 - opts.window];
            if old - f <= opts.min_rel_decrease * old {
                break;
            }
        }
        let g2 = real_inner(&xi, &xi);
        if g2 == 0.0 {
            break;
        }
        let mut t = step.clamp(MIN_STEP, MAX_STEP);
        let accepted = loop {
            for (row, (v, x)) in trial.iter_mut().zip(frame.iter().zip(&xi)) {
                for (r, (vi, xii)) in row.iter_mut().zip(v.iter().zip(x)) {
                    *r = vi - xii * t;
                }
            }
            retract(&mut trial);
            let slices: Vec<&[C64]> = trial.iter().map(Vec::as_slice).collect();
            let ft = eval.value(&slices);
            if ft <= f - ARMIJO_C * t * g2 {
                break true;
            }
            t *= 0.5;
            if t < MIN_STEP {
                break false;
            }
        };
        if !accepted {
            break;
        }
        let (f_new, xi_new) = value_grad(&mut eval, &trial);
        // Barzilai–Borwein step from the ambient differences, alternating BB1/BB2
        let s: Vec<Vec<C64>> = trial.iter().zip(&frame).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
        let y: Vec<Vec<C64>> = xi_new.iter().zip(&xi).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
        let sy = real_inner(&s, &y);
        step = if sy > 0.0 {
            if iterations % 2 == 0 { real_inner(&s, &s) / sy } else { sy / real_inner(&y, &y) }
        } else {
            2.0 * t
        };
        core::mem::swap(&mut frame, &mut trial);
        f = f_new;
        xi = xi_new;
        history.push(f);
        iterations += 1;
    }

    let frame: Vec<CVector> = frame.into_iter().map(CVector::new).collect();
    let slices: Vec<&[C64]> = frame.iter().map(CVector::as_slice).collect();
    let objective = eval.value(&slices);
    Ok(RestartOutcome { index: restart, objective, iterations, frame })
}

/// Combines restart outcomes: the minimum objective wins, ties go to the lowest
/// restart index. The result does not depend on the order of `outcomes`.
pub fn merge(mut outcomes: Vec<RestartOutcome>, seed: u64, tol: f64) -> Result<FeasibilityReport> {
    outcomes.sort_by_key(|o| o.index);
    let best = outcomes
        .iter()
        .enumerate()
        .fold(None::<usize>, |best, (k, o)| match best {
            Some(b) if outcomes[b].objective <= o.objective => Some(b),
            _ => Some(k),
        })
        .ok_or_else(|| Error::InvalidInput("no restarts to merge".into()))?;
    let winner = &outcomes[best];
    Ok(FeasibilityReport {
        objective_min: winner.objective,
        certificate: CodeCandidate::new(winner.frame.clone())?,
        restarts: outcomes.len(),
        iterations_total: outcomes.iter().map(|o| o.iterations).sum(),
        seed,
        tol,
        converged_at_tol: winner.objective < tol,
        best_restart: winner.index,
        restart_floors: outcomes.iter().map(|o| o.objective).collect(),
    })
}

/// Sequential multi-start search for a `d`-dimensional code.
pub fn search_code(l: &OperatorSystem, d: usize, restarts: usize, seed: u64, tol: f64) -> Result<FeasibilityReport> {
    if restarts == 0 {
        return Err(Error::InvalidInput("at least one restart is required".into()));
    }
    let opts = SearchOptions::with_tol(tol);
    let outcomes = (0..restarts).map(|r| run_restart(l, d, seed, r, &opts)).collect::<Result<Vec<_>>>()?;
    merge(outcomes, seed, tol)
}

/// Sequential multi-start search for a pair `(φ, ψ)`.
pub fn search_pair(l: &OperatorSystem, restarts: usize, seed: u64, tol: f64) -> Result<FeasibilityReport> {
    search_code(l, 2, restarts, seed, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codesearch::objective_frame;
    use crate::opsys::n_theta;
    use crate::Angle;

    #[test]
    fn initial_frames_are_orthonormal_and_seeded() {
        let f = initial_frame(6, 3, 7, 2);
        for (i, u) in f.iter().enumerate() {
            for (j, v) in f.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((u.dot(v).norm() - expected).abs() < 1e-12);
            }
        }
        assert_eq!(f, initial_frame(6, 3, 7, 2));
        assert_ne!(f, initial_frame(6, 3, 7, 3));
        assert_ne!(f, initial_frame(6, 3, 8, 2));
    }

    #[test]
    fn pi_system_is_solved() {
        let r = search_pair(&n_theta(Angle::PI), 4, 1, DEFAULT_SEARCH_TOL).unwrap();
        assert!(r.converged_at_tol, "{r:?}");
        let again = objective_frame(&n_theta(Angle::PI), r.certificate.vectors()).unwrap();
        assert!((again - r.objective_min).abs() < 1e-12);
    }

    #[test]
    fn merge_is_order_independent_and_prefers_low_index() {
        let frame = initial_frame(4, 2, 0, 0);
        let mk = |index, objective| RestartOutcome { index, objective, iterations: 1, frame: frame.clone() };
        let a = merge(vec![mk(2, 0.5), mk(0, 0.1), mk(1, 0.1)], 3, 1e-18).unwrap();
        let b = merge(vec![mk(1, 0.1), mk(2, 0.5), mk(0, 0.1)], 3, 1e-18).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.best_restart, 0);
        assert_eq!(a.restart_floors, vec![0.1, 0.1, 0.5]);
        assert!(merge(vec![], 0, 1e-18).is_err());
    }

    #[test]
    fn rejects_invalid_problems() {
        let l = n_theta(Angle::PI);
        assert!(search_code(&l, 1, 1, 0, 1e-18).is_err());
        assert!(search_code(&l, 5, 1, 0, 1e-18).is_err());
        assert!(search_pair(&l, 0, 0, 1e-18).is_err());
    }
}
