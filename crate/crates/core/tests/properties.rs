mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zekit_core::codesearch::{
    parallel_triple, al2_case, al2_instance, al3_factor, al3_instance, gauge_invariant_objective, rank_check_instance,
    objective, objective_gradient, p_values, parallel_rank_check, solve_zero_pair, Al2Case, ParallelVerdict,
};
use zekit_core::klcodes::{
    hull_distance, pairing_value, pi_certificate, product_code, verify_code, CodeCandidate, DEFAULT_KL_TOL,
};
use zekit_core::matcore::kron_all;
use zekit_core::observables::{indistinguishable_check_with, positive_basis};
use zekit_core::opsys::{n_theta, n_theta_tensor, OperatorSystem};
use zekit_core::{Angle, CMatrix, CVector, C64};

fn angle() -> impl Strategy<Value = Angle> {
    (-23i64..=24, prop_oneof![Just(1i64), Just(2), Just(3), Just(4), Just(6), Just(12), Just(24)])
        .prop_map(|(p, q)| Angle::new(p, q))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `F` from projections onto the span of the canonical basis:
/// `‖P(|φ><ψ|)‖² + ‖P(|φ><φ| − |ψ><ψ|)‖²`.
fn projector_objective(basis: &[CMatrix], phi: &CVector, psi: &CVector) -> f64 {
    let cross = CMatrix::outer(phi, psi);
    let mut diff = CMatrix::outer(phi, phi);
    diff.axpy(C64::new(-1.0, 0.0), &CMatrix::outer(psi, psi));
    projected_norm_sqr(basis, &cross) + projected_norm_sqr(basis, &diff)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn objective_matches_projector_oracle(theta in angle(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let (phi, psi) = random_pair(&mut r, 4);
        let f = objective(&n_theta(theta), &phi, &psi).unwrap();
        let oracle = projector_objective(&n_theta_canonical(theta.gamma()), &phi, &psi);
        prop_assert!((f - oracle).abs() < 1e-12, "{f} vs {oracle}");
    }

    #[test]
    fn objective_matches_projector_oracle_on_pairs(t1 in angle(), t2 in angle(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let (phi, psi) = random_pair(&mut r, 16);
        let f = objective(&n_theta_tensor(&[t1, t2]).unwrap(), &phi, &psi).unwrap();
        let basis = tensor_canonical(&[n_theta_canonical(t1.gamma()), n_theta_canonical(t2.gamma())]);
        let oracle = projector_objective(&basis, &phi, &psi);
        prop_assert!((f - oracle).abs() < 1e-12, "{f} vs {oracle}");
    }

    #[test]
    fn invariant_part_is_rotation_invariant(theta in angle(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = n_theta(theta);
        let (phi, psi) = random_pair(&mut r, 4);
        let (p, q) = (gaussian(&mut r), gaussian(&mut r));
        let norm = (p.norm_sqr() + q.norm_sqr()).sqrt();
        let (p, q) = (p / norm, q / norm);
        let rotated = CodeCandidate::new(vec![phi.clone(), psi.clone()]).unwrap().rotate_pair(p, q).unwrap();
        let (phi2, psi2) = (&rotated.vectors()[0], &rotated.vectors()[1]);
        let g0 = gauge_invariant_objective(&l, &phi, &psi).unwrap();
        let g1 = gauge_invariant_objective(&l, phi2, psi2).unwrap();
        prop_assert!((g0 - g1).abs() < 1e-12, "{g0} vs {g1}");
        for (f, g) in [(objective(&l, &phi, &psi).unwrap(), g0), (objective(&l, phi2, psi2).unwrap(), g1)] {
            prop_assert!(g <= f + 1e-12 && f <= 4.0 * g + 1e-12);
        }
    }

    #[test]
    fn rotating_a_code_keeps_it_a_code(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (p, q) = (gaussian(&mut r), gaussian(&mut r));
        let norm = (p.norm_sqr() + q.norm_sqr()).sqrt();
        let code = pi_certificate().rotate_pair(p / norm, q / norm).unwrap();
        let l = n_theta(Angle::PI);
        prop_assert!(objective(&l, &code.vectors()[0], &code.vectors()[1]).unwrap() < 1e-24);
        prop_assert!(verify_code(&l, &code, 1e-12).unwrap().pass);
    }

    #[test]
    fn objective_is_basis_independent(theta in angle(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = n_theta(theta);
        // random real invertible mixture of the canonical basis
        let canon = n_theta_canonical(theta.gamma());
        let mixed: Vec<CMatrix> = (0..8)
            .map(|_| {
                let mut m = CMatrix::zeros(4, 4);
                for b in &canon {
                    m.axpy(C64::new(r.sample(rand_distr::StandardNormal), 0.0), b);
                }
                m
            })
            .collect();
        let l2 = OperatorSystem::new(4, mixed).unwrap();
        prop_assert_eq!(l2.dim(), 8);
        let (phi, psi) = random_pair(&mut r, 4);
        let (f1, f2) = (objective(&l, &phi, &psi).unwrap(), objective(&l2, &phi, &psi).unwrap());
        prop_assert!((f1 - f2).abs() < 1e-12, "{f1} vs {f2}");
    }

    #[test]
    fn gradient_matches_finite_differences_along_the_retraction(theta in angle(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = n_theta_tensor(&[theta, Angle::new(1, 5)]).unwrap();
        let (phi, psi) = random_pair(&mut r, 16);
        let (_, g) = objective_gradient(&l, &[phi.clone(), psi.clone()]).unwrap();
        // tangent direction Δ − V·herm(V*Δ)
        let (d0, d1) = (random_vector(&mut r, 16), random_vector(&mut r, 16));
        let v = [phi.clone(), psi.clone()];
        let d = [d0, d1];
        let xi: Vec<CVector> = (0..2)
            .map(|i| {
                let mut out = d[i].clone();
                for j in 0..2 {
                    let h = (v[j].dot(&d[i]) + d[j].dot(&v[i])) * 0.5;
                    out = out.add_scaled(-h, &v[j]);
                }
                out
            })
            .collect();
        let retract = |t: f64| {
            let a = phi.add_scaled(C64::new(t, 0.0), &xi[0]).normalized().unwrap();
            let b = psi.add_scaled(C64::new(t, 0.0), &xi[1]);
            let b = b.add_scaled(-a.dot(&b), &a).normalized().unwrap();
            objective(&l, &a, &b).unwrap()
        };
        let h = 1e-6;
        let fd = (retract(h) - retract(-h)) / (2.0 * h);
        let analytic: f64 = (0..2).map(|i| 2.0 * g[i].dot(&xi[i]).re).sum();
        prop_assert!((fd - analytic).abs() <= 1e-5 * analytic.abs().max(1e-3), "{fd} vs {analytic}");
    }

    #[test]
    fn pairing_value_matches_direct_inner_products(
        thetas in prop::collection::vec(angle(), 1..=3),
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let code = product_code(thetas.len()).unwrap();
        let mut gs = Vec::new();
        let factors: Vec<CMatrix> = thetas
            .iter()
            .map(|t| {
                let coords: [C64; 8] = core::array::from_fn(|_| gaussian(&mut r));
                gs.push(coords[6]);
                n_theta_element(t.gamma(), &coords)
            })
            .collect();
        let m = kron_all(&factors).unwrap();
        let direct = m.sandwich(&code.vectors()[1], &code.vectors()[0]);
        let closed = pairing_value(&thetas, &gs).unwrap();
        prop_assert!((direct - closed).norm() < 1e-12 * (1.0 + direct.norm()), "{direct} vs {closed}");
    }

    #[test]
    fn hull_distance_matches_support_function_and_sampling(t1 in angle(), t2 in angle(), conj2: bool, seed in any::<u64>()) {
        let g1 = t1.gamma();
        let g2 = if conj2 { t2.gamma().conj() } else { t2.gamma() };
        let pts = [C64::new(1.0, 0.0), g2, g1, g1 * g2];
        let d = hull_distance(t1, t2, conj2);
        // distance to a convex set = max over directions of the smallest support
        // value; grid search, then ternary refinement around the best direction
        let g = |a: f64| {
            let u = C64::from_polar(1.0, a);
            pts.iter().map(|p| (u.conj() * p).re).fold(f64::INFINITY, f64::min)
        };
        let steps = 4096;
        let delta = std::f64::consts::TAU / steps as f64;
        let best = (0..steps).map(|k| k as f64 * delta).max_by(|a, b| g(*a).total_cmp(&g(*b))).unwrap();
        let (mut lo, mut hi) = (best - delta, best + delta);
        for _ in 0..200 {
            let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
            if g(m1) < g(m2) { lo = m1 } else { hi = m2 }
        }
        let support = g(0.5 * (lo + hi)).max(0.0);
        prop_assert!((d - support).abs() < 1e-9, "{d} vs {support}");
        // numerical range of diag(1, γ₂, γ₁, γ₁γ₂) never comes closer than d
        let mut r = rng(seed);
        for _ in 0..200 {
            let y = random_unit(&mut r, 4);
            let z: C64 = (0..4).map(|i| pts[i] * y[i].norm_sqr()).sum();
            prop_assert!(z.norm() >= d - 1e-12);
        }
    }

    #[test]
    fn observables_satisfy_their_invariants(theta in angle()) {
        let o = positive_basis(&n_theta(theta)).unwrap();
        prop_assert_eq!(o.len(), 8);
        prop_assert_eq!(o.span_dim(), 8);
        prop_assert!(o.min_eigenvalue().unwrap() >= -1e-10);
        prop_assert!(o.sum_residual() < 1e-10);
    }
}

/// Random `z_right` with the p-values in `pattern` forced to vanish: the p-values
/// are antilinear in `z_right`, so the pattern cuts out a linear subspace.
fn patterned_right(r: &mut ChaCha8Rng, t1: Angle, t2: Angle, conj2: bool, pattern: &[usize]) -> CVector {
    let coeff = CMatrix::from_fn(pattern.len().max(1), 4, |k, j| {
        if pattern.is_empty() {
            C64::new(0.0, 0.0)
        } else {
            p_values(t1, t2, &CVector::basis(4, j), conj2).unwrap()[pattern[k]]
        }
    });
    let kernel = svd_nullspace(&coeff, 1e-12);
    let w = kernel.iter().fold(CVector::zeros(4), |acc, v| acc.add_scaled(gaussian(r), v));
    CVector::new(w.as_slice().iter().map(|z| z.conj()).collect())
}

/// `W` with rows `<z_right|U_k ⊗ V_l`, `U₁ = diag(1, γ₁)`, `V₁ = diag(1, γ₂)`,
/// `U₂ = V₂` the swap.
fn bilinear_rows(t1: Angle, t2: Angle, z: &CVector, conj2: bool) -> CMatrix {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let g2 = if conj2 { t2.gamma().conj() } else { t2.gamma() };
    let swap = CMatrix::new(2, 2, vec![zero, one, one, zero]).unwrap();
    let u = [CMatrix::diag(&[one, t1.gamma()]), swap.clone()];
    let v = [CMatrix::diag(&[one, g2]), swap];
    let zt = to_na(&CMatrix::from_columns(std::slice::from_ref(z))).adjoint();
    let mut rows = Vec::new();
    for uk in &u {
        for vl in &v {
            rows.push(&zt * to_na(&zekit_core::matcore::kron(uk, vl)));
        }
    }
    CMatrix::from_fn(4, 4, |k, j| rows[k][(0, j)])
}

#[test]
fn zero_pair_solver_matches_svd_nullspace() {
    let grid = [Angle::new(1, 6), Angle::new(-1, 3), Angle::new(1, 2), Angle::new(3, 4), Angle::PI];
    let patterns: [&[usize]; 8] = [&[], &[0], &[3], &[0, 1], &[2, 3], &[0, 3], &[1, 2], &[0, 1, 2]];
    let mut r = rng(7);
    for &t1 in &grid {
        for &t2 in &grid {
            for conj2 in [false, true] {
                for k in 0..100 {
                    let pattern = patterns[k % patterns.len()];
                    let z = patterned_right(&mut r, t1, t2, conj2, pattern);
                    let res = solve_zero_pair(t1, t2, &z, conj2).unwrap();
                    let oracle = svd_nullspace(&bilinear_rows(t1, t2, &z, conj2), 1e-9);
                    let sine = max_principal_sine(&res.nullspace, &oracle, 4);
                    assert!(sine < 1e-8, "{t1} {t2} {conj2} pattern {pattern:?}: sine {sine}");
                    assert_eq!(res.vanishing.iter().filter(|&&v| v).count(), pattern.len());
                    for sol in &res.solutions {
                        let (left, right) = sol.materialize();
                        assert!(right.max_abs_diff(&z) < 1e-9 * (1.0 + z.norm()));
                        let w = bilinear_rows(t1, t2, &right, conj2);
                        assert!(w.mat_vec(&left).norm() < 1e-10 * (1.0 + left.norm() * right.norm()));
                    }
                }
            }
        }
    }
}

#[test]
fn oracle_generators_satisfy_their_conclusions() {
    let mut r = rng(11);
    for _ in 0..50 {
        let (xs, ys) = rank_check_instance(&mut r, None);
        let v = parallel_rank_check(&xs, &ys, 1e-9).unwrap();
        assert!(v.holds() && v.rank_x <= 2 && v.rank_y <= 2, "{v:?}");
        let (xs, ys) = rank_check_instance(&mut r, Some(0));
        assert!(parallel_rank_check(&xs, &ys, 1e-9).unwrap().holds());
        for case in [Al2Case::XParallel, Al2Case::YParallel, Al2Case::Crossed, Al2Case::Straight] {
            let (xs, ys) = al2_instance(&mut r, case);
            assert!(al2_case(&xs, &ys, 1e-9).unwrap().is_some());
        }
        let gamma = C64::from_polar(1.0, r.random_range(-3.0..3.0));
        for branch in [true, false] {
            let (a, c, d, x, y) = al3_instance(&mut r, gamma, branch);
            assert!(al3_factor(&a, &c, &d, &x, &y, gamma, 1e-8).unwrap().holds());
        }
    }
    // |a><x| + |b><y| + |c><z| = 0 with a ∥ b ∥ c
    let a = random_vector(&mut r, 3);
    let (s, t) = (gaussian(&mut r), gaussian(&mut r));
    let (x, y) = (random_vector(&mut r, 4), random_vector(&mut r, 4));
    let b = a.scale(s);
    let c = a.scale(t);
    let z = x.scale(-C64::new(1.0, 0.0) / t.conj()).add_scaled(-s.conj() / t.conj(), &y);
    let v = parallel_triple([&a, &b, &c], [&x, &y, &z], 1e-9).unwrap();
    assert!(matches!(v, ParallelVerdict::LeftParallel | ParallelVerdict::BothParallel), "{v:?}");
}

#[test]
fn al2_classifier_recovers_the_crossed_case() {
    let mut r = rng(3);
    for _ in 0..50 {
        let (xs, ys) = al2_instance(&mut r, Al2Case::Crossed);
        assert_eq!(al2_case(&xs, &ys, 1e-9).unwrap(), Some(Al2Case::Crossed));
    }
}

#[test]
fn indistinguishability_agrees_with_code_verification() {
    let mut r = rng(5);
    let thetas = [Angle::new(1, 6), Angle::new(-1, 3), Angle::new(1, 2), Angle::new(5, 6), Angle::PI, Angle::ZERO];
    let mut passes = 0;
    for k in 0..100 {
        let theta = thetas[k % thetas.len()];
        let obs = positive_basis(&n_theta(theta)).unwrap();
        let code = match k % 4 {
            0 => {
                let (p, q) = random_pair(&mut r, 4);
                CodeCandidate::new(vec![p, q]).unwrap()
            }
            1 => CodeCandidate::new(vec![random_unit(&mut r, 4)]).unwrap(),
            _ => {
                let (p, q) = (gaussian(&mut r), gaussian(&mut r));
                let n = (p.norm_sqr() + q.norm_sqr()).sqrt();
                pi_certificate().rotate_pair(p / n, q / n).unwrap()
            }
        };
        let v = indistinguishable_check_with(&obs, &code, DEFAULT_KL_TOL, 200, k as u64).unwrap();
        let direct = verify_code(&obs.span().unwrap(), &code, DEFAULT_KL_TOL).unwrap();
        assert_eq!(v.pass, direct.pass, "instance {k}");
        if v.pass {
            passes += 1;
            assert!(v.tv_spread < 10.0 * DEFAULT_KL_TOL, "{}", v.tv_spread);
        }
    }
    assert!(passes >= 25, "only {passes} passing instances");
}

#[test]
fn tensor_observable_span_has_full_rank() {
    use zekit_core::observables::tensor_observables;
    let t = Angle::new(1, 3);
    let single = positive_basis(&n_theta(t)).unwrap();
    let obs = tensor_observables(&[single.clone(), single.clone(), single]).unwrap();
    assert_eq!(obs.len(), 512);
    assert!(obs.sum_residual() < 1e-10);
    // rank of the vectorizations through the 512 × 512 Gram matrix
    let n = obs.effects().len();
    let gram = nalgebra::DMatrix::from_fn(n, n, |i, j| obs.effects()[i].hs_inner(&obs.effects()[j]));
    let eig = gram.symmetric_eigenvalues();
    let top = eig.iter().copied().fold(0.0, f64::max);
    let rank = eig.iter().filter(|&&e| e > 1e-10 * top).count();
    assert_eq!(rank, 512);
    assert_eq!(obs.span_dim(), rank);
}
