/*
Copyright 2026 The nc-admm Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/


mod common;

use nalgebra::{DMatrix, DVector};
use nc_admm::linalg::{gram_extreme_eigenvalues, LinearMap};
use nc_admm::metrics::stationarity;
use nc_admm::problems::{
    build_graph_guided_a, build_graph_guided_a_weighted, build_multitask_constraints, build_overlap_a, nuclear_norm, prox_l1,
    prox_nuclear, CompositeProblem, SmoothLoss,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Central differences of `loss.value(·, batch)`.
fn fd_grad(loss: &SmoothLoss, x: &DVector<f64>, batch: &[usize]) -> DVector<f64> {
    let h = 1e-6;
    DVector::from_iterator(
        x.len(),
        (0..x.len()).map(|j| {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            (loss.value(&xp, batch).unwrap() - loss.value(&xm, batch).unwrap()) / (2.0 * h)
        }),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sigmoid_gradient_matches_finite_differences(seed in 0u64..1000, scale in 0.1f64..3.0) {
        let p = common::tiny_graph(7, 4, seed);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x = DVector::from_fn(4, |_, _| scale * rng.random_range(-1.0..1.0));
        let batch = [0, 3, 3, 6];
        let g = p.loss.grad(&x, &batch).unwrap();
        let fd = fd_grad(&p.loss, &x, &batch);
        prop_assert!((&g - &fd).norm() <= 1e-6 * (1.0 + g.norm()), "{} vs {}", g, fd);
    }

    #[test]
    fn multitask_gradient_matches_finite_differences(seed in 0u64..1000) {
        let ds = common::random_multiclass(9, 3, 3, seed);
        let p = CompositeProblem::multitask(&ds, 1e-2, 1e-3, 1.0, 1.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x = DVector::from_fn(p.d(), |_, _| rng.random_range(-1.0..1.0));
        let batch: Vec<usize> = (0..9).collect();
        let g = p.loss.grad(&x, &batch).unwrap();
        let fd = fd_grad(&p.loss, &x, &batch);
        prop_assert!((&g - &fd).norm() <= 1e-6 * (1.0 + g.norm()));
    }

    #[test]
    fn component_mean_is_full_value(seed in 0u64..1000) {
        let p = common::tiny_graph(6, 3, seed);
        let x = DVector::from_element(3, 0.3);
        let mean: f64 = (0..6).map(|i| p.loss.component_value(i, &x).unwrap()).sum::<f64>() / 6.0;
        prop_assert!((mean - p.loss.full_value(&x).unwrap()).abs() < 1e-14);
        let gmean = (0..6).fold(DVector::zeros(3), |acc, i| acc + p.loss.component_grad(i, &x).unwrap()) / 6.0;
        prop_assert!((gmean - p.loss.full_grad(&x).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn prox_l1_is_soft_threshold(v in proptest::collection::vec(-5.0f64..5.0, 1..20), t in 0.0f64..3.0) {
        let v = DVector::from_vec(v);
        let y = prox_l1(&v, t).unwrap();
        for (yi, vi) in y.iter().zip(v.iter()) {
            let expect = vi.signum() * (vi.abs() - t).max(0.0);
            prop_assert!((yi - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn graph_guided_gram_bounds(d in 2usize..12, density in 0.0f64..0.6, seed in 0u64..100) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut support = DMatrix::from_element(d, d, false);
        for i in 0..d {
            for j in i + 1..d {
                if rng.random::<f64>() < density {
                    support[(i, j)] = true;
                    support[(j, i)] = true;
                }
            }
        }
        let cs = build_graph_guided_a(&support).unwrap();
        // The identity block keeps AᵀA ⪰ I.
        prop_assert!(cs.phi_min_a >= 1.0 - 1e-9);
        let (lo, hi) = gram_extreme_eigenvalues(&cs.a).unwrap();
        prop_assert!((lo - cs.phi_min_a).abs() < 1e-9 && (hi - cs.norm_ata).abs() < 1e-9 * hi);
        let x = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        let dense = cs.a.to_dense();
        prop_assert!((cs.a.apply(&x) - &dense * &x).norm() < 1e-12);
        prop_assert!((cs.a.gram_apply(&x) - dense.transpose() * (&dense * &x)).norm() < 1e-12);
    }
}

/// Brute-force check that `y` beats random candidates on `obj`.
fn beats_candidates(obj: impl Fn(&DVector<f64>) -> f64, y: &DVector<f64>, center: &DVector<f64>, rng: &mut ChaCha12Rng) -> bool {
    let best = obj(y);
    (0..1000).all(|k| {
        let spread = if k % 2 == 0 { 1e-3 } else { 1.0 };
        let cand = DVector::from_fn(center.len(), |i, _| y[i] + spread * rng.random_range(-1.0..1.0));
        obj(&cand) >= best - 1e-12
    })
}

#[test]
fn prox_l1_beats_random_candidates() {
    let mut rng = ChaCha12Rng::seed_from_u64(1);
    for _ in 0..100 {
        let v = DVector::from_fn(6, |_, _| rng.random_range(-3.0..3.0));
        let t = rng.random_range(0.0..2.0);
        let y = prox_l1(&v, t).unwrap();
        let obj = |z: &DVector<f64>| t * z.lp_norm(1) + 0.5 * (z - &v).norm_squared();
        assert!(beats_candidates(obj, &y, &v, &mut rng));
    }
}

#[test]
fn prox_nuclear_beats_random_candidates() {
    let mut rng = ChaCha12Rng::seed_from_u64(2);
    for _ in 0..100 {
        let v = DMatrix::from_fn(3, 4, |_, _| rng.random_range(-3.0..3.0));
        let t = rng.random_range(0.0..2.0);
        let y = prox_nuclear(&v, t).unwrap();
        let obj = |z: &DVector<f64>| {
            let m = DMatrix::from_column_slice(3, 4, z.as_slice());
            t * nuclear_norm(&m).unwrap() + 0.5 * (&m - &v).norm_squared()
        };
        let yv = DVector::from_column_slice(y.as_slice());
        let vv = DVector::from_column_slice(v.as_slice());
        assert!(beats_candidates(obj, &yv, &vv, &mut rng));
    }
}

#[test]
fn prox_nuclear_shrinks_singular_values() {
    let v = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 0.5]));
    let y = prox_nuclear(&v, 0.75).unwrap();
    let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![2.25, 0.25, 0.0]));
    assert!((y - expect).norm() < 1e-12);
}

#[test]
fn overlap_and_multitask_constraints() {
    let cs = build_overlap_a(5, 3).unwrap();
    assert_eq!((cs.d(), cs.p(), cs.q()), (5, 15, 15));
    assert!((cs.phi_min_a - 3.0).abs() < 1e-12 && (cs.norm_ata - 3.0).abs() < 1e-12);
    assert!(cs.is_b_neg_identity() && cs.has_zero_offset());
    let x = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    let ax = cs.a.apply(&x);
    assert_eq!(cs.residual(&x, &ax).norm(), 0.0);
    assert_eq!(cs.a.apply_transpose(&ax), x * 3.0);

    let (cs, g) = build_multitask_constraints(3, 4, 0.1, 0.2, 2.0).unwrap();
    assert_eq!((cs.d(), cs.p()), (12, 24));
    assert_eq!(g.blocks().len(), 2);
    assert!((g.blocks()[0].weight - 0.2).abs() < 1e-15);
    assert!(build_overlap_a(0, 2).is_err());
}

#[test]
fn weighted_edges_scale_gram() {
    let s = common::chain_support(6);
    let unit = build_graph_guided_a(&s).unwrap();
    let light = build_graph_guided_a_weighted(&s, 0.05).unwrap();
    assert!(light.norm_ata < unit.norm_ata);
    assert!((light.phi_min_a - 1.0).abs() < 1e-9);
    assert!(build_graph_guided_a_weighted(&s, -1.0).is_err());
    assert!(matches!(light.a, LinearMap::Dense(_) | LinearMap::Sparse(_)));
}

#[test]
fn stationarity_oracle_at_the_origin() {
    // A = I, B = −I: at x = y = 0 with λ = ∇f(0), feasibility and dual
    // residuals vanish, and −λ lies in ν∂‖·‖₁(0) once ν ≥ ‖∇f(0)‖∞.
    let ds = common::random_binary(20, 5, 3);
    let base = CompositeProblem::overlap(&ds, 1, 1.0).unwrap();
    let x = DVector::zeros(5);
    let lambda = base.loss.full_grad(&x).unwrap();
    let nu = 2.0 * lambda.amax();
    let p = CompositeProblem::overlap(&ds, 1, nu).unwrap();
    let r = stationarity(&p, &x, &DVector::zeros(5), &lambda).unwrap();
    assert!(r.feasibility_sq <= 1e-10 && r.dual_sq <= 1e-10 && r.subgrad_dist_sq <= 1e-10, "{r:?}");

    // Shrinking ν below ‖λ‖∞ leaves a positive subgradient distance.
    let p = CompositeProblem::overlap(&ds, 1, 0.25 * lambda.amax()).unwrap();
    assert!(stationarity(&p, &x, &DVector::zeros(5), &lambda).unwrap().subgrad_dist_sq > 1e-6);
}

#[test]
fn objective_and_eliminated_objective_agree_on_feasible_points() {
    let p = common::tiny_graph(10, 4, 5);
    let x = DVector::from_vec(vec![0.5, -1.0, 0.25, 2.0]);
    let y = p.constraints.a.apply(&x);
    let direct = p.objective(&x, &y).unwrap();
    assert!((direct - p.eliminated_objective(&x).unwrap().unwrap()).abs() < 1e-14);
    let lam = DVector::from_element(p.q(), 3.0);
    assert!((p.augmented_lagrangian(&x, &y, &lam, 7.0).unwrap() - direct).abs() < 1e-14);
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let p = common::tiny_graph(5, 3, 1);
    assert!(p.loss.full_grad(&DVector::zeros(4)).is_err());
    assert!(p.loss.grad(&DVector::zeros(3), &[5]).is_err());
    let ds = common::random_binary(5, 3, 1);
    assert!(CompositeProblem::graph_guided(&ds, &common::chain_support(4), 0.05, 1e-3).is_err());
}

#[test]
fn multitask_error_rate_and_value_are_finite() {
    let p = CompositeProblem::multitask(&common::random_multiclass(12, 3, 4, 9), 1e-2, 1e-3, 1.0, 1.0).unwrap();
    let x = DVector::zeros(p.d());
    let err = p.loss.error_rate(&x).unwrap();
    assert!((0.0..=1.0).contains(&err));
    assert!(p.loss.full_value(&x).unwrap().is_finite());
}
