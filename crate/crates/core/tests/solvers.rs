mod common;

use common::*;
use kuramoto_series::graph::inf_norm;
use kuramoto_series::random::rng;
use kuramoto_series::series::evaluate_terms;
use kuramoto_series::solvers::*;
use nalgebra::DVector;
use rand::Rng;

#[test]
fn jacobian_matches_finite_differences() {
    let mut r = rng(11);
    for seed in 0..10 {
        let g = er_graph(8, 0.5, seed, Some(2.0));
        let omega = uniform_omega(8, seed);
        let mut x = DVector::from_fn(8, |_, _| r.gen_range(-1.0..1.0));
        let spread = inf_norm(&g.edge_differences(&x));
        if spread > 1.0 {
            x /= spread;
        }
        let v = DVector::from_fn(8, |_, _| r.gen_range(-1.0..1.0));
        let f = |y: &DVector<f64>| residual_node(&g, &omega, y);
        let step = 1e-6;
        let fd = (f(&(&x + &v * step)) - f(&(&x - &v * step))) / (2.0 * step);
        let jv = node_jacobian(&g, &x) * &v;
        assert!(inf_norm(&(&fd - &jv)) <= 1e-5 * inf_norm(&jv).max(1.0), "seed {seed}");
    }
}

#[test]
fn solvers_agree_on_t0_instances() {
    for seed in 0..50 {
        let n = 5 + (seed as usize % 16);
        let (ops, omega) = t0_instance(n, 0.5, 0.5, 900 + seed);
        let eta = ops.eta(&omega).unwrap();
        let newton = solve_newton(&ops, &omega, None, DEFAULT_TOL, NEWTON_MAX_ITER).unwrap();
        let phi_newton = ops.graph().edge_differences(&newton.solution).map(f64::sin);
        let fp = solve_fixed_point(&ops.projections, &eta, DEFAULT_TOL, FIXED_POINT_MAX_ITER).unwrap();
        let se = evaluate_terms(&ops.projections, &eta, 13).unwrap();
        let phi_series = se.truncated_solution(13).unwrap();
        assert!(inf_norm(&(&phi_newton - &fp.solution)) < 1e-6, "seed {seed}");
        assert!(inf_norm(&(&phi_newton - phi_series)) < 1e-6, "seed {seed}");
        assert!(fp.gamma_used.is_some());
    }
}

#[test]
fn fixed_point_increments_contract() {
    for seed in 0..20 {
        let (ops, omega) = t0_instance(10, 0.5, 0.5, 300 + seed);
        let pp = &ops.projections;
        let eta = ops.eta(&omega).unwrap();
        let mut phi = eta.clone();
        let mut last = f64::INFINITY;
        for _ in 0..30 {
            let step = residual_unconstrained(pp, &eta, &phi).unwrap();
            let size = inf_norm(&step);
            if size < 1e-15 {
                break;
            }
            assert!(size <= last, "seed {seed}: {size} > {last}");
            last = size;
            phi += step;
        }
    }
}

#[test]
fn transcriptions_agree_and_angles_recover() {
    for seed in 0..20 {
        let (ops, omega) = t0_instance(12, 0.4, 0.7, 500 + seed);
        let x = solve_newton(&ops, &omega, None, DEFAULT_TOL, NEWTON_MAX_ITER).unwrap().solution;
        let rep = check_equivalence(&ops, &omega, &x).unwrap();
        assert!(rep.max_mismatch < 1e-8, "{rep:?}");
        let phi = ops.graph().edge_differences(&x).map(f64::sin);
        let back = recover_angles(&ops, &phi).unwrap();
        assert!(inf_norm(&(back - &x)) < 1e-8);
    }
}

#[test]
fn overloaded_triangle_is_reported() {
    let g = kuramoto_series::WeightedGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
    let ops = kuramoto_series::GraphOperators::new(&g).unwrap();
    let omega = DVector::from_vec(vec![2.2, -1.1, -1.1]);
    assert!(solve_newton(&ops, &omega, None, DEFAULT_TOL, NEWTON_MAX_ITER).is_err());
    let eta = ops.eta(&omega).unwrap();
    assert!(solve_fixed_point(&ops.projections, &eta, DEFAULT_TOL, FIXED_POINT_MAX_ITER).is_err());
}
