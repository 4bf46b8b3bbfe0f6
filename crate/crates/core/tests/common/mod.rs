#![allow(dead_code)]

use kuramoto_series::graph::{inf_norm, GraphOperators, NodeVector, WeightedGraph};
use kuramoto_series::random::{derive_seed, gen_frequencies, gen_graph, rng, FrequencyDist, FrequencySpec, GraphModel, ModelSpec, WeightDist};
use kuramoto_series::series::h;
use kuramoto_series::EdgeVector;
use nalgebra::DVector;
use rand::Rng;

pub fn er_graph(n: usize, p: f64, seed: u64, w_max: Option<f64>) -> WeightedGraph {
    let mut spec = ModelSpec::new(GraphModel::Er, n, p, seed);
    if let Some(w_max) = w_max {
        spec.weight_dist = WeightDist::Uniform { w_max };
    }
    gen_graph(&spec).unwrap()
}

/// Random recursive tree with weights in [0.5, 2).
pub fn random_tree(n: usize, seed: u64) -> WeightedGraph {
    let mut r = rng(seed);
    let edges: Vec<_> = (1..n).map(|k| (r.gen_range(0..k), k, r.gen_range(0.5..2.0))).collect();
    WeightedGraph::new(n, edges).unwrap()
}

pub fn uniform_omega(n: usize, seed: u64) -> NodeVector {
    gen_frequencies(&FrequencySpec { dist: FrequencyDist::Uniform { a: 1.0 }, n, seed })
}

/// Frequencies rescaled so that `‖eta‖∞ = load · h(‖P_cyc‖∞)`.
pub fn scaled_omega(ops: &GraphOperators, omega: &NodeVector, load: f64) -> NodeVector {
    let target = load * h(ops.projections.p_cyc_norm).unwrap();
    omega * (target / inf_norm(&ops.eta(omega).unwrap()))
}

/// A cyclic ER instance whose frequencies pass T0 with the given load.
pub fn t0_instance(n: usize, p: f64, load: f64, seed: u64) -> (GraphOperators, NodeVector) {
    let mut k = 0;
    loop {
        let g = er_graph(n, p, derive_seed(seed, k), Some(2.0));
        k += 1;
        if g.is_acyclic() {
            continue;
        }
        let ops = GraphOperators::new(&g).unwrap();
        let omega = scaled_omega(&ops, &uniform_omega(n, derive_seed(seed, 1000 + k)), load);
        return (ops, omega);
    }
}

pub fn random_edge_vector(m: usize, scale: f64, seed: u64) -> EdgeVector {
    let mut r = rng(seed);
    DVector::from_fn(m, |_, _| r.gen_range(-scale..scale))
}

/// A1..A7 written out term by term, with the A5 coefficient on `A3 ∘ eta²`
/// left as a parameter.
pub fn hand_coded_terms(p_cyc: &nalgebra::DMatrix<f64>, eta: &EdgeVector, a5_mixed: f64) -> [EdgeVector; 4] {
    let pw = |v: &EdgeVector, k: i32| v.map(|x| x.powi(k));
    let a1 = eta.clone();
    let a3 = -(p_cyc * (pw(eta, 3) / 6.0));
    let a5 = -(p_cyc * (pw(eta, 5) * (3.0 / 40.0) + a3.component_mul(&pw(eta, 2)) * a5_mixed));
    let a7 = -(p_cyc
        * (pw(eta, 7) * (5.0 / 112.0)
            + a3.component_mul(&pw(eta, 4)) * (3.0 / 8.0)
            + a5.component_mul(&pw(eta, 2)) * 0.5
            + a3.component_mul(&a3).component_mul(eta) * 0.5));
    [a1, a3, a5, a7]
}
