//! Truncation error of the series against a Newton reference, for a light
//! and a heavy load on the same random graph.

use kuramoto_series::experiments::error_curve;
use kuramoto_series::graph::{inf_norm, GraphOperators};
use kuramoto_series::random::{gen_frequencies, gen_graph, FrequencyDist, FrequencySpec, GraphModel, ModelSpec};
use kuramoto_series::series::h;

fn main() -> kuramoto_series::Result<()> {
    let g = gen_graph(&ModelSpec::new(GraphModel::Er, 15, 0.4, 7))?;
    let ops = GraphOperators::new(&g)?;
    let omega = gen_frequencies(&FrequencySpec { dist: FrequencyDist::Uniform { a: 1.0 }, n: 15, seed: 8 });
    let unit = &omega / inf_norm(&ops.eta(&omega)?);
    let threshold = h(ops.projections.p_cyc_norm)?;
    for load in [0.3, 0.9] {
        let curve = error_curve(&ops, &(&unit * (load * threshold)), 21)?;
        println!("|eta| = {load} x threshold (reference residual {:.1e})", curve.reference_residual);
        for (k, s) in curve.orders.iter().zip(&curve.s_k) {
            println!("  order {k:2}: S = {s:.3e}");
        }
    }
    Ok(())
}
