//! Cut and cycle projections on a triangle with one weak edge.
//!
//! As the weak edge's weight goes to zero, almost all of the cycle
//! projection's mass lands on that edge.

use kuramoto_series::graph::{projections, WeightedGraph};

fn main() -> kuramoto_series::Result<()> {
    for eps in [0.1, 0.01, 0.001] {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, eps)])?;
        let pp = projections(&g)?;
        let (ones, zeros) = pp.eigenvalue_counts(1e-9);
        println!("eps = {eps}");
        println!("  P_cyc = {:.6}", pp.p_cyc);
        println!("  |P_cut|inf = {:.6}  |P_cyc|inf = {:.6}", pp.p_cut_norm, pp.p_cyc_norm);
        println!("  P_cut eigenvalues: {ones} ones, {zeros} zeros");
    }
    Ok(())
}
