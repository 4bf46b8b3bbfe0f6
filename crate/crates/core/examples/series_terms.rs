//! Symbolic series terms and their numeric evaluation.
//!
//! ```text
//! cargo run --example series_terms -- 9
//! ```

use kuramoto_series::graph::{inf_norm, GraphOperators, WeightedGraph};
use kuramoto_series::series::{evaluate_terms, format_csv, format_latex, format_text, symbolic_terms};
use nalgebra::DVector;

fn main() -> kuramoto_series::Result<()> {
    let order: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(7);
    let terms = symbolic_terms(order)?;
    print!("{}", format_text(&terms));
    println!();
    print!("{}", format_latex(&terms));
    println!();
    print!("{}", format_csv(&terms));

    let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0), (0, 2, 0.5)])?;
    let ops = GraphOperators::new(&g)?;
    let omega = DVector::from_vec(vec![0.3, -0.1, 0.2, -0.4]);
    let se = evaluate_terms(&ops.projections, &ops.eta(&omega)?, order)?;
    println!("\nterm norms on a 4-cycle with a chord:");
    for (i, t) in se.terms.iter().enumerate() {
        println!("  |A{}|inf = {:.3e}", 2 * i + 1, inf_norm(t));
    }
    Ok(())
}
