//! Sufficient and approximate synchronization tests at one operating point.

use kuramoto_series::graph::{GraphOperators, WeightedGraph};
use kuramoto_series::series::evaluate_terms;
use kuramoto_series::sync_tests::{test_atk, test_t0, test_t1, test_t2};
use nalgebra::DVector;

fn main() -> kuramoto_series::Result<()> {
    let g = WeightedGraph::new(
        6,
        [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0), (0, 5, 1.0), (0, 3, 0.8)],
    )?;
    let ops = GraphOperators::new(&g)?;
    let omega = DVector::from_vec(vec![0.5, -0.3, 0.2, -0.4, 0.3, -0.3]);
    for r in [test_t0(&ops, &omega)?, test_t1(&ops, &omega)?, test_t2(&ops, &omega)?] {
        println!("{}: lhs {:.4} rhs {:.4} passed {} certified angle {:?}", r.test_id, r.lhs, r.rhs, r.passed, r.certified_gamma);
    }
    let se = evaluate_terms(&ops.projections, &ops.eta(&omega)?, 7)?;
    for k in [1, 3, 5, 7] {
        let r = test_atk(&se, k, std::f64::consts::FRAC_PI_2)?;
        println!("{}: lhs {:.4} rhs {:.4} passed {}", r.test_id, r.lhs, r.rhs, r.passed);
    }
    Ok(())
}
