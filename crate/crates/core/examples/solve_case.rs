//! Solve one network three ways and compare.
//!
//! ```text
//! cargo run --example solve_case -- path/to/case.json
//! ```
//!
//! Without an argument a small meshed network is used.

use kuramoto_series::graph::{inf_norm, GraphOperators, WeightedGraph};
use kuramoto_series::io::parse_case;
use kuramoto_series::series::{evaluate_terms, test_t0};
use kuramoto_series::solvers::{check_equivalence, recover_angles, solve_fixed_point, solve_newton, DEFAULT_TOL};
use nalgebra::DVector;

fn main() -> kuramoto_series::Result<()> {
    let (g, omega) = match std::env::args().nth(1) {
        Some(path) => {
            let case = parse_case(path, true)?;
            (case.graph, case.omega)
        }
        None => (
            WeightedGraph::new(5, [(0, 1, 1.0), (1, 2, 1.5), (2, 3, 1.0), (3, 4, 2.0), (0, 4, 1.0), (1, 3, 0.5)])?,
            DVector::from_vec(vec![0.4, -0.2, 0.3, -0.1, -0.4]),
        ),
    };
    let ops = GraphOperators::new(&g)?;
    let t0 = test_t0(&ops, &omega)?;
    println!(
        "T0: |eta| = {:.4}, h(|P_cyc|) = {:.4}, passes = {}, gamma* = {:?}",
        t0.eta_norm, t0.h_of_pcyc, t0.passes_t0, t0.gamma_star
    );

    let newton = solve_newton(&ops, &omega, None, DEFAULT_TOL, 100)?;
    println!("newton: {} iterations, residual {:.2e}", newton.iterations, newton.residual_inf);

    let eta = ops.eta(&omega)?;
    let fp = solve_fixed_point(&ops.projections, &eta, DEFAULT_TOL, 10_000)?;
    let x_fp = recover_angles(&ops, &fp.solution)?;
    println!("fixed point: {} iterations, |x - x_newton| = {:.2e}", fp.iterations, inf_norm(&(&x_fp - &newton.solution)));

    let se = evaluate_terms(&ops.projections, &eta, 13)?;
    for k in [1, 3, 5, 7, 9, 11, 13] {
        let err = inf_norm(&(se.truncated_solution(k)? - &fp.solution));
        println!("series order {k:2}: |phi_k - phi*| = {err:.2e}");
    }

    let eq = check_equivalence(&ops, &omega, &newton.solution)?;
    println!("{eq:#?}");
    println!("x* = {:.6}", newton.solution.transpose());
    Ok(())
}
