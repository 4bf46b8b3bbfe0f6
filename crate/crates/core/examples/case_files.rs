//! Generate a random case, write it, read it back and solve it.

use kuramoto_series::graph::GraphOperators;
use kuramoto_series::io::{parse_case, write_case, CaseFile};
use kuramoto_series::random::{gen_frequencies, gen_graph, FrequencyDist, FrequencySpec, GraphModel, ModelSpec};
use kuramoto_series::solvers::{solve_newton, DEFAULT_TOL};
use kuramoto_series::sync_tests::CouplingConvention;

fn main() -> kuramoto_series::Result<()> {
    let g = gen_graph(&ModelSpec::new(GraphModel::Ws, 12, 0.2, 3))?;
    let omega = gen_frequencies(&FrequencySpec { dist: FrequencyDist::Uniform { a: 0.3 }, n: 12, seed: 4 });
    let dir = std::env::temp_dir().join("ksync-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("ws12.json");
    write_case(&path, &CaseFile::from_parts(&g, &omega, CouplingConvention::ScaledInjection))?;
    println!("wrote {}", path.display());

    let case = parse_case(&path, false)?;
    assert_eq!(case.graph, g);
    let ops = GraphOperators::new(&case.graph)?;
    let sol = solve_newton(&ops, &case.omega, None, DEFAULT_TOL, 100)?;
    println!("solved in {} Newton steps, residual {:.1e}", sol.iterations, sol.residual_inf);
    Ok(())
}
