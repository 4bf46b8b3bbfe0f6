//! Critical coupling by continuation and the coupling at which each test
//! stops passing, under both coupling conventions.

use kuramoto_series::graph::{GraphOperators, WeightedGraph};
use kuramoto_series::sync_tests::{critical_ratios, CouplingConvention, ScanConfig, TestId};
use nalgebra::DVector;

fn main() -> kuramoto_series::Result<()> {
    let g = WeightedGraph::new(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (0, 4, 1.0), (0, 2, 1.0)])?;
    let ops = GraphOperators::new(&g)?;
    let p = DVector::from_vec(vec![1.0, -1.0, 1.0, -1.0, 0.0]);
    let tests = [TestId::T0, TestId::T1, TestId::T2, TestId::At(1), TestId::At(3), TestId::At(5), TestId::At(7)];
    for convention in [CouplingConvention::ScaledInjection, CouplingConvention::UniformGain] {
        let cfg = ScanConfig { convention, ..ScanConfig::default() };
        let scan = critical_ratios(&ops, &p, &tests, std::f64::consts::FRAC_PI_2, &cfg)?;
        println!("{convention:?}: K_C = {:.4}", scan.k_c);
        for t in tests {
            match (scan.k_t(t), scan.ratio_kc_kt(t)) {
                (Some(k), Some(r)) => println!("  {t:>4}: K_T = {k:.4}  K_C/K_T = {r:.4}"),
                _ => println!("  {t:>4}: no threshold"),
            }
        }
    }
    Ok(())
}
