use std::sync::OnceLock;

use nalgebra::DVector;

use super::scalar::{gamma_star, h};
use super::symbolic::{compile, symbolic_terms, CompiledTerm, MAX_ORDER};
use crate::error::{Error, Result};
use crate::graph::{inf_norm, EdgeVector, GraphOperators, NodeVector, ProjectionPair};

fn compiled_table() -> &'static [CompiledTerm] {
    static TABLE: OnceLock<Vec<CompiledTerm>> = OnceLock::new();
    TABLE.get_or_init(|| {
        symbolic_terms(MAX_ORDER)
            .expect("MAX_ORDER is odd")
            .iter()
            .map(compile)
            .collect()
    })
}

/// Odd-order terms `A_1(eta), A_3(eta), ...` of the inverse series, with
/// their running partial sums.
#[derive(Debug, Clone)]
pub struct SeriesExpansion {
    pub eta: EdgeVector,
    pub max_order: usize,
    /// `terms[i]` is `A_{2i+1}(eta)`.
    pub terms: Vec<EdgeVector>,
    /// `partial_sums[i]` is `terms[0] + ... + terms[i]`.
    pub partial_sums: Vec<EdgeVector>,
}

/// Evaluates the series terms through `max_order`.
pub fn evaluate_terms(pp: &ProjectionPair, eta: &EdgeVector, max_order: usize) -> Result<SeriesExpansion> {
    let mut se = SeriesExpansion {
        eta: eta.clone(),
        max_order: 1,
        terms: vec![eta.clone()],
        partial_sums: vec![eta.clone()],
    };
    se.extend(pp, max_order)?;
    Ok(se)
}

impl SeriesExpansion {
    /// Computes further terms, reusing the ones already stored.
    pub fn extend(&mut self, pp: &ProjectionPair, max_order: usize) -> Result<()> {
        if max_order % 2 == 0 {
            return Err(Error::InvalidOrder(max_order));
        }
        if max_order > MAX_ORDER {
            return Err(Error::OrderTooLarge { requested: max_order, cap: MAX_ORDER });
        }
        let table = compiled_table();
        let m = self.eta.len();
        for idx in self.terms.len()..=(max_order - 1) / 2 {
            let mut acc = DVector::zeros(m);
            for (coeff, powers) in &table[idx].summands {
                let mut prod = DVector::from_element(m, *coeff);
                for &(part, exp) in powers {
                    let factor = &self.terms[(part - 1) / 2];
                    prod.zip_apply(factor, |p, f| *p *= f.powi(exp as i32));
                }
                acc += prod;
            }
            let term = -(&pp.p_cyc * acc);
            let sum = &self.partial_sums[idx - 1] + &term;
            self.terms.push(term);
            self.partial_sums.push(sum);
        }
        self.max_order = self.max_order.max(max_order);
        Ok(())
    }

    /// Partial sum through odd order `k`, the order-`k` approximation of
    /// `sin(B^T x*)`.
    pub fn truncated_solution(&self, k: usize) -> Result<&EdgeVector> {
        if k % 2 == 0 {
            return Err(Error::InvalidOrder(k));
        }
        if k > self.max_order {
            return Err(Error::OrderNotComputed { requested: k, available: self.max_order });
        }
        Ok(&self.partial_sums[(k - 1) / 2])
    }

    /// Partial sum through order `k` of the series at `scale * eta`, using
    /// homogeneity of each term.
    pub fn scaled_truncated_solution(&self, k: usize, scale: f64) -> Result<EdgeVector> {
        self.truncated_solution(k)?;
        let mut out = DVector::zeros(self.eta.len());
        for (i, t) in self.terms.iter().take((k + 1) / 2).enumerate() {
            out.axpy(scale.powi(2 * i as i32 + 1), t, 1.0);
        }
        Ok(out)
    }
}

/// Outcome of the series convergence test `‖eta‖∞ < h(‖P_cyc‖∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub eta_norm: f64,
    pub pcyc_norm: f64,
    pub h_of_pcyc: f64,
    pub passes_t0: bool,
    /// Certified radius, present iff the test passes.
    pub gamma_star: Option<f64>,
}

impl ConvergenceReport {
    pub fn from_norms(eta_norm: f64, pcyc_norm: f64) -> Result<Self> {
        let h_of_pcyc = h(pcyc_norm)?;
        let passes_t0 = eta_norm < h_of_pcyc;
        let gamma_star = if passes_t0 { Some(gamma_star(eta_norm)?) } else { None };
        Ok(ConvergenceReport { eta_norm, pcyc_norm, h_of_pcyc, passes_t0, gamma_star })
    }

    /// `h(‖P_cyc‖∞) / ‖eta‖∞`; infinite for `eta = 0`.
    pub fn margin_ratio(&self) -> f64 {
        self.h_of_pcyc / self.eta_norm
    }
}

/// Test T0 for frequencies `omega` on a precomputed graph.
pub fn test_t0(ops: &GraphOperators, omega: &NodeVector) -> Result<ConvergenceReport> {
    let eta = ops.eta(omega)?;
    ConvergenceReport::from_norms(inf_norm(&eta), ops.projections.p_cyc_norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;
    use approx::assert_relative_eq;

    fn triangle_ops() -> GraphOperators {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        GraphOperators::new(&g).unwrap()
    }

    #[test]
    fn acyclic_terms_vanish() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.5)]).unwrap();
        let ops = GraphOperators::new(&g).unwrap();
        let eta = DVector::from_vec(vec![0.3, -0.6, 0.2]);
        let se = evaluate_terms(&ops.projections, &eta, 9).unwrap();
        assert_eq!(se.terms.len(), 5);
        assert_eq!(se.terms[0], eta);
        for t in &se.terms[1..] {
            assert!(inf_norm(t) < 1e-12);
        }
        for k in [1, 3, 9] {
            assert_relative_eq!(se.truncated_solution(k).unwrap(), &eta, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_eta_gives_zero_terms() {
        let ops = triangle_ops();
        let se = evaluate_terms(&ops.projections, &DVector::zeros(3), 7).unwrap();
        assert!(se.terms.iter().all(|t| inf_norm(t) == 0.0));
    }

    #[test]
    fn third_order_matches_direct_formula() {
        let ops = triangle_ops();
        let omega = DVector::from_vec(vec![2.0, -1.0, -1.0]) / 3.0;
        let eta = ops.eta(&omega).unwrap();
        let se = evaluate_terms(&ops.projections, &eta, 3).unwrap();
        let direct = -(&ops.projections.p_cyc * eta.map(|v| v.powi(3))) / 6.0;
        assert_relative_eq!(se.terms[1], direct, epsilon = 1e-15);
    }

    #[test]
    fn extend_reuses_lower_terms() {
        let ops = triangle_ops();
        let eta = DVector::from_vec(vec![0.1, 0.2, -0.05]);
        let full = evaluate_terms(&ops.projections, &eta, 11).unwrap();
        let mut grown = evaluate_terms(&ops.projections, &eta, 3).unwrap();
        grown.extend(&ops.projections, 11).unwrap();
        assert_eq!(full.terms, grown.terms);
        assert_eq!(
            grown.truncated_solution(13),
            Err(Error::OrderNotComputed { requested: 13, available: 11 })
        );
        assert_relative_eq!(
            full.scaled_truncated_solution(7, 1.0).unwrap(),
            full.truncated_solution(7).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn t0_reports() {
        let path = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let ops = GraphOperators::new(&path).unwrap();
        let r = test_t0(&ops, &DVector::from_vec(vec![0.5, -0.5])).unwrap();
        assert!(r.passes_t0);
        assert_relative_eq!(r.h_of_pcyc, 1.0, epsilon = 1e-9);
        assert_relative_eq!(r.eta_norm, 0.5, epsilon = 1e-12);
        assert!(r.gamma_star.unwrap() < std::f64::consts::FRAC_PI_2);

        let zero = test_t0(&ops, &DVector::zeros(2)).unwrap();
        assert!(zero.passes_t0);
        assert_eq!(zero.eta_norm, 0.0);

        let ops = triangle_ops();
        // eta = (1, 1, 0) for omega = (2, -1, -1); scale to ‖eta‖∞ = 1.5
        let omega = DVector::from_vec(vec![3.0, -1.5, -1.5]);
        let r = test_t0(&ops, &omega).unwrap();
        assert_relative_eq!(r.eta_norm, 1.5, epsilon = 1e-12);
        assert!(!r.passes_t0);
        assert_eq!(r.gamma_star, None);
    }
}
