//! Weighted graphs and the linear-algebra objects derived from them.
//!
//! Edges are stored in canonical order, sorted by `(i, j)` with `i < j`, and
//! this order fixes the row order of every [`EdgeVector`]. The incidence
//! matrix uses the orientation `+1` at the lower node index and `-1` at the
//! higher one.
//!
//! All matrices are dense. For a graph with `n` nodes and `m` edges:
//!
//! ```text
//! B      n x m incidence
//! L      = B diag(w) B^T
//! P_cut  = B^T L^+ B diag(w)     (oblique projection onto Img(B^T))
//! P_cyc  = I_m - P_cut           (projection onto Ker(B diag(w)))
//! eta    = B^T L^+ omega
//! ```

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type NodeVector = DVector<f64>;
pub type EdgeVector = DVector<f64>;

/// Relative cutoff below which Laplacian eigenvalues count as zero.
pub const PINV_RELATIVE_CUTOFF: f64 = 1e-10;
/// Relative tolerance on `|mean(omega)|`, scaled by `‖omega‖∞`.
pub const CENTERING_TOLERANCE: f64 = 1e-8;
/// Relative tolerance on `‖P_cyc v‖∞` for flow membership.
pub const FLOW_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Connected undirected graph with strictly positive edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Validates and canonicalizes an edge list.
    ///
    /// Endpoints may be given in either order; they are stored with `i < j`
    /// and the list is sorted. Fails on self-loops, duplicates, non-positive
    /// weights or a disconnected result.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewNodes(n));
        }
        let mut canon = Vec::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::NodeOutOfRange { i: a, j: b, n });
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonpositiveWeight { i: a, j: b, w });
            }
            canon.push(Edge { i: a.min(b), j: a.max(b), w });
        }
        canon.sort_by_key(|e| (e.i, e.j));
        for pair in canon.windows(2) {
            if pair[0].i == pair[1].i && pair[0].j == pair[1].j {
                return Err(Error::DuplicateEdge { i: pair[0].i, j: pair[0].j });
            }
        }
        let g = WeightedGraph { n, edges: canon };
        let components = g.component_count();
        if components != 1 {
            return Err(Error::DisconnectedGraph { components });
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weights(&self) -> EdgeVector {
        DVector::from_iterator(self.m(), self.edges.iter().map(|e| e.w))
    }

    /// True when `m = n - 1`, which for a connected graph means a tree.
    pub fn is_acyclic(&self) -> bool {
        self.m() + 1 == self.n
    }

    /// Copy of the graph with every weight replaced, in edge order.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), got: weights.len() });
        }
        WeightedGraph::new(
            self.n,
            self.edges.iter().zip(weights).map(|(e, &w)| (e.i, e.j, w)),
        )
    }

    fn component_count(&self) -> usize {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        let mut seen = vec![false; self.n];
        let mut components = 0;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        components
    }

    /// Incidence matrix with `+1` at the lower endpoint of each edge.
    pub fn incidence(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(self.n, self.m());
        for (k, e) in self.edges.iter().enumerate() {
            b[(e.i, k)] = 1.0;
            b[(e.j, k)] = -1.0;
        }
        b
    }

    /// Weighted Laplacian `B diag(w) B^T`, assembled edge by edge.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            l[(e.i, e.i)] += e.w;
            l[(e.j, e.j)] += e.w;
            l[(e.i, e.j)] -= e.w;
            l[(e.j, e.i)] -= e.w;
        }
        l
    }

    /// `B^T x`, the edge differences `x_i - x_j`.
    pub fn edge_differences(&self, x: &NodeVector) -> EdgeVector {
        DVector::from_iterator(self.m(), self.edges.iter().map(|e| x[e.i] - x[e.j]))
    }

    /// `B diag(w) v`, the weighted node injections of an edge vector.
    pub fn weighted_divergence(&self, v: &EdgeVector) -> NodeVector {
        let mut out = DVector::zeros(self.n);
        for (k, e) in self.edges.iter().enumerate() {
            let f = e.w * v[k];
            out[e.i] += f;
            out[e.j] -= f;
        }
        out
    }
}

/// Moore-Penrose pseudoinverse of a graph Laplacian.
///
/// Uses a symmetric eigendecomposition; eigenvalues below
/// `PINV_RELATIVE_CUTOFF * λ_max` are dropped. A connected graph must keep
/// exactly `n - 1` of them.
pub fn pseudoinverse(l: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = l.nrows();
    let eig = l.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let cutoff = PINV_RELATIVE_CUTOFF * lmax;
    let mut pinv = DMatrix::zeros(n, n);
    let mut rank = 0;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() <= cutoff {
            continue;
        }
        rank += 1;
        let v = eig.eigenvectors.column(k);
        pinv.ger(1.0 / lambda, &v, &v, 1.0);
    }
    if rank + 1 < n {
        return Err(Error::SingularBeyondKernel { rank, expected: n - 1 });
    }
    Ok(pinv)
}

/// Induced infinity norm (maximum absolute row sum).
pub fn inf_norm_matrix(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Cutset and cycle projections of a weighted graph.
#[derive(Debug, Clone)]
pub struct ProjectionPair {
    pub p_cut: DMatrix<f64>,
    pub p_cyc: DMatrix<f64>,
    pub p_cut_norm: f64,
    pub p_cyc_norm: f64,
    sqrt_w: EdgeVector,
}

impl ProjectionPair {
    fn from_cut(p_cut: DMatrix<f64>, weights: &EdgeVector) -> Self {
        let m = p_cut.nrows();
        let p_cyc = DMatrix::identity(m, m) - &p_cut;
        let p_cut_norm = inf_norm_matrix(&p_cut);
        let p_cyc_norm = inf_norm_matrix(&p_cyc);
        ProjectionPair { p_cut, p_cyc, p_cut_norm, p_cyc_norm, sqrt_w: weights.map(f64::sqrt) }
    }

    pub fn m(&self) -> usize {
        self.p_cut.nrows()
    }

    /// Number of eigenvalues of `P_cut` within `tol` of 1 and of 0.
    ///
    /// `P_cut` is similar to the symmetric `W^½ B^T L^+ B W^½`, whose
    /// spectrum is computed instead.
    pub fn eigenvalue_counts(&self, tol: f64) -> (usize, usize) {
        let s = DMatrix::from_fn(self.m(), self.m(), |r, c| self.sqrt_w[r] * self.p_cut[(r, c)] / self.sqrt_w[c]);
        let sym = (&s + s.transpose()) * 0.5;
        let eigs = sym.symmetric_eigenvalues();
        let near = |target: f64| eigs.iter().filter(|z| (*z - target).abs() < tol).count();
        (near(1.0), near(0.0))
    }

    /// `‖P_cyc v‖∞ ≤ FLOW_TOLERANCE * max(1, ‖v‖∞)`.
    pub fn is_flow(&self, v: &EdgeVector) -> bool {
        inf_norm(&(&self.p_cyc * v)) <= FLOW_TOLERANCE * inf_norm(v).max(1.0)
    }
}

/// Everything derived from a graph that the solvers and tests reuse.
///
/// Construction costs `O(n^3 + m^2 n)`; the cached matrices are immutable.
#[derive(Debug, Clone)]
pub struct GraphOperators {
    graph: WeightedGraph,
    pub incidence: DMatrix<f64>,
    pub laplacian: DMatrix<f64>,
    pub laplacian_pinv: DMatrix<f64>,
    /// `B^T L^+`, maps centered frequencies to `eta`.
    pub eta_map: DMatrix<f64>,
    pub projections: ProjectionPair,
}

impl GraphOperators {
    pub fn new(graph: &WeightedGraph) -> Result<Self> {
        let incidence = graph.incidence();
        let laplacian = graph.laplacian();
        let laplacian_pinv = pseudoinverse(&laplacian)?;
        let eta_map = incidence.transpose() * &laplacian_pinv;
        let mut bw = incidence.clone();
        for (k, e) in graph.edges().iter().enumerate() {
            bw.column_mut(k).scale_mut(e.w);
        }
        let p_cut = &eta_map * bw;
        Ok(GraphOperators {
            graph: graph.clone(),
            incidence,
            laplacian,
            laplacian_pinv,
            eta_map,
            projections: ProjectionPair::from_cut(p_cut, &graph.weights()),
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    /// `eta = B^T L^+ omega` for centered `omega`.
    pub fn eta(&self, omega: &NodeVector) -> Result<EdgeVector> {
        check_len(omega, self.graph.n())?;
        check_centered(omega)?;
        Ok(&self.eta_map * omega)
    }

    /// Second-smallest Laplacian eigenvalue (algebraic connectivity).
    pub fn lambda2(&self) -> f64 {
        let mut eigs: Vec<f64> = self.laplacian.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(f64::total_cmp);
        eigs[1]
    }
}

/// Builds the projections of `g` directly.
pub fn projections(g: &WeightedGraph) -> Result<ProjectionPair> {
    Ok(GraphOperators::new(g)?.projections)
}

/// `eta = B^T L^+ omega`.
pub fn eta(g: &WeightedGraph, omega: &NodeVector) -> Result<EdgeVector> {
    GraphOperators::new(g)?.eta(omega)
}

pub(crate) fn check_len(v: &DVector<f64>, expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: v.len() });
    }
    Ok(())
}

/// Accepts `omega` when `|mean| ≤ CENTERING_TOLERANCE * ‖omega‖∞`.
pub fn check_centered(omega: &NodeVector) -> Result<()> {
    let scale = inf_norm(omega);
    if scale == 0.0 {
        return Ok(());
    }
    let mean = omega.mean();
    let tol = CENTERING_TOLERANCE * scale;
    if mean.abs() > tol {
        return Err(Error::UncenteredFrequencies { mean, tol });
    }
    Ok(())
}

/// Subtracts the mean.
pub fn center(v: &NodeVector) -> NodeVector {
    let mean = v.mean();
    v.map(|x| x - mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn triangle() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn path2() -> WeightedGraph {
        WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap()
    }

    fn eps3(eps: f64) -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, eps)]).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]),
            Err(Error::DisconnectedGraph { components: 2 })
        );
        assert_eq!(WeightedGraph::new(2, [(1, 1, 1.0)]), Err(Error::SelfLoop(1)));
        assert!(matches!(
            WeightedGraph::new(2, [(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::DuplicateEdge { i: 0, j: 1 })
        ));
        assert!(matches!(
            WeightedGraph::new(2, [(0, 1, -1.0)]),
            Err(Error::NonpositiveWeight { .. })
        ));
        assert!(matches!(WeightedGraph::new(2, [(0, 5, 1.0)]), Err(Error::NodeOutOfRange { .. })));
    }

    #[test]
    fn canonical_order() {
        let g = WeightedGraph::new(3, [(2, 1, 3.0), (1, 0, 2.0)]).unwrap();
        let e: Vec<_> = g.edges().iter().map(|e| (e.i, e.j, e.w)).collect();
        assert_eq!(e, vec![(0, 1, 2.0), (1, 2, 3.0)]);
        assert_eq!(triangle().m(), 3);
        assert!(path2().is_acyclic());
        assert!(!triangle().is_acyclic());
    }

    #[test]
    fn incidence_convention() {
        assert_eq!(path2().incidence(), DMatrix::from_row_slice(2, 1, &[1.0, -1.0]));
        let b = triangle().incidence();
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(3, 3, &[
             1.0,  1.0,  0.0,
            -1.0,  0.0,  1.0,
             0.0, -1.0, -1.0,
        ]);
        assert_eq!(b, expected);
        for c in b.column_iter() {
            assert_eq!(c.sum(), 0.0);
        }
    }

    #[test]
    fn laplacian_fixtures() {
        assert_eq!(path2().laplacian(), DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        let k3 = DMatrix::identity(3, 3) * 2.0 - (DMatrix::from_element(3, 3, 1.0) - DMatrix::identity(3, 3));
        assert_eq!(triangle().laplacian(), k3);
        let e = 0.3;
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(3, 3, &[
             2.0, -1.0, -1.0,
            -1.0, 1.0 + e, -e,
            -1.0, -e, 1.0 + e,
        ]);
        assert_relative_eq!(eps3(e).laplacian(), expected, epsilon = 1e-15);
        // agrees with the matrix product form
        let g = eps3(e);
        let b = g.incidence();
        let bwbt = &b * DMatrix::from_diagonal(&g.weights()) * b.transpose();
        assert_relative_eq!(g.laplacian(), bwbt, epsilon = 1e-15);
    }

    #[test]
    fn pseudoinverse_fixtures() {
        let p = pseudoinverse(&path2().laplacian()).unwrap();
        assert_relative_eq!(p, DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 0.25]), epsilon = 1e-12);
        let l = triangle().laplacian();
        let p = pseudoinverse(&l).unwrap();
        assert_relative_eq!(p, &l / 9.0, epsilon = 1e-12);
        assert!(inf_norm_matrix(&(&l * &p * &l - &l)) < 1e-9);
        let expected = DMatrix::identity(3, 3) - DMatrix::from_element(3, 3, 1.0 / 3.0);
        assert_relative_eq!(&p * &l, expected, epsilon = 1e-9);
    }

    #[test]
    fn pseudoinverse_rejects_extra_kernel() {
        // Laplacian of two disjoint edges
        #[rustfmt::skip]
        let l = DMatrix::from_row_slice(4, 4, &[
             1.0, -1.0,  0.0,  0.0,
            -1.0,  1.0,  0.0,  0.0,
             0.0,  0.0,  1.0, -1.0,
             0.0,  0.0, -1.0,  1.0,
        ]);
        assert_eq!(pseudoinverse(&l), Err(Error::SingularBeyondKernel { rank: 2, expected: 3 }));
    }

    #[test]
    fn acyclic_projection_is_zero() {
        let pp = projections(&path2()).unwrap();
        assert!(pp.p_cyc[(0, 0)].abs() < 1e-12);
        let tree = WeightedGraph::new(4, [(0, 1, 2.0), (1, 2, 0.5), (1, 3, 3.0)]).unwrap();
        assert!(projections(&tree).unwrap().p_cyc_norm < 1e-9);
    }

    #[test]
    fn eps3_cycle_projection() {
        // Exact rank-one form u v^T with cycle vector v = (1, -1, 1) under our
        // orientation, u = diag(w)^-1 v / (v^T diag(w)^-1 v).
        for &e in &[0.1, 0.01, 0.001] {
            let pp = projections(&eps3(e)).unwrap();
            let s = 1.0 + 2.0 * e;
            let u = [e / s, -e / s, 1.0 / s];
            let v = [1.0, -1.0, 1.0];
            for r in 0..3 {
                for c in 0..3 {
                    assert!((pp.p_cyc[(r, c)] - u[r] * v[c]).abs() < 1e-12);
                }
            }
            assert!((pp.p_cyc_norm - 3.0 / s).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_fixtures() {
        let ops = GraphOperators::new(&path2()).unwrap();
        let eta = ops.eta(&DVector::from_vec(vec![0.5, -0.5])).unwrap();
        assert_relative_eq!(eta[0], 0.5, epsilon = 1e-14);
        assert_eq!(ops.eta(&DVector::zeros(2)).unwrap(), DVector::zeros(1));

        // dense least-squares oracle: solve the grounded system L x = omega
        // with x_2 = 0, then take edge differences
        let g = triangle();
        let ops = GraphOperators::new(&g).unwrap();
        let omega = DVector::from_vec(vec![2.0, -1.0, -1.0]);
        let l = g.laplacian();
        let reduced = l.view((0, 0), (2, 2)).into_owned();
        let x2 = reduced.lu().solve(&omega.rows(0, 2).into_owned()).unwrap();
        let x = DVector::from_vec(vec![x2[0], x2[1], 0.0]);
        let oracle = g.edge_differences(&x);
        assert_relative_eq!(ops.eta(&omega).unwrap(), oracle, epsilon = 1e-12);
        assert_relative_eq!(oracle, DVector::from_vec(vec![1.0, 1.0, 0.0]), epsilon = 1e-12);
        assert!(ops.projections.is_flow(&oracle));
    }

    #[test]
    fn uncentered_rejected() {
        let ops = GraphOperators::new(&path2()).unwrap();
        assert!(matches!(
            ops.eta(&DVector::from_vec(vec![0.5, -0.2])),
            Err(Error::UncenteredFrequencies { .. })
        ));
        let c = center(&DVector::from_vec(vec![0.5, -0.2]));
        assert!(ops.eta(&c).is_ok());
    }

    #[test]
    fn triangle_lambda2() {
        let ops = GraphOperators::new(&triangle()).unwrap();
        assert_relative_eq!(ops.lambda2(), 3.0, epsilon = 1e-12);
    }
}
