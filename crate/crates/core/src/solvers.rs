//! Residuals of the four balance-equation forms and the numerical solvers.
//!
//! With `z = B^T x` and `φ = sin(z)`, a synchronized state satisfies each of
//!
//! ```text
//! node balance                ω = B diag(w) sin(B^T x)
//! flow balance                η = P_cut sin(z),          z ∈ Img(B^T)
//! constrained edge balance    η = P_cut ψ,               arcsin(ψ) ∈ Img(B^T)
//! unconstrained edge balance  η = P_cut φ + P_cyc arcsin(φ)
//! ```

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{center, check_len, inf_norm, EdgeVector, GraphOperators, NodeVector, ProjectionPair, WeightedGraph};
use crate::series::ConvergenceReport;

/// Arcsine arguments this close beyond ±1 are clamped rather than rejected.
pub const ARCSIN_CLAMP: f64 = 1e-12;
/// Cycle component above which an edge vector is not a flow sine.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-6;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 100;
pub const FIXED_POINT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    /// Edge vector `φ*` for the fixed-point solver, node angles `x*` for Newton.
    pub solution: DVector<f64>,
    pub iterations: usize,
    pub residual_inf: f64,
    pub converged: bool,
    /// Certified angle bound, when the convergence test held.
    pub gamma_used: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub node_residual: f64,
    pub flow_residual: f64,
    pub constrained_residual: f64,
    pub unconstrained_residual: f64,
    pub max_mismatch: f64,
}

/// Componentwise arcsine with clamping at the ±1 boundary.
pub fn arcsin_vec(v: &EdgeVector) -> Result<EdgeVector> {
    let mut out = v.clone();
    for x in out.iter_mut() {
        let a = x.abs();
        if a > 1.0 + ARCSIN_CLAMP || x.is_nan() {
            return Err(Error::DomainError { func: "arcsin", value: *x });
        }
        *x = x.clamp(-1.0, 1.0).asin();
    }
    Ok(out)
}

/// `ω - B diag(w) sin(B^T x)`.
pub fn residual_node(g: &WeightedGraph, omega: &NodeVector, x: &NodeVector) -> NodeVector {
    let s = g.edge_differences(x).map(f64::sin);
    omega - g.weighted_divergence(&s)
}

/// `η - P_cut φ - P_cyc arcsin(φ)`.
pub fn residual_unconstrained(pp: &ProjectionPair, eta: &EdgeVector, phi: &EdgeVector) -> Result<EdgeVector> {
    let asin = arcsin_vec(phi)?;
    Ok(eta - &pp.p_cut * phi - &pp.p_cyc * asin)
}

/// `η - P_cut sin(z)`.
pub fn residual_flow(pp: &ProjectionPair, eta: &EdgeVector, z: &EdgeVector) -> EdgeVector {
    eta - &pp.p_cut * z.map(f64::sin)
}

/// `(η - P_cut ψ, ‖P_cyc arcsin(ψ)‖∞)`; the scalar measures how far
/// `arcsin(ψ)` is from the cutset space.
pub fn residual_constrained(pp: &ProjectionPair, eta: &EdgeVector, psi: &EdgeVector) -> Result<(EdgeVector, f64)> {
    let asin = arcsin_vec(psi)?;
    Ok((eta - &pp.p_cut * psi, inf_norm(&(&pp.p_cyc * asin))))
}

/// Banach iteration `φ ← η - P_cyc(arcsin(φ) - φ)` from `φ = η`.
///
/// Stops when the increment, which equals the unconstrained residual at the
/// current iterate, drops below `tol`. `gamma_used` is set only when the
/// series convergence test holds for `η`.
pub fn solve_fixed_point(pp: &ProjectionPair, eta: &EdgeVector, tol: f64, max_iter: usize) -> Result<SolveOutcome> {
    let certificate = ConvergenceReport::from_norms(inf_norm(eta), pp.p_cyc_norm)?;
    let mut phi = eta.clone();
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iter {
        if phi.iter().any(|v| v.abs() > 1.0 + ARCSIN_CLAMP) {
            return Err(Error::IterateLeftDomain { iteration: iteration - 1 });
        }
        let step = residual_unconstrained(pp, eta, &phi)?;
        residual = inf_norm(&step);
        if residual < tol {
            return Ok(SolveOutcome {
                solution: phi,
                iterations: iteration,
                residual_inf: residual,
                converged: true,
                gamma_used: certificate.gamma_star,
            });
        }
        phi += step;
    }
    Err(Error::MaxIterationsExceeded { iterations: max_iter, residual })
}

/// Jacobian of `x ↦ ω - B diag(w) sin(B^T x)`, which is
/// `-B diag(w cos(B^T x)) B^T`.
pub fn node_jacobian(g: &WeightedGraph, x: &NodeVector) -> DMatrix<f64> {
    let n = g.n();
    let mut j = DMatrix::zeros(n, n);
    for e in g.edges() {
        let c = e.w * (x[e.i] - x[e.j]).cos();
        j[(e.i, e.i)] -= c;
        j[(e.j, e.j)] -= c;
        j[(e.i, e.j)] += c;
        j[(e.j, e.i)] += c;
    }
    j
}

/// Newton-Raphson on the node balance equations.
///
/// The Jacobian is singular along `1_n`; each step grounds the last node
/// and the final iterate is mean-centered. `x0` defaults to `L^+ ω`.
pub fn solve_newton(
    ops: &GraphOperators,
    omega: &NodeVector,
    x0: Option<&NodeVector>,
    tol: f64,
    max_iter: usize,
) -> Result<SolveOutcome> {
    let g = ops.graph();
    let n = g.n();
    check_len(omega, n)?;
    let mut x = match x0 {
        Some(x0) => {
            check_len(x0, n)?;
            x0.clone()
        }
        None => &ops.laplacian_pinv * omega,
    };
    let mut f = residual_node(g, omega, &x);
    let mut residual = inf_norm(&f);
    let mut iterations = 0;
    while !(residual < tol) {
        if iterations == max_iter || !residual.is_finite() {
            return Err(Error::MaxIterationsExceeded { iterations, residual });
        }
        iterations += 1;
        let jac = node_jacobian(g, &x);
        let reduced = jac.view((0, 0), (n - 1, n - 1)).into_owned();
        let rhs = -f.rows(0, n - 1).into_owned();
        let step = reduced
            .lu()
            .solve(&rhs)
            .filter(|s| s.iter().all(|v| v.is_finite()))
            .ok_or(Error::SingularJacobian { iteration: iterations })?;
        for k in 0..n - 1 {
            x[k] += step[k];
        }
        f = residual_node(g, omega, &x);
        residual = inf_norm(&f);
    }
    Ok(SolveOutcome { solution: center(&x), iterations, residual_inf: residual, converged: true, gamma_used: None })
}

/// Node angles `x = L^+ B diag(w) arcsin(φ)` with `sin(B^T x) = φ`.
pub fn recover_angles(ops: &GraphOperators, phi: &EdgeVector) -> Result<NodeVector> {
    check_len(phi, ops.graph().m())?;
    let asin = arcsin_vec(phi)?;
    let membership = inf_norm(&(&ops.projections.p_cyc * &asin));
    if membership > MEMBERSHIP_TOLERANCE {
        return Err(Error::NotAFlowSine { membership });
    }
    Ok(&ops.laplacian_pinv * ops.graph().weighted_divergence(&asin))
}

/// Evaluates all four balance forms at the edge quantities built from `x`.
pub fn check_equivalence(ops: &GraphOperators, omega: &NodeVector, x: &NodeVector) -> Result<EquivalenceReport> {
    let g = ops.graph();
    let pp = &ops.projections;
    let eta = ops.eta(omega)?;
    let z = g.edge_differences(x);
    let phi = z.map(f64::sin);
    let node_residual = inf_norm(&residual_node(g, omega, x));
    let flow_residual = inf_norm(&residual_flow(pp, &eta, &z));
    let (constrained, membership) = residual_constrained(pp, &eta, &phi)?;
    let constrained_residual = inf_norm(&constrained).max(membership);
    let unconstrained_residual = inf_norm(&residual_unconstrained(pp, &eta, &phi)?);
    let max_mismatch = node_residual.max(flow_residual).max(constrained_residual).max(unconstrained_residual);
    Ok(EquivalenceReport { node_residual, flow_residual, constrained_residual, unconstrained_residual, max_mismatch })
}
