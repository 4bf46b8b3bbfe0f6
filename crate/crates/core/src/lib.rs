//! Frequency-synchronized solutions of the heterogeneous Kuramoto model
//!
//! ```text
//! dθ/dt = ω - B diag(w) sin(B^T θ)
//! ```
//!
//! on connected weighted graphs, computed by inverting the unconstrained
//! edge balance equations `η = P_cut φ + P_cyc arcsin(φ)` with a power series
//! in `η = B^T L^+ ω`, and certified by a family of synchronization tests.

pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod random;
pub mod series;
pub mod solvers;

pub use error::{Error, Result};
pub use graph::{EdgeVector, GraphOperators, NodeVector, ProjectionPair, WeightedGraph};
