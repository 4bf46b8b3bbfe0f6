//! The inverse power series of the edge balance map and the scalar
//! functions that certify its convergence.

mod expansion;
mod scalar;
mod symbolic;

pub use expansion::{evaluate_terms, test_t0, ConvergenceReport, SeriesExpansion};
pub use scalar::{arcsin_coeff, double_factorial, double_factorial_u128, gamma_star, h, h_inverse};
pub use symbolic::{
    format_csv, format_latex, format_text, odd_partitions, permutation_count, symbolic_terms, Summand,
    SymbolicTerm, MAX_ORDER,
};

/// Order used when none is requested.
pub const DEFAULT_ORDER: usize = 7;
