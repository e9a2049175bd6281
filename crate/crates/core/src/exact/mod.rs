//! Exact arithmetic: rationals, sparse polynomials, truncated Laurent series
//! and dense linear algebra over the rationals.

mod linalg;
mod poly;
mod scalar;
mod series;
mod var;

pub use linalg::{
    char_coeffs, complete_coeffs, generic_matrix, nullspace, rank, row_reduce, solve_linear, solve_linear_generic,
    solve_linear_poly, Matrix, Ring,
};
pub use poly::{Monomial, Poly};
pub use scalar::{
    abs, binomial, factorial, frac, int, is_integer, parse_scalar, scalar_short, scalar_to_string, sign, Coeff,
    Scalar,
};
pub use series::{series_invert, TruncSeries};
pub use var::Var;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("not invertible as series")]
    NotInvertible,
    #[error("beyond truncation: requested exponent {requested}, order {order}")]
    BeyondTruncation { requested: i32, order: i32 },
    #[error("singular system: rank {rank} for {rows}x{cols}")]
    Singular { rank: usize, rows: usize, cols: usize },
    #[error("inconsistent system: rank {rank} for {rows}x{cols}")]
    Inconsistent { rank: usize, rows: usize, cols: usize },
}

/// Polynomials with exact rational coefficients.
pub type QPoly = Poly<Scalar>;
/// Series with exact rational coefficients.
pub type QSeries = TruncSeries<Scalar>;
