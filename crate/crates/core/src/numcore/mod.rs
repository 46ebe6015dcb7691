//! Numeric foundation: dual-mode scalars, dense and piecewise polynomials,
//! exact sign certification, small linear solves and adaptive quadrature.

pub mod linalg;
pub mod piecewise;
pub mod poly;
pub mod quad;
pub mod scalar;
pub mod sturm;

pub use piecewise::PiecewisePolynomial;
pub use poly::Polynomial;
pub use quad::{quad_numeric, QuadOptions, QuadResult};
pub use scalar::{format_rational, parse_rational, rational_to_f64, Field, Mode, Scalar};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("operands have different arithmetic modes")]
    ModeMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0}")]
    Parse(String),
    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),
    #[error("matrix and right-hand side dimensions do not match")]
    DimensionMismatch,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not positive definite (pivot {index})")]
    NotPositiveDefinite { index: usize },
    #[error("integration interval must satisfy a <= b")]
    InvalidInterval,
    #[error("quadrature did not converge: error estimate {error:e} above tolerance {tol:e}")]
    NonConvergence { error: f64, tol: f64 },
}
