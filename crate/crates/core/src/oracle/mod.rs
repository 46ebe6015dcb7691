//! Independent checks of the pipeline: a Galerkin lower bound, a
//! finite-difference sign iteration, and a maximum-principle checker.
//!
//! None of these use the seed system or the closed forms.

pub mod fd;
pub mod galerkin;
pub mod max_principle;
pub mod sign_iteration;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::numcore::{NumError, Scalar};
use crate::weight::WeightError;

pub use galerkin::{galerkin_history, galerkin_lambda, GalerkinConfig};
pub use max_principle::{max_principle_check, solve_clamped, MaxPrincipleMethod};
pub use sign_iteration::{sign_iteration, sign_iteration_runs, SignInit, SignIterationConfig, SignRun};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("order k must be at least 1 (got {0})")]
    InvalidOrder(usize),
    #[error("grid of {0} interior points is too small")]
    InvalidGrid(usize),
    #[error("Gram matrix is numerically singular at pivot {index} for N = {degree}; lower N or use exact mode")]
    IllConditioned { degree: usize, index: usize },
    #[error("solution is not positive: w({x}) = {value:e}")]
    PositivityViolated { x: f64, value: f64 },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMethod {
    Galerkin,
    SignIteration,
    MaxPrinciple,
}

impl OracleMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleMethod::Galerkin => "galerkin",
            OracleMethod::SignIteration => "sign_iteration",
            OracleMethod::MaxPrinciple => "max_principle",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub method: OracleMethod,
    /// Estimate of `Λ²`; exact for the exact-mode Galerkin bound. Zero for
    /// the maximum-principle check, which does not estimate `Λ`.
    pub lambda_sq: Scalar,
    /// Galerkin: `(N, Λ_N²)`. Sign iteration: `(restart, μ_h)`.
    pub history: Vec<(f64, Scalar)>,
    pub converged: bool,
    pub sign_definite: bool,
    /// Sampled solution `(x, u(x))`, when the method produces one.
    pub solution: Vec<(f64, f64)>,
    pub details: BTreeMap<String, f64>,
}

impl OracleReport {
    fn new(method: OracleMethod, lambda_sq: Scalar) -> Self {
        OracleReport {
            method,
            lambda_sq,
            history: Vec::new(),
            converged: false,
            sign_definite: false,
            solution: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn lambda_estimate(&self) -> f64 {
        self.lambda_sq.to_f64().sqrt()
    }
}
