//! Galerkin lower bound for `Λ²` on the span of `xᵏ(1-x)ᵏ xⁱ`, `i <= N`.
//!
//! The span is parametrized by `φ_i = xᵏ(1-x)ᵏ P̃_i(x)` with shifted Legendre
//! `P̃_i`; the nested spans, and so every `Λ_n`, are those of the monomial
//! factors, but the Gram matrix is far better conditioned. Restricted to the span, the best constant is the dual norm `rᵀG⁻¹r` with
//! `G_ij = ∫φ_i⁽ᵏ⁾φ_j⁽ᵏ⁾` and `r_i = ∫φ_i ρ`. One `L D Lᵀ` factorization of
//! `G` yields every nested value at once: with `L y = r`,
//! `Λ_n² = Σ_{i≤n} y_i²/d_i`, which is non-decreasing in `n`.

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{OracleError, OracleMethod, OracleReport};
use crate::numcore::linalg::{forward_substitute, ldlt, Matrix};
use crate::numcore::{quad_numeric, Field, Mode, NumError, PiecewisePolynomial, Polynomial, QuadOptions};
use crate::solver::ProblemSpec;
use crate::weight::Weight;

/// Pivot floor, relative to the diagonal, below which float `L D Lᵀ` gives up.
pub const FLOAT_PIVOT_TOL: f64 = 1e-13;
/// Absolute accuracy of quadrature-based load entries.
pub const LOAD_QUAD_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GalerkinConfig {
    /// Highest basis index `N`; the span has dimension `N + 1`.
    pub degree: usize,
    pub mode: Mode,
}

impl GalerkinConfig {
    pub fn new(degree: usize, mode: Mode) -> Self {
        GalerkinConfig { degree, mode }
    }
}

/// `P̃_n(x) = Σ_j (-1)^(n+j) C(n, j) C(n+j, j) xʲ`.
fn shifted_legendre(n: usize) -> Polynomial<BigRational> {
    let coeffs = (0..=n)
        .map(|j| {
            let c = binomial(BigInt::from(n), BigInt::from(j)) * binomial(BigInt::from(n + j), BigInt::from(j));
            let c = BigRational::from_integer(c);
            if (n + j) % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    Polynomial::new(coeffs)
}

fn basis(k: usize, i: usize) -> Polynomial<BigRational> {
    let bump = Polynomial::new(vec![BigRational::zero(), BigRational::one(), -BigRational::one()]);
    bump.pow(k).mul(&shifted_legendre(i))
}

/// `G` is data-independent, so it is assembled exactly and rounded once.
///
/// The `φ_i⁽ᵏ⁾` have integer coefficients, so `G = D H Dᵀ` with the moment
/// matrix `H_ab = 1/(a+b+1)` is computed in integers over the common
/// denominator `lcm(1, …, 2 deg + 1)`.
fn stiffness<T: Field>(k: usize, n: usize) -> Matrix<T> {
    let d: Vec<Vec<BigInt>> = (0..=n)
        .map(|i| {
            basis(k, i)
                .nth_derivative(k)
                .coeffs()
                .iter()
                .map(|c| {
                    debug_assert!(c.is_integer());
                    c.to_integer()
                })
                .collect()
        })
        .collect();
    let width = d.iter().map(Vec::len).max().unwrap_or(0);
    let denom = (1..2 * width).fold(BigInt::one(), |acc, m| acc.lcm(&BigInt::from(m)));
    let h: Vec<BigInt> = (0..2 * width).map(|m| &denom / BigInt::from(m + 1)).collect();
    let e: Vec<Vec<BigInt>> = d
        .iter()
        .map(|di| {
            (0..width)
                .map(|b| di.iter().enumerate().map(|(a, c)| c * &h[a + b]).sum())
                .collect()
        })
        .collect();
    let mut g = vec![vec![T::zero(); n + 1]; n + 1];
    for i in 0..=n {
        for j in i..=n {
            let num: BigInt = e[i].iter().zip(&d[j]).map(|(x, y)| x * y).sum();
            let v = T::from_rational(&BigRational::new(num, denom.clone()));
            g[j][i] = v.clone();
            g[i][j] = v;
        }
    }
    g
}

/// `φ_i(x)` via the Legendre three-term recurrence; the monomial
/// coefficients of `P̃_i` are too large to evaluate in double precision.
fn basis_f64(k: usize, i: usize, x: f64) -> f64 {
    let t = 2.0 * x - 1.0;
    let (mut prev, mut cur) = (1.0, t);
    if i == 0 {
        cur = 1.0;
    }
    for n in 1..i {
        let n = n as f64;
        let next = ((2.0 * n + 1.0) * t * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    (x * (1.0 - x)).powi(k as i32) * cur
}

/// `∫ φ_i ρ` by adaptive quadrature, for weights whose moments are not used.
fn quad_load(k: usize, i: usize, weight: &Weight) -> Result<f64, OracleError> {
    let mut opts = QuadOptions::new(LOAD_QUAD_TOL).with_breakpoints(weight.kinks());
    if weight.singular_at_zero() {
        opts = opts.singular_left();
    }
    let f = |x: f64| basis_f64(k, i, x) * weight.eval(x).unwrap_or(f64::NAN);
    Ok(quad_numeric(f, 0.0, 1.0, &opts)?.value)
}

fn load<T: Field>(k: usize, n: usize, weight: &Weight) -> Result<Vec<T>, OracleError> {
    let numeric = T::MODE == Mode::Float
        && matches!(weight, Weight::Power { .. } | Weight::Hardy { .. });
    (0..=n)
        .map(|i| {
            if numeric {
                let value = quad_load(k, i, weight)?;
                Ok(T::from_rational(
                    &BigRational::from_float(value).ok_or(OracleError::NonFinite)?,
                ))
            } else {
                let phi = PiecewisePolynomial::single(basis(k, i));
                let exact: BigRational = weight.pair_piecewise(&phi)?;
                Ok(T::from_rational(&exact))
            }
        })
        .collect()
}

/// `(Λ_0², …, Λ_N²)`.
pub fn galerkin_history<T: Field>(
    k: usize,
    weight: &Weight,
    degree: usize,
) -> Result<Vec<T>, OracleError> {
    if k == 0 {
        return Err(OracleError::InvalidOrder(k));
    }
    let g = stiffness::<T>(k, degree);
    let r = load::<T>(k, degree, weight)?;
    let (l, d) = ldlt(&g, FLOAT_PIVOT_TOL).map_err(|e| match e {
        NumError::NotPositiveDefinite { index } => OracleError::IllConditioned { degree, index },
        other => other.into(),
    })?;
    let y = forward_substitute(&l, &r);
    let mut acc = T::zero();
    Ok(y.into_iter()
        .zip(d)
        .map(|(y, d)| {
            acc = acc.clone() + y.clone() * y / d;
            acc.clone()
        })
        .collect())
}

pub fn galerkin_lambda(spec: &ProblemSpec, cfg: &GalerkinConfig) -> Result<OracleReport, OracleError> {
    let history: Vec<(f64, crate::numcore::Scalar)> = match cfg.mode {
        Mode::Exact => galerkin_history::<BigRational>(spec.k, &spec.weight, cfg.degree)?
            .into_iter()
            .enumerate()
            .map(|(n, v)| (n as f64, v.into()))
            .collect(),
        Mode::Float => galerkin_history::<f64>(spec.k, &spec.weight, cfg.degree)?
            .into_iter()
            .enumerate()
            .map(|(n, v)| (n as f64, v.into()))
            .collect(),
    };
    let lambda_sq = history.last().expect("degree >= 0").1.clone();
    let mut report = OracleReport::new(OracleMethod::Galerkin, lambda_sq);
    report.sign_definite = true;
    report.converged = true;
    report.details.insert("degree".into(), cfg.degree as f64);
    report.history = history;
    Ok(report)
}
